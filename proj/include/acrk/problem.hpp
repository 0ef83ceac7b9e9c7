#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "acrk/mesh.hpp"

namespace acrk {

/// Ginzburg-Landau reaction term f(u) = eps^-2 (u - u^3).
inline double ginzburg_landau_f(double u, double eps) { return (u - u * u * u) / (eps * eps); }

/// Double-well potential F(u) = (1 - u^2)^2 / (4 eps^2), with F = -int f.
inline double ginzburg_landau_potential(double u, double eps) {
    const double w = 1.0 - u * u;
    return w * w / (4.0 * eps * eps);
}

/// Piecewise initial profile: 1 on (0, 1/2), a cosine ramp on [1/2, 2).
/// `printed` keeps the cosine argument (2pi/3)(x + 1/2), which jumps from 1 to
/// -1/2 at x = 1/2 and has a nonzero slope at x = 2. `smooth` uses
/// (2pi/3)(x - 1/2), which joins the branches with value 1 and zero slope and
/// has zero slope at x = 2.
enum class InitialProfile { printed, smooth };

inline double initial_condition(double x, InitialProfile kind = InitialProfile::printed) {
    if (x < 0.0 || x > 2.0)
        throw std::domain_error("initial_condition: x = " + std::to_string(x) + " outside [0,2]");
    if (x < 0.5) return 1.0;
    const double shift = (kind == InitialProfile::printed) ? 0.5 : -0.5;
    return std::cos(2.0 * M_PI / 3.0 * (x + shift));
}

inline InitialProfile initial_profile_by_name(const std::string& name) {
    if (name == "printed") return InitialProfile::printed;
    if (name == "smooth") return InitialProfile::smooth;
    throw std::invalid_argument("unknown initial profile '" + name + "' (expected printed or smooth)");
}

inline std::string to_string(InitialProfile kind) {
    return kind == InitialProfile::printed ? "printed" : "smooth";
}

/// Problem data for a semilinear reaction-diffusion run: u_t = u_xx + f(u)
/// with homogeneous Neumann conditions, a known bound |u| <= alpha, and the
/// SAV quantities built from the potential F >= 0.
struct Problem {
    double a = 0.0;
    double b = 2.0;
    double alpha = 1.0; ///< maximum bound
    double c0 = 1.0;    ///< SAV shift; any c0 > 0 works since F >= 0
    std::function<double(double)> f;  ///< reaction term, applied nodewise
    std::function<double(double)> potential; ///< F with f = -F'
    std::function<double(double)> u0;

    NodalField interpolate_u0(MeshPtr mesh) const { return interpolate(u0, std::move(mesh)); }
};

/// The Allen-Cahn benchmark problem on (0,2) with the Ginzburg-Landau well.
inline Problem allen_cahn_problem(double eps = 0.1, double alpha = 1.0, double c0 = 1.0,
                                  InitialProfile profile = InitialProfile::smooth) {
    Problem p;
    p.a = 0.0;
    p.b = 2.0;
    p.alpha = alpha;
    p.c0 = c0;
    p.f = [eps](double u) { return ginzburg_landau_f(u, eps); };
    p.potential = [eps](double u) { return ginzburg_landau_potential(u, eps); };
    p.u0 = [profile](double x) { return initial_condition(x, profile); };
    return p;
}

/// SAV quantities of a state: E1 = (F(u), 1)_h, z = sqrt(E1 + C0), and the
/// normalized reaction W = f(u) / sqrt(E1 + C0) so that z W = f(u) nodewise.
struct SavQuantities {
    double e1 = 0.0;
    double z = 0.0;
    NodalField w;
};

inline double sav_e1(const Problem& prob, const NodalField& u) {
    const auto& wts = u.mesh->lumped_weights;
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) acc += wts[i] * prob.potential(u.values[i]);
    return acc;
}

inline SavQuantities sav_quantities(const Problem& prob, const NodalField& u) {
    SavQuantities q;
    q.e1 = sav_e1(prob, u);
    const double shifted = q.e1 + prob.c0;
    if (!(shifted > 0.0))
        throw std::domain_error("sav_quantities: E1 + C0 must be positive (got " +
                                std::to_string(shifted) + ")");
    q.z = std::sqrt(shifted);
    q.w = NodalField(u.mesh);
    const double inv = 1.0 / q.z;
    for (int i = 0; i < u.size(); ++i) q.w.values[i] = prob.f(u.values[i]) * inv;
    return q;
}

} // namespace acrk
