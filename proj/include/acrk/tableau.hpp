#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrk/eigen.hpp"

namespace acrk {

/// Implicit Runge-Kutta coefficients (A, b, c) with order metadata.
/// extrapolation_depth() is min(p, m+1): the number of history levels used to
/// linearize the reaction term without lowering the scheme's temporal order.
struct ButcherTableau {
    std::string label;
    int stages = 0;            ///< m
    int order = 0;             ///< classical order p
    std::vector<double> a;     ///< m x m row-major stage matrix
    std::vector<double> b;     ///< m weights
    std::vector<double> c;     ///< m abscissae in [0,1], distinct

    double a_at(int i, int j) const { return a[static_cast<size_t>(i) * stages + j]; }
    int extrapolation_depth() const { return std::min(order, stages + 1); }
};

/// m-stage Gauss-Legendre collocation method, order p = 2m. Coefficients are
/// stored as closed-form surd expressions evaluated in double precision.
inline ButcherTableau gauss_legendre(int m) {
    ButcherTableau t;
    t.stages = m;
    t.order = 2 * m;
    t.label = "gl" + std::to_string(m);
    switch (m) {
    case 1:
        t.c = {0.5};
        t.b = {1.0};
        t.a = {0.5};
        break;
    case 2: {
        const double s3 = std::sqrt(3.0);
        t.c = {0.5 - s3 / 6.0, 0.5 + s3 / 6.0};
        t.b = {0.5, 0.5};
        t.a = {0.25, 0.25 - s3 / 6.0,
               0.25 + s3 / 6.0, 0.25};
        break;
    }
    case 3: {
        const double s15 = std::sqrt(15.0);
        t.c = {0.5 - s15 / 10.0, 0.5, 0.5 + s15 / 10.0};
        t.b = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};
        t.a = {5.0 / 36.0,             2.0 / 9.0 - s15 / 15.0, 5.0 / 36.0 - s15 / 30.0,
               5.0 / 36.0 + s15 / 24.0, 2.0 / 9.0,              5.0 / 36.0 - s15 / 24.0,
               5.0 / 36.0 + s15 / 30.0, 2.0 / 9.0 + s15 / 15.0, 5.0 / 36.0};
        break;
    }
    default:
        throw std::invalid_argument("gauss_legendre: stage count " + std::to_string(m) +
                                    " not cataloged (supported: 1,2,3)");
    }
    return t;
}

/// m-stage Radau IIA collocation method, order p = 2m-1, c_m = 1, L-stable.
inline ButcherTableau radau_iia(int m) {
    ButcherTableau t;
    t.stages = m;
    t.order = 2 * m - 1;
    t.label = "radau" + std::to_string(m);
    switch (m) {
    case 2:
        t.c = {1.0 / 3.0, 1.0};
        t.b = {0.75, 0.25};
        t.a = {5.0 / 12.0, -1.0 / 12.0,
               0.75, 0.25};
        break;
    case 3: {
        const double s6 = std::sqrt(6.0);
        t.c = {(4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0};
        t.b = {(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0};
        t.a = {(88.0 - 7.0 * s6) / 360.0,     (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0,
               (296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0,     (-2.0 - 3.0 * s6) / 225.0,
               (16.0 - s6) / 36.0,            (16.0 + s6) / 36.0,            1.0 / 9.0};
        break;
    }
    default:
        throw std::invalid_argument("radau_iia: stage count " + std::to_string(m) +
                                    " not cataloged (supported: 2,3)");
    }
    return t;
}

/// Lookup by the CLI-facing name: gl1, gl2, gl3, radau2, radau3. The catalog
/// holds the two algebraically stable collocation families; further implicit
/// methods (e.g. Lobatto IIIC) can be added here as long as validate_tableau
/// accepts them.
inline ButcherTableau tableau_by_name(const std::string& name) {
    if (name == "gl1") return gauss_legendre(1);
    if (name == "gl2") return gauss_legendre(2);
    if (name == "gl3") return gauss_legendre(3);
    if (name == "radau2") return radau_iia(2);
    if (name == "radau3") return radau_iia(3);
    throw std::invalid_argument("unknown tableau '" + name +
                                "' (expected gl1, gl2, gl3, radau2, radau3)");
}

/// Residuals of the collocation order conditions:
///   quadrature:  sum_i b_i c_i^{l-1} - 1/l          for l = 1..p
///   stage:       sum_j a_ij c_j^{l-1} - c_i^l / l   for l = 1..m, each i
struct OrderConditionReport {
    std::vector<double> quadrature_residuals; ///< entry l-1 holds condition l
    std::vector<double> stage_residuals;      ///< max over i, entry l-1
    double max_residual = 0.0;
};

inline OrderConditionReport verify_order_conditions(const ButcherTableau& t, int quad_lmax = 0) {
    OrderConditionReport rep;
    const int m = t.stages;
    const int lmax = quad_lmax > 0 ? quad_lmax : t.order;
    for (int l = 1; l <= lmax; ++l) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += t.b[i] * std::pow(t.c[i], l - 1);
        rep.quadrature_residuals.push_back(s - 1.0 / l);
    }
    for (int l = 1; l <= m; ++l) {
        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += t.a_at(i, j) * std::pow(t.c[j], l - 1);
            worst = std::max(worst, std::abs(s - std::pow(t.c[i], l) / l));
        }
        rep.stage_residuals.push_back(worst);
    }
    for (int l = 0; l < std::min<int>(t.order, static_cast<int>(rep.quadrature_residuals.size())); ++l)
        rep.max_residual = std::max(rep.max_residual, std::abs(rep.quadrature_residuals[l]));
    for (double v : rep.stage_residuals) rep.max_residual = std::max(rep.max_residual, v);
    return rep;
}

/// Smallest eigenvalue of the algebraic-stability matrix
/// M_ij = b_i a_ij + b_j a_ji - b_i b_j. Algebraic stability requires A
/// invertible, b_i > 0, and M positive semidefinite.
inline double algebraic_stability_min_eig(const ButcherTableau& t) {
    const int m = t.stages;
    std::vector<double> M(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            M[static_cast<size_t>(i) * m + j] =
                t.b[i] * t.a_at(i, j) + t.b[j] * t.a_at(j, i) - t.b[i] * t.b[j];
    return jacobi_eigenvalues(std::move(M), m).front();
}

/// Stability function sigma and stage weight functions p_i of the equivalent
/// single-step form: (p_1,...,p_m) = b^T (I + lambda A)^{-1} and
/// sigma(lambda) = 1 - lambda * sum_j p_j(lambda).
struct SigmaP {
    double sigma = 1.0;
    std::vector<double> p;
};

inline SigmaP sigma_p_eval(const ButcherTableau& t, double lambda) {
    const int m = t.stages;
    // Solve (I + lambda A)^T x = b to get the row vector b^T (I + lambda A)^{-1}.
    std::vector<double> mat(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            mat[static_cast<size_t>(i) * m + j] = (i == j ? 1.0 : 0.0) + lambda * t.a_at(j, i);
    SigmaP out;
    try {
        SmallLU lu(std::move(mat), m);
        out.p = lu.solve(t.b);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("sigma_p_eval: I + lambda*A is singular at lambda = " +
                                 std::to_string(lambda));
    }
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += out.p[j];
    out.sigma = 1.0 - lambda * s;
    return out;
}

/// Numerical screening of the rational-function assumptions:
///  - contraction |sigma(lambda)| < 1 and bounded |p_i| on (0, inf)
///  - Taylor accuracy: |sigma(lambda) - e^{-lambda}| = O(lambda^{p+1}),
///    measured as a log-log slope on a window where the residual is
///    resolvable in double precision
///  - behavior of |sigma| at lambda -> inf (L-stability flag)
struct AssumptionReport {
    bool contraction_ok = true;      ///< |sigma| < 1 at every sampled lambda > 0
    double max_abs_sigma = 0.0;
    double max_abs_p = 0.0;          ///< sup over samples and stages
    double max_lambda_p = 0.0;       ///< sup of lambda*|p_i|; finite iff deg(num) < deg(den)
    double sigma_at_infinity = 0.0;  ///< |sigma| at the largest sample
    bool l_stable = false;           ///< |sigma(inf)| ~ 0
    double taylor_slope = 0.0;       ///< expected ~ p+1
};

inline AssumptionReport check_assumptions(const ButcherTableau& t,
                                          double lambda_min = 1e-6, double lambda_max = 1e8,
                                          int samples = 161) {
    AssumptionReport rep;
    for (int s = 0; s < samples; ++s) {
        const double lambda =
            lambda_min * std::pow(lambda_max / lambda_min, static_cast<double>(s) / (samples - 1));
        const SigmaP sp = sigma_p_eval(t, lambda);
        rep.max_abs_sigma = std::max(rep.max_abs_sigma, std::abs(sp.sigma));
        if (std::abs(sp.sigma) >= 1.0) rep.contraction_ok = false;
        for (double pi : sp.p) {
            rep.max_abs_p = std::max(rep.max_abs_p, std::abs(pi));
            rep.max_lambda_p = std::max(rep.max_lambda_p, lambda * std::abs(pi));
        }
    }
    rep.sigma_at_infinity = std::abs(sigma_p_eval(t, lambda_max).sigma);
    rep.l_stable = rep.sigma_at_infinity < 1e-4;
    // Least-squares slope of log|sigma - e^{-lambda}| vs log(lambda) on
    // [0.1, 1]: small enough for the leading term to dominate, large enough
    // for the difference to sit well above rounding noise.
    const int ns = 9;
    std::vector<double> lx, ly;
    for (int s = 0; s < ns; ++s) {
        const double lambda = 0.1 * std::pow(10.0, static_cast<double>(s) / (ns - 1));
        const double resid = std::abs(sigma_p_eval(t, lambda).sigma - std::exp(-lambda));
        if (resid > 1e-14) {
            lx.push_back(std::log(lambda));
            ly.push_back(std::log(resid));
        }
    }
    if (lx.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
        }
        const double nd = static_cast<double>(lx.size());
        rep.taylor_slope = (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
    }
    return rep;
}

/// Residual of the strict-accuracy identity at order q = m+1 (collocation):
///   sum_i c_i^j p_i(lambda) = j!/(-lambda)^{j+1} (sigma(lambda) - sum_{l<=j} (-lambda)^l / l!)
/// for j = 0..m. Returns the worst residual over those j.
inline double strict_accuracy_residual(const ButcherTableau& t, double lambda) {
    const SigmaP sp = sigma_p_eval(t, lambda);
    double worst = 0.0;
    for (int j = 0; j <= t.stages; ++j) {
        double lhs = 0.0;
        for (int i = 0; i < t.stages; ++i) lhs += std::pow(t.c[i], j) * sp.p[i];
        double partial = 0.0, term = 1.0; // sum_{l=0}^{j} (-lambda)^l / l!
        for (int l = 0; l <= j; ++l) {
            partial += term;
            term *= -lambda / (l + 1.0);
        }
        double fact = 1.0;
        for (int l = 2; l <= j; ++l) fact *= l;
        const double rhs = fact / std::pow(-lambda, j + 1) * (sp.sigma - partial);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

/// Structural validation of a cataloged tableau; throws on violation.
inline void validate_tableau(const ButcherTableau& t, double tol = 1e-12) {
    const auto rep = verify_order_conditions(t);
    if (rep.max_residual > tol)
        throw std::runtime_error("tableau " + t.label + ": order-condition residual " +
                                 std::to_string(rep.max_residual));
    for (double bi : t.b)
        if (!(bi > 0.0)) throw std::runtime_error("tableau " + t.label + ": weights must be positive");
    if (algebraic_stability_min_eig(t) < -tol)
        throw std::runtime_error("tableau " + t.label + ": stability matrix not PSD");
    SmallLU check_invertible(t.a, t.stages); // throws if A is singular
}

} // namespace acrk
