#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrk/diagnostics.hpp"
#include "acrk/lagrange.hpp"
#include "acrk/problem.hpp"
#include "acrk/spectral.hpp"

namespace acrk {

enum class SchemeKind { rk_cutoff, sav_rk_cutoff, rk_plain };

inline SchemeKind scheme_by_name(const std::string& name) {
    if (name == "rk") return SchemeKind::rk_cutoff;
    if (name == "sav") return SchemeKind::sav_rk_cutoff;
    if (name == "rk_plain") return SchemeKind::rk_plain;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected rk, sav, rk_plain)");
}

inline std::string to_string(SchemeKind kind) {
    switch (kind) {
    case SchemeKind::rk_cutoff: return "rk";
    case SchemeKind::sav_rk_cutoff: return "sav";
    case SchemeKind::rk_plain: return "rk_plain";
    }
    return "?";
}

/// Nodewise clamp to [-alpha, alpha]; rho is the largest modification made.
struct CutoffResult {
    NodalField field;
    double rho = 0.0;
};

inline CutoffResult cutoff(const NodalField& vhat, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("cutoff: bound must be positive");
    CutoffResult out{vhat, 0.0};
    for (double& v : out.field.values) {
        const double clamped = std::min(std::max(v, -alpha), alpha);
        out.rho = std::max(out.rho, std::abs(v - clamped));
        v = clamped;
    }
    return out;
}

/// Per-step diagnostics.
struct StepRecord {
    int n = 0;
    double t = 0.0;
    double rho = 0.0;        ///< max nodal cut-off magnitude
    double max_abs = 0.0;    ///< max_j |u^n(x_j)| after the step
    double energy = 0.0;     ///< discrete free energy E(u^n)
    double sav_energy = std::numeric_limits<double>::quiet_NaN();
    double z = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
};

/// Ring buffer of the k most recent accepted states. Each level caches the
/// modal transform of its reaction data (f(u) for the RK path, W(u) for the
/// SAV path) so a step re-transforms only the newest level.
class History {
  public:
    History(int depth, double z0 = std::numeric_limits<double>::quiet_NaN())
        : depth_(depth), z_(z0) {
        if (depth < 1) throw std::invalid_argument("History: depth must be >= 1");
    }

    int depth() const { return depth_; }
    bool full() const { return static_cast<int>(levels_.size()) == depth_; }
    double z() const { return z_; }
    void set_z(double z) { z_ = z; }

    /// State at t_{n-back}, back = 1..depth (1 = newest).
    const NodalField& state(int back) const { return levels_[back - 1].u; }
    const std::vector<double>& aux_modal(int back) const { return levels_[back - 1].aux; }

    void push(NodalField u, std::vector<double> aux) {
        levels_.push_front({std::move(u), std::move(aux)});
        if (static_cast<int>(levels_.size()) > depth_) levels_.pop_back();
    }

  private:
    struct Level {
        NodalField u;
        std::vector<double> aux;
    };
    int depth_;
    std::deque<Level> levels_;
    double z_;
};

namespace detail {

inline std::vector<double> reaction_modal(const SpectralOperator& op, const Problem& prob,
                                          const NodalField& u) {
    std::vector<double> fu(u.values.size());
    for (size_t i = 0; i < fu.size(); ++i) fu[i] = prob.f(u.values[i]);
    return op.to_modal(fu);
}

inline std::vector<double> sav_w_modal(const SpectralOperator& op, const Problem& prob,
                                       const NodalField& u) {
    return op.to_modal(sav_quantities(prob, u).w.values);
}

/// Extrapolated per-stage modal sources: g_i = sum_l L_l(c_i) * aux(t_{n-l}).
inline std::vector<std::vector<double>> extrapolated_sources(const History& hist,
                                                             const ButcherTableau& t) {
    const int k = hist.depth();
    const int n = static_cast<int>(hist.aux_modal(1).size());
    std::vector<std::vector<double>> g(t.stages, std::vector<double>(n, 0.0));
    for (int i = 0; i < t.stages; ++i) {
        const auto coeffs = extrapolation_coeffs(k, t.c[i]);
        for (int l = 1; l <= k; ++l) {
            const double cl = coeffs[l - 1];
            const auto& aux = hist.aux_modal(l);
            for (int j = 0; j < n; ++j) g[i][j] += cl * aux[j];
        }
    }
    return g;
}

/// Linear SAV stage solve with frozen fields W_i (modal):
///   du_i = Delta_h u_i + z_i W_i,  dz_i = -1/2 (W_i, du_i)_h,
///   u_i = u0 + tau sum a_ij du_j,  z_i = z0 + tau sum a_ij dz_j.
/// The (du, dz) system is linear; it is solved by superposition over dz
/// (one base block solve plus m sensitivity solves, then an m x m scalar
/// system), which is exact for the coupled system.
struct SavSolveModal {
    std::vector<std::vector<double>> udot;  ///< m x N
    std::vector<double> zdot;               ///< m
    std::vector<double> update;             ///< uhat modal
    double z_new = 0.0;
};

inline SavSolveModal solve_sav_stages_modal(const SpectralOperator& op, const ButcherTableau& t,
                                            double tau, std::span<const double> u0_modal,
                                            double z0,
                                            const std::vector<std::vector<double>>& w_modal) {
    const int m = t.stages;
    const int n = op.size();
    SavSolveModal out;
    out.udot.assign(m, std::vector<double>(n));
    std::vector<std::vector<std::vector<double>>> sens(
        m, std::vector<std::vector<double>>(m, std::vector<double>(n)));
    std::vector<double> mat(static_cast<size_t>(m) * m), rhs(m), x(m);
    for (int j = 0; j < n; ++j) {
        const double lam = op.eigenvalues()[j];
        for (int i = 0; i < m; ++i)
            for (int q = 0; q < m; ++q)
                mat[static_cast<size_t>(i) * m + q] = (i == q ? 1.0 : 0.0) + tau * lam * t.a_at(i, q);
        SmallLU lu(mat, m);
        for (int i = 0; i < m; ++i) rhs[i] = -lam * u0_modal[j] + z0 * w_modal[i][j];
        lu.solve(rhs, x);
        for (int i = 0; i < m; ++i) out.udot[i][j] = x[i];
        for (int q = 0; q < m; ++q) {
            for (int i = 0; i < m; ++i) rhs[i] = tau * t.a_at(i, q) * w_modal[i][j];
            lu.solve(rhs, x);
            for (int i = 0; i < m; ++i) sens[q][i][j] = x[i];
        }
    }
    // Scalar system (I + G) zdot = r with G_iq = 1/2 (W_i, du_i^(q))_h.
    std::vector<double> G(static_cast<size_t>(m) * m, 0.0), r(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += w_modal[i][j] * out.udot[i][j];
        r[i] = -0.5 * acc;
        for (int q = 0; q < m; ++q) {
            double g = 0.0;
            for (int j = 0; j < n; ++j) g += w_modal[i][j] * sens[q][i][j];
            G[static_cast<size_t>(i) * m + q] = (i == q ? 1.0 : 0.0) + 0.5 * g;
        }
    }
    try {
        SmallLU lu(G, m);
        out.zdot = lu.solve(r);
    } catch (const std::runtime_error&) {
        double fro = 0.0;
        for (double g : G) fro += g * g;
        throw std::runtime_error(
            "SAV stage solve: singular scalar stage system (tau = " + std::to_string(tau) +
            ", ||I+G||_F = " + std::to_string(std::sqrt(fro)) +
            "; condition number beyond working precision)");
    }
    for (int q = 0; q < m; ++q) {
        const double zq = out.zdot[q];
        for (int i = 0; i < m; ++i) {
            auto& di = out.udot[i];
            const auto& sq = sens[q][i];
            for (int j = 0; j < n; ++j) di[j] += zq * sq[j];
        }
    }
    out.update.assign(u0_modal.begin(), u0_modal.end());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) out.update[j] += tau * t.b[i] * out.udot[i][j];
    out.z_new = z0;
    for (int i = 0; i < m; ++i) out.z_new += tau * t.b[i] * out.zdot[i];
    return out;
}

} // namespace detail

struct StepResult {
    NodalField state;
    double z = std::numeric_limits<double>::quiet_NaN();
    double rho = 0.0;
    NodalField raw; ///< intermediate state before the clamp
};

/// One step of the extrapolated cut-off RK scheme (rk_plain skips the clamp).
inline StepResult step_rk_cutoff(const History& hist, const Problem& prob, const ButcherTableau& t,
                                 double tau, const SpectralOperator& op, bool plain = false) {
    if (!hist.full()) throw std::logic_error("step_rk_cutoff: history not full");
    const auto sources = detail::extrapolated_sources(hist, t);
    const auto u0_modal = op.to_modal(hist.state(1).values);
    const auto modal = solve_stages_modal(op, t, tau, u0_modal, sources);
    NodalField uhat(op.mesh(), op.from_modal(modal.update_coeffs));
    StepResult out;
    out.raw = uhat;
    if (plain) {
        out.state = std::move(uhat);
        out.rho = 0.0;
    } else {
        auto cut = cutoff(uhat, prob.alpha);
        out.state = std::move(cut.field);
        out.rho = cut.rho;
    }
    return out;
}

/// One step of the cut-off SAV-RK scheme.
inline StepResult step_sav_rk_cutoff(const History& hist, const Problem& prob,
                                     const ButcherTableau& t, double tau,
                                     const SpectralOperator& op) {
    if (!hist.full()) throw std::logic_error("step_sav_rk_cutoff: history not full");
    if (!std::isfinite(hist.z())) throw std::logic_error("step_sav_rk_cutoff: z not initialized");
    const auto w_stage = detail::extrapolated_sources(hist, t); // extrapolated W, modal
    const auto u0_modal = op.to_modal(hist.state(1).values);
    const auto sol = detail::solve_sav_stages_modal(op, t, tau, u0_modal, hist.z(), w_stage);
    NodalField uhat(op.mesh(), op.from_modal(sol.update));
    StepResult out;
    out.raw = uhat;
    auto cut = cutoff(uhat, prob.alpha);
    out.state = std::move(cut.field);
    out.rho = cut.rho;
    out.z = sol.z_new;
    return out;
}

namespace detail {

/// Nonlinear startup step with the three-stage Gauss-Legendre method: the
/// stage states solve du_i = Delta_h u_i + f(u_i) by fixed-point iteration on
/// the frozen reaction term, u^(s+1) from the linear stage solve with sources
/// f(u^(s)), until the successive difference falls below tol in ||.||_h.
inline NodalField startup_step_rk(const NodalField& u_prev, const Problem& prob,
                                  const ButcherTableau& t, double tau, const SpectralOperator& op,
                                  double tol = 1e-12, int max_iter = 100) {
    const int m = t.stages;
    const auto u0_modal = op.to_modal(u_prev.values);
    std::vector<NodalField> stages(m, u_prev);
    StageSolveModal modal;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<std::vector<double>> sources(m);
        for (int i = 0; i < m; ++i) sources[i] = reaction_modal(op, prob, stages[i]);
        modal = solve_stages_modal(op, t, tau, u0_modal, sources);
        double delta = 0.0;
        for (int i = 0; i < m; ++i) {
            NodalField next(op.mesh(), op.from_modal(modal.stage_coeffs[i]));
            NodalField diff(op.mesh());
            for (int j = 0; j < next.size(); ++j) diff.values[j] = next.values[j] - stages[i].values[j];
            delta = std::max(delta, norm_h(diff));
            stages[i] = std::move(next);
        }
        if (delta < tol) return NodalField(op.mesh(), op.from_modal(modal.update_coeffs));
    }
    throw std::runtime_error("startup: fixed-point iteration did not reach " + std::to_string(tol) +
                             " in " + std::to_string(max_iter) +
                             " iterations; reduce the step size");
}

/// Nonlinear SAV startup step: same fixed-point strategy, with the stage
/// fields W(u_i) re-frozen each sweep and the coupled linear (du, dz) system
/// solved exactly in between.
inline std::pair<NodalField, double> startup_step_sav(const NodalField& u_prev, double z_prev,
                                                      const Problem& prob, const ButcherTableau& t,
                                                      double tau, const SpectralOperator& op,
                                                      double tol = 1e-12, int max_iter = 100) {
    const int m = t.stages;
    const auto u0_modal = op.to_modal(u_prev.values);
    std::vector<NodalField> stages(m, u_prev);
    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<std::vector<double>> w_modal(m);
        for (int i = 0; i < m; ++i) w_modal[i] = sav_w_modal(op, prob, stages[i]);
        const auto sol = solve_sav_stages_modal(op, t, tau, u0_modal, z_prev, w_modal);
        double delta = 0.0;
        for (int i = 0; i < m; ++i) {
            std::vector<double> coeff(u0_modal.begin(), u0_modal.end());
            for (int q = 0; q < m; ++q) {
                const double aiq = tau * t.a_at(i, q);
                for (int j = 0; j < op.size(); ++j) coeff[j] += aiq * sol.udot[q][j];
            }
            NodalField next(op.mesh(), op.from_modal(coeff));
            NodalField diff(op.mesh());
            for (int j = 0; j < next.size(); ++j) diff.values[j] = next.values[j] - stages[i].values[j];
            delta = std::max(delta, norm_h(diff));
            stages[i] = std::move(next);
        }
        if (delta < tol)
            return {NodalField(op.mesh(), op.from_modal(sol.update)), sol.z_new};
    }
    throw std::runtime_error("startup: SAV fixed-point iteration did not reach " +
                             std::to_string(tol) + " in " + std::to_string(max_iter) +
                             " iterations; reduce the step size");
}

} // namespace detail

struct SimulationResult {
    std::vector<StepRecord> records; ///< entry 0 is the initial state
    NodalField final_state;
    double final_z = std::numeric_limits<double>::quiet_NaN();
};

/// Run a full simulation: interpolate the initial data, advance the first
/// k-1 levels with the nonlinear three-stage Gauss-Legendre method (clamped),
/// then march the extrapolated scheme to T = nt * tau.
inline SimulationResult simulate(const Problem& prob, SchemeKind kind, const ButcherTableau& tableau,
                                 int nt, double time_horizon, const SpectralOperator& op) {
    if (nt < 1) throw std::invalid_argument("simulate: need at least one time step");
    const double tau = time_horizon / nt;
    const int k = tableau.extrapolation_depth();
    if (nt < k)
        throw std::invalid_argument("simulate: nt = " + std::to_string(nt) +
                                    " is below the extrapolation depth k = " + std::to_string(k));
    const bool sav = kind == SchemeKind::sav_rk_cutoff;
    const bool plain = kind == SchemeKind::rk_plain;
    if (sav && op.mesh()->degree != 1)
        throw std::invalid_argument("simulate: the SAV scheme requires degree r = 1");

    NodalField u = prob.interpolate_u0(op.mesh());
    for (double v : u.values)
        if (std::abs(v) > prob.alpha * (1.0 + 1e-12))
            throw std::invalid_argument("simulate: initial data exceeds the bound alpha");

    SimulationResult result;
    double z = sav ? sav_quantities(prob, u).z : std::numeric_limits<double>::quiet_NaN();

    auto record = [&](int n, const NodalField& state, double rho, double zval, double wall_ms) {
        StepRecord rec;
        rec.n = n;
        rec.t = n * tau;
        rec.rho = rho;
        rec.max_abs = 0.0;
        for (double v : state.values) rec.max_abs = std::max(rec.max_abs, std::abs(v));
        rec.energy = free_energy(prob, state, op.stiffness());
        if (sav) {
            rec.z = zval;
            rec.sav_energy = sav_energy(state, zval, op.stiffness());
        }
        rec.wall_ms = wall_ms;
        result.records.push_back(rec);
    };

    record(0, u, 0.0, z, 0.0);

    History hist(k, z);
    auto push = [&](const NodalField& state) {
        hist.push(state, sav ? detail::sav_w_modal(op, prob, state)
                             : detail::reaction_modal(op, prob, state));
    };
    push(u);

    const ButcherTableau startup_tableau = gauss_legendre(3);
    for (int n = 1; n < k; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        NodalField next(op.mesh());
        double rho = 0.0;
        if (sav) {
            auto [state, z_next] = detail::startup_step_sav(hist.state(1), hist.z(), prob,
                                                            startup_tableau, tau, op);
            auto cut = cutoff(state, prob.alpha);
            next = std::move(cut.field);
            rho = cut.rho;
            z = z_next;
            hist.set_z(z);
        } else {
            NodalField state = detail::startup_step_rk(hist.state(1), prob, startup_tableau, tau, op);
            if (plain) {
                next = std::move(state);
            } else {
                auto cut = cutoff(state, prob.alpha);
                next = std::move(cut.field);
                rho = cut.rho;
            }
        }
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0).count();
        record(n, next, rho, z, ms);
        push(next);
    }

    for (int n = k; n <= nt; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        StepResult step = sav ? step_sav_rk_cutoff(hist, prob, tableau, tau, op)
                              : step_rk_cutoff(hist, prob, tableau, tau, op, plain);
        if (sav) {
            z = step.z;
            hist.set_z(z);
        }
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0).count();
        record(n, step.state, step.rho, z, ms);
        push(step.state);
    }

    result.final_state = hist.state(1);
    result.final_z = z;
    return result;
}

} // namespace acrk
