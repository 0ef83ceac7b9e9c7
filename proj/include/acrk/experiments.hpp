#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "acrk/diagnostics.hpp"
#include "acrk/io.hpp"
#include "acrk/problem.hpp"
#include "acrk/spectral.hpp"
#include "acrk/stepper.hpp"

namespace acrk {

/// A single simulation request, CLI- and config-file-facing.
struct RunConfig {
    std::string scheme = "rk";     ///< rk | sav | rk_plain
    std::string tableau = "gl1";   ///< gl1 | gl2 | gl3 | radau2 | radau3
    int r = 1;                     ///< FEM degree
    int nx = 100;                  ///< element count M; h = (b-a)/nx
    int nt = 100;                  ///< time steps; tau = T/nt
    double T = 0.01;
    double eps = 0.1;
    double alpha = 1.0;
    double c0 = 1.0;
    std::string u0 = "smooth";     ///< smooth | printed
    std::string out;               ///< output path prefix
    std::string ref;               ///< reference file (sweeps)
    unsigned long long seed = 1;   ///< property-test subcommands only

    Problem problem() const {
        return allen_cahn_problem(eps, alpha, c0, initial_profile_by_name(u0));
    }
};

inline void validate(const RunConfig& cfg) {
    if (cfg.nx < 1 || cfg.nt < 1) throw std::invalid_argument("nx and nt must be positive");
    if (!(cfg.T > 0.0)) throw std::invalid_argument("T must be positive");
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(cfg.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(cfg.c0 > 0.0)) throw std::invalid_argument("c0 must be positive");
    scheme_by_name(cfg.scheme);
    tableau_by_name(cfg.tableau);
    initial_profile_by_name(cfg.u0);
    if (cfg.scheme == "sav" && cfg.r != 1)
        throw std::invalid_argument("the sav scheme requires r = 1");
}

/// Eigendecompositions are the dominant fixed cost; share them across runs on
/// the same mesh. Immutable operators, safe to hand out by shared_ptr.
class OperatorCache {
  public:
    std::shared_ptr<const SpectralOperator> get(double a, double b, int elements, int degree) {
        const Key key{a, b, elements, degree};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto op = make_spectral_operator(make_mesh(a, b, elements, degree));
        cache_.emplace(key, op);
        return op;
    }

  private:
    using Key = std::tuple<double, double, int, int>;
    std::map<Key, std::shared_ptr<const SpectralOperator>> cache_;
};

inline std::vector<std::pair<std::string, std::string>> run_metadata(const RunConfig& cfg) {
    // One-sided slopes of the initial profile at the domain ends: recorded so a
    // run log documents how compatible u0 is with the Neumann boundary.
    const Problem prob = cfg.problem();
    const double d = 1e-7 * (prob.b - prob.a);
    const double left_slope = (prob.u0(prob.a + d) - prob.u0(prob.a)) / d;
    const double right_slope = (prob.u0(prob.b) - prob.u0(prob.b - d)) / d;
    return {{"version", "run-v1"},
            {"scheme", cfg.scheme},
            {"tableau", cfg.tableau},
            {"u0", cfg.u0},
            {"u0_left_slope", format_double(left_slope)},
            {"u0_right_slope", format_double(right_slope)},
            {"r", std::to_string(cfg.r)},
            {"M", std::to_string(cfg.nx)},
            {"nt", std::to_string(cfg.nt)},
            {"T", format_double(cfg.T)},
            {"eps", format_double(cfg.eps)},
            {"alpha", format_double(cfg.alpha)},
            {"c0", format_double(cfg.c0)}};
}

/// Run one simulation; when cfg.out is nonempty, write <out>.steps.csv and
/// <out>.final.csv. Deterministic given the config (wall_ms column aside).
inline SimulationResult run_simulation(const RunConfig& cfg, OperatorCache& cache) {
    validate(cfg);
    const Problem prob = cfg.problem();
    auto op = cache.get(prob.a, prob.b, cfg.nx, cfg.r);
    auto result = simulate(prob, scheme_by_name(cfg.scheme), tableau_by_name(cfg.tableau), cfg.nt,
                           cfg.T, *op);
    if (!cfg.out.empty()) {
        const auto meta = run_metadata(cfg);
        write_step_records(cfg.out + ".steps.csv", meta, result.records);
        write_final_state(cfg.out + ".final.csv", meta, result.final_state);
    }
    return result;
}

/// Generate and store a reference solution. Defaults reproduce the benchmark
/// protocol: cut-off RK, gl3, M = 400 elements, nt = 1000. For temporal
/// studies of the r = 1 SAV scheme, pass r = 1 so the spatial bias cancels.
inline ReferenceSolution make_reference(const RunConfig& cfg, OperatorCache& cache) {
    RunConfig ref_cfg = cfg;
    if (ref_cfg.out.empty()) throw std::invalid_argument("make_reference: output path required");
    validate(ref_cfg);
    const Problem prob = ref_cfg.problem();
    auto op = cache.get(prob.a, prob.b, ref_cfg.nx, ref_cfg.r);
    auto sim = simulate(prob, scheme_by_name(ref_cfg.scheme), tableau_by_name(ref_cfg.tableau),
                        ref_cfg.nt, ref_cfg.T, *op);
    ReferenceMeta meta;
    meta.scheme = ref_cfg.scheme;
    meta.tableau = ref_cfg.tableau;
    meta.u0 = ref_cfg.u0;
    meta.r = ref_cfg.r;
    meta.elements = ref_cfg.nx;
    meta.nt = ref_cfg.nt;
    meta.a = prob.a;
    meta.b = prob.b;
    meta.T = ref_cfg.T;
    meta.eps = ref_cfg.eps;
    meta.alpha = ref_cfg.alpha;
    meta.c0 = ref_cfg.c0;
    write_reference(ref_cfg.out, meta, sim.final_state);
    return ReferenceSolution{meta, sim.final_state};
}

/// L2 distance between a run's final state and the reference, integrated on
/// the union partition of the two meshes so that both piecewise polynomials
/// enter exactly (no aliasing, no nodal-superconvergence bias).
inline double error_vs_reference(const NodalField& state, const ReferenceSolution& ref) {
    return l2_error_cross(state, ref.field);
}

enum class SweepAxis { space, time };

inline SweepAxis axis_by_name(const std::string& name) {
    if (name == "space") return SweepAxis::space;
    if (name == "time") return SweepAxis::time;
    throw std::invalid_argument("unknown sweep axis '" + name + "' (expected space or time)");
}

struct SweepRow {
    int level = 0;      ///< N_x or N_t
    double spacing = 0; ///< h or tau
    double error = 0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::space;
    std::vector<SweepRow> rows;
    RateTable rates;
};

/// Convergence sweep against a stored reference. Spatial sweeps fix
/// tau = T/nt and vary the element count; temporal sweeps fix the mesh and
/// vary N_t. The reference must be strictly finer in the swept axis.
inline SweepResult convergence_sweep(SweepAxis axis, const RunConfig& base,
                                     const std::vector<int>& levels,
                                     const ReferenceSolution& ref, OperatorCache& cache) {
    if (levels.size() < 2) throw std::invalid_argument("sweep: need at least two levels");
    if (ref.meta.T != base.T || ref.meta.eps != base.eps)
        throw std::invalid_argument("sweep: reference (T, eps) must match the run exactly; "
                                    "regenerate it with make-reference");
    if (ref.meta.alpha != base.alpha || ref.meta.c0 != base.c0 || ref.meta.u0 != base.u0)
        throw std::invalid_argument("sweep: reference problem parameters do not match the run");
    SweepResult result;
    result.axis = axis;
    std::vector<std::pair<double, double>> table;
    for (int level : levels) {
        RunConfig cfg = base;
        cfg.out.clear();
        if (axis == SweepAxis::space) {
            cfg.nx = level;
            if (level >= ref.meta.elements)
                throw std::invalid_argument("sweep: reference mesh (M = " +
                                            std::to_string(ref.meta.elements) +
                                            ") is not finer than level " + std::to_string(level));
        } else {
            cfg.nt = level;
            if (2 * level > ref.meta.nt)
                throw std::invalid_argument("sweep: reference nt = " + std::to_string(ref.meta.nt) +
                                            " is within 2x of level " + std::to_string(level) +
                                            "; use a finer reference");
        }
        const auto sim = run_simulation(cfg, cache);
        SweepRow row;
        row.level = level;
        row.spacing = axis == SweepAxis::space ? (2.0 / level) : (base.T / level);
        row.error = error_vs_reference(sim.final_state, ref);
        result.rows.push_back(row);
        table.emplace_back(static_cast<double>(level), row.error);
    }
    result.rates = error_table(table);
    return result;
}

inline void write_sweep_csv(const std::string& path, const RunConfig& base,
                            const SweepResult& sweep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : run_metadata(base)) out << "# " << k << "=" << v << "\n";
    out << "# axis=" << (sweep.axis == SweepAxis::space ? "space" : "time") << "\n";
    out << "# headline_rate=" << format_double(sweep.rates.headline) << "\n";
    out << (sweep.axis == SweepAxis::space ? "nx,h,error,rate\n" : "nt,tau,error,rate\n");
    for (size_t i = 0; i < sweep.rows.size(); ++i) {
        const auto& row = sweep.rows[i];
        out << row.level << "," << format_double(row.spacing) << "," << format_double(row.error)
            << ",";
        if (i == 0)
            out << "nan";
        else
            out << format_double(sweep.rates.rates[i - 1]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace acrk
