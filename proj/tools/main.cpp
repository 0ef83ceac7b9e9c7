// Command-line harness: single runs, reference generation, convergence
// sweeps, and the bundled property suites.
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "acrk/experiments.hpp"
#include "acrk/selfcheck.hpp"

namespace {

struct CommandState {
    acrk::RunConfig cfg;
    std::string config_path;
    std::string axis;
    std::vector<int> levels;
    bool inject_tableau_defect = false;
};

void add_problem_options(CLI::App* cmd, CommandState& st) {
    cmd->add_option("--config", st.config_path,
                    "flat key=value config file; command-line flags override");
    cmd->add_option("--scheme", st.cfg.scheme, "rk | sav | rk_plain");
    cmd->add_option("--tableau", st.cfg.tableau, "gl1 | gl2 | gl3 | radau2 | radau3");
    cmd->add_option("--r", st.cfg.r, "finite element degree");
    cmd->add_option("--nx", st.cfg.nx, "element count M (h = 2/nx)");
    cmd->add_option("--nt", st.cfg.nt, "time step count (tau = T/nt)");
    cmd->add_option("--T", st.cfg.T, "final time");
    cmd->add_option("--eps", st.cfg.eps, "interface parameter");
    cmd->add_option("--alpha", st.cfg.alpha, "maximum bound");
    cmd->add_option("--c0", st.cfg.c0, "SAV shift");
    cmd->add_option("--u0", st.cfg.u0, "initial profile: smooth | printed");
    cmd->add_option("--out", st.cfg.out, "output path (prefix for run outputs)");
    cmd->add_option("--ref", st.cfg.ref, "reference solution file");
    cmd->add_option("--seed", st.cfg.seed, "seed for randomized property suites");
}

// Config-file values apply only where no explicit flag was given.
void apply_config_file(CLI::App* cmd, CommandState& st) {
    if (st.config_path.empty()) return;
    const auto kv = acrk::parse_config_file(st.config_path);
    for (const auto& [key, value] : kv) {
        const std::string flag = "--" + key;
        const CLI::Option* opt = nullptr;
        try {
            opt = cmd->get_option(flag);
        } catch (const CLI::OptionNotFound&) {
            throw std::invalid_argument("config key '" + key + "' has no matching flag " + flag);
        }
        if (opt->count() > 0) continue; // explicit flag wins
        if (key == "scheme") st.cfg.scheme = value;
        else if (key == "tableau") st.cfg.tableau = value;
        else if (key == "r") st.cfg.r = std::stoi(value);
        else if (key == "nx") st.cfg.nx = std::stoi(value);
        else if (key == "nt") st.cfg.nt = std::stoi(value);
        else if (key == "T") st.cfg.T = std::stod(value);
        else if (key == "eps") st.cfg.eps = std::stod(value);
        else if (key == "alpha") st.cfg.alpha = std::stod(value);
        else if (key == "c0") st.cfg.c0 = std::stod(value);
        else if (key == "u0") st.cfg.u0 = value;
        else if (key == "out") st.cfg.out = value;
        else if (key == "ref") st.cfg.ref = value;
        else if (key == "seed") st.cfg.seed = std::stoull(value);
        else if (key == "levels") {
            st.levels.clear();
            std::string token;
            std::istringstream is(value);
            while (std::getline(is, token, ',')) st.levels.push_back(std::stoi(token));
        } else {
            throw std::invalid_argument("config key '" + key + "' is not recognized");
        }
    }
}

int cmd_run(CommandState& st) {
    if (st.cfg.out.empty()) throw std::invalid_argument("run: --out is required");
    acrk::OperatorCache cache;
    const auto sim = acrk::run_simulation(st.cfg, cache);
    double rho_max = 0.0;
    for (const auto& r : sim.records) rho_max = std::max(rho_max, r.rho);
    std::printf("run complete: %d steps, max|u| = %s, rho_max = %s\n", sim.records.back().n,
                acrk::format_double(sim.records.back().max_abs).c_str(),
                acrk::format_double(rho_max).c_str());
    std::printf("wrote %s.steps.csv and %s.final.csv\n", st.cfg.out.c_str(), st.cfg.out.c_str());
    return 0;
}

int cmd_make_reference(CommandState& st) {
    if (st.cfg.out.empty()) throw std::invalid_argument("make-reference: --out is required");
    acrk::OperatorCache cache;
    acrk::make_reference(st.cfg, cache);
    std::printf("wrote reference %s (scheme=%s tableau=%s r=%d M=%d nt=%d T=%s)\n",
                st.cfg.out.c_str(), st.cfg.scheme.c_str(), st.cfg.tableau.c_str(), st.cfg.r,
                st.cfg.nx, st.cfg.nt, acrk::format_double(st.cfg.T).c_str());
    return 0;
}

int cmd_sweep(CommandState& st) {
    if (st.cfg.ref.empty())
        throw std::invalid_argument("sweep: --ref is required (generate one with make-reference)");
    if (st.cfg.out.empty()) throw std::invalid_argument("sweep: --out is required");
    const auto axis = acrk::axis_by_name(st.axis);
    if (st.levels.empty())
        st.levels = axis == acrk::SweepAxis::space ? std::vector<int>{10, 20, 40, 80, 160}
                                                   : std::vector<int>{10, 20, 40, 80, 160, 320};
    const auto ref = acrk::load_reference(st.cfg.ref);
    acrk::OperatorCache cache;
    const auto sweep = acrk::convergence_sweep(axis, st.cfg, st.levels, ref, cache);
    acrk::write_sweep_csv(st.cfg.out, st.cfg, sweep);
    std::printf("%-8s %-14s %-14s %s\n", axis == acrk::SweepAxis::space ? "nx" : "nt",
                axis == acrk::SweepAxis::space ? "h" : "tau", "error", "rate");
    for (size_t i = 0; i < sweep.rows.size(); ++i) {
        const auto& row = sweep.rows[i];
        std::printf("%-8d %-14.6g %-14.6g %s\n", row.level, row.spacing, row.error,
                    i == 0 ? "-" : acrk::format_double(sweep.rates.rates[i - 1]).c_str());
    }
    std::printf("headline rate: %.4f\n", sweep.rates.headline);
    std::printf("wrote %s\n", st.cfg.out.c_str());
    return 0;
}

int cmd_selfcheck(const CommandState& st) {
    const auto results = acrk::selfcheck(st.cfg.seed, st.inject_tableau_defect);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("selfcheck: %s\n", all ? "all suites passed" : "FAILURES detected");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum-bound-preserving Runge-Kutta solvers for the Allen-Cahn equation"};
    app.require_subcommand(1);

    CommandState run_st, ref_st, sweep_st, check_st;
    ref_st.cfg.scheme = "rk";
    ref_st.cfg.tableau = "gl3";
    ref_st.cfg.r = 3;
    ref_st.cfg.nx = 400;
    ref_st.cfg.nt = 1000;
    sweep_st.cfg.tableau = "gl3";
    sweep_st.cfg.r = 3;
    sweep_st.cfg.nx = 400;
    sweep_st.cfg.nt = 1000;

    auto* run_cmd = app.add_subcommand("run", "run one simulation and write its CSV outputs");
    add_problem_options(run_cmd, run_st);

    auto* ref_cmd =
        app.add_subcommand("make-reference", "generate and store a fine reference solution");
    add_problem_options(ref_cmd, ref_st);

    auto* sweep_cmd = app.add_subcommand("sweep", "convergence sweep against a reference");
    sweep_cmd->add_option("axis", sweep_st.axis, "space | time")->required();
    add_problem_options(sweep_cmd, sweep_st);
    sweep_cmd->add_option("--levels", sweep_st.levels, "refinement levels (N_x or N_t)")
        ->delimiter(',');

    auto* check_cmd = app.add_subcommand("selfcheck", "run the bundled property suites");
    check_cmd->add_option("--seed", check_st.cfg.seed, "seed for randomized suites");
    check_cmd->add_flag("--inject-tableau-defect", check_st.inject_tableau_defect,
                        "negative control: perturb a tableau weight so the suite must fail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            apply_config_file(run_cmd, run_st);
            return cmd_run(run_st);
        }
        if (ref_cmd->parsed()) {
            apply_config_file(ref_cmd, ref_st);
            return cmd_make_reference(ref_st);
        }
        if (sweep_cmd->parsed()) {
            apply_config_file(sweep_cmd, sweep_st);
            return cmd_sweep(sweep_st);
        }
        if (check_cmd->parsed()) return cmd_selfcheck(check_st);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
