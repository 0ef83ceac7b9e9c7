#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrk/mesh.hpp"
#include "acrk/stepper.hpp"

namespace acrk {

/// Full-precision decimal formatting (17 significant digits round-trips a double).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Reference-solution metadata; (T, eps) must match a requesting run exactly.
struct ReferenceMeta {
    std::string version = "ref-v1";
    std::string scheme = "rk";
    std::string tableau = "gl3";
    std::string u0 = "smooth";
    int r = 3;
    int elements = 400;
    int nt = 1000;
    double a = 0.0;
    double b = 2.0;
    double T = 0.0;
    double eps = 0.0;
    double alpha = 1.0;
    double c0 = 1.0;
};

struct ReferenceSolution {
    ReferenceMeta meta;
    NodalField field;
};

inline void write_reference(const std::string& path, const ReferenceMeta& meta,
                            const NodalField& field) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# version=" << meta.version << "\n";
    out << "# scheme=" << meta.scheme << "\n";
    out << "# tableau=" << meta.tableau << "\n";
    out << "# u0=" << meta.u0 << "\n";
    out << "# r=" << meta.r << "\n";
    out << "# M=" << meta.elements << "\n";
    out << "# nt=" << meta.nt << "\n";
    out << "# a=" << format_double(meta.a) << "\n";
    out << "# b=" << format_double(meta.b) << "\n";
    out << "# T=" << format_double(meta.T) << "\n";
    out << "# eps=" << format_double(meta.eps) << "\n";
    out << "# alpha=" << format_double(meta.alpha) << "\n";
    out << "# c0=" << format_double(meta.c0) << "\n";
    out << "x,u\n";
    for (int i = 0; i < field.size(); ++i)
        out << format_double(field.mesh->global_nodes[i]) << "," << format_double(field.values[i])
            << "\n";
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline ReferenceSolution load_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reference file '" + path + "'");
    ReferenceMeta meta;
    meta.version.clear();
    std::map<std::string, std::string> kv;
    std::string line;
    std::vector<double> values;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            kv[key] = line.substr(eq + 1);
            continue;
        }
        if (!header_seen) { // column header row
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed reference row: '" + line + "'");
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("reference file missing metadata key '" + std::string(key) + "'");
        return it->second;
    };
    meta.version = need("version");
    if (meta.version != "ref-v1")
        throw std::runtime_error("unsupported reference version '" + meta.version + "'");
    meta.scheme = need("scheme");
    meta.tableau = need("tableau");
    meta.u0 = need("u0");
    meta.r = std::stoi(need("r"));
    meta.elements = std::stoi(need("M"));
    meta.nt = std::stoi(need("nt"));
    meta.a = std::stod(need("a"));
    meta.b = std::stod(need("b"));
    meta.T = std::stod(need("T"));
    meta.eps = std::stod(need("eps"));
    meta.alpha = std::stod(need("alpha"));
    meta.c0 = std::stod(need("c0"));
    auto mesh = make_mesh(meta.a, meta.b, meta.elements, meta.r);
    if (static_cast<int>(values.size()) != mesh->num_nodes())
        throw std::runtime_error("reference file has " + std::to_string(values.size()) +
                                 " values, expected " + std::to_string(mesh->num_nodes()));
    return ReferenceSolution{meta, NodalField(mesh, std::move(values))};
}

/// Per-step diagnostics CSV: a '#' metadata preamble, one header row, then
/// one row per time level. The wall_ms column is timing only and is excluded
/// from any determinism comparison.
inline void write_step_records(const std::string& path,
                               const std::vector<std::pair<std::string, std::string>>& meta,
                               const std::vector<StepRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "n,t,max_abs_u,rho,energy,sav_energy,z,wall_ms\n";
    for (const auto& r : records)
        out << r.n << "," << format_double(r.t) << "," << format_double(r.max_abs) << ","
            << format_double(r.rho) << "," << format_double(r.energy) << ","
            << format_double(r.sav_energy) << "," << format_double(r.z) << ","
            << format_double(r.wall_ms) << "\n";
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline void write_final_state(const std::string& path,
                              const std::vector<std::pair<std::string, std::string>>& meta,
                              const NodalField& field) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "x,u\n";
    for (int i = 0; i < field.size(); ++i)
        out << format_double(field.mesh->global_nodes[i]) << "," << format_double(field.values[i])
            << "\n";
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Flat key=value configuration text; '#' starts a comment line.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value, got '" + line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

} // namespace acrk
