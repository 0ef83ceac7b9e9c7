#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrk/mesh.hpp"
#include "acrk/problem.hpp"

namespace acrk {

/// || u' ||^2_{L^2} through the exact stiffness quadratic form.
inline double gradient_energy(const NodalField& u, const SymBandMatrix& stiffness) {
    return stiffness.quadratic_form(u.values);
}

/// Discrete free energy E(u) = 1/2 ||u'||^2 + (F(u), 1)_h: exact gradient
/// term, lumped quadrature for the potential, mirroring the scheme's own
/// bilinear forms.
inline double free_energy(const Problem& prob, const NodalField& u, const SymBandMatrix& stiffness) {
    return 0.5 * gradient_energy(u, stiffness) + sav_e1(prob, u);
}

/// SAV energy 1/2 ||u'||^2 + z^2; nonincreasing along SAV runs.
inline double sav_energy(const NodalField& u, double z, const SymBandMatrix& stiffness) {
    return 0.5 * gradient_energy(u, stiffness) + z * z;
}

/// Convergence-rate table: consecutive resolutions must refine by a factor of
/// two; rate_i = log2(e_i / e_{i+1}); the headline rate is the final pair.
struct RateTable {
    std::vector<double> resolutions;
    std::vector<double> errors;
    std::vector<double> rates;   ///< size errors.size()-1
    double headline = 0.0;
};

inline RateTable error_table(const std::vector<std::pair<double, double>>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("error_table: need at least two rows");
    RateTable t;
    for (const auto& [res, err] : rows) {
        if (!(err > 0.0))
            throw std::invalid_argument("error_table: errors must be positive (got " +
                                        std::to_string(err) + ")");
        t.resolutions.push_back(res);
        t.errors.push_back(err);
    }
    for (size_t i = 1; i < rows.size(); ++i) {
        const double ratio = t.resolutions[i] / t.resolutions[i - 1];
        if (std::abs(ratio - 2.0) > 1e-9)
            throw std::invalid_argument("error_table: resolutions must refine by factor 2");
        t.rates.push_back(std::log2(t.errors[i - 1] / t.errors[i]));
    }
    t.headline = t.rates.back();
    return t;
}

/// Mean of the k finest pairwise rates (the acceptance observable for the
/// temporal tables, where the coarsest rows sit outside the asymptotic range).
inline double mean_finest_rates(const RateTable& t, int k) {
    const int n = static_cast<int>(t.rates.size());
    const int use = std::min(k, n);
    double acc = 0.0;
    for (int i = n - use; i < n; ++i) acc += t.rates[i];
    return acc / use;
}

} // namespace acrk
