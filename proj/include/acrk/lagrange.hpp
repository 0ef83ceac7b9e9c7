#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace acrk {

/// Values of the Lagrange basis {l_j} on the node set `nodes`, evaluated at x.
/// Product formula; robust at and away from the nodes. O(n^2).
inline std::vector<double> lagrange_values(std::span<const double> nodes, double x) {
    const int n = static_cast<int>(nodes.size());
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) {
        double v = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            v *= (x - nodes[k]) / (nodes[j] - nodes[k]);
        }
        out[j] = v;
    }
    return out;
}

/// Derivatives l_j'(x) on the node set `nodes`.
/// l_j'(x) = sum_{i!=j} 1/(x_j-x_i) * prod_{k!=j,i} (x-x_k)/(x_j-x_k). O(n^3), n <= 9 here.
inline std::vector<double> lagrange_derivatives(std::span<const double> nodes, double x) {
    const int n = static_cast<int>(nodes.size());
    std::vector<double> out(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            double term = 1.0 / (nodes[j] - nodes[i]);
            for (int k = 0; k < n; ++k) {
                if (k == j || k == i) continue;
                term *= (x - nodes[k]) / (nodes[j] - nodes[k]);
            }
            acc += term;
        }
        out[j] = acc;
    }
    return out;
}

/// Coefficients of the degree-(k-1) Lagrange extrapolation through the k most
/// recent time levels t_{n-1},...,t_{n-k}, evaluated at t_{n-1} + theta*tau.
/// Entry j (0-based) multiplies the value at t_{n-1-j}. The coefficients
/// reproduce polynomials of degree <= k-1 exactly and sum to 1.
inline std::vector<double> extrapolation_coeffs(int k, double theta) {
    if (k < 1) throw std::invalid_argument("extrapolation_coeffs: depth must be >= 1");
    // In units of tau, the history nodes sit at 0, -1, ..., -(k-1).
    std::vector<double> nodes(k);
    for (int j = 0; j < k; ++j) nodes[j] = -static_cast<double>(j);
    return lagrange_values(nodes, theta);
}

} // namespace acrk
