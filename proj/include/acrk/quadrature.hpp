#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace acrk {

/// Quadrature rule on the reference interval [0,1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Legendre polynomial P_n and its derivative at x (on [-1,1]), by the
// three-term recurrence.
inline void legendre_eval(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) { p = p0; dp = 0.0; return; }
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    // (1-x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x))
    if (std::abs(x) < 1.0)
        dp = n * (p0 - x * p1) / (1.0 - x * x);
    else
        dp = n * (n + 1.0) / 2.0 * (x > 0 ? 1.0 : (n % 2 == 0 ? -1.0 : 1.0));
}

// Roots of P_n on (-1,1), ascending, by Newton iteration from the
// Chebyshev-like initial guess.
inline std::vector<double> legendre_roots(int n) {
    std::vector<double> roots(n);
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p, dp;
            legendre_eval(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // one polishing step
        double p, dp;
        legendre_eval(n, x, p, dp);
        x -= p / dp;
        roots[i] = x;
    }
    return roots;
}

} // namespace detail

/// n-point Gauss-Legendre rule on [0,1]; exact for polynomials of degree <= 2n-1.
inline QuadratureRule gauss_legendre_rule(int n) {
    if (n < 1 || n > 32)
        throw std::invalid_argument("gauss_legendre_rule: point count " + std::to_string(n) +
                                    " outside supported range [1,32]");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const auto roots = detail::legendre_roots(n);
    for (int i = 0; i < n; ++i) {
        double p, dp;
        detail::legendre_eval(n, roots[i], p, dp);
        rule.nodes[i] = 0.5 * (roots[i] + 1.0);
        rule.weights[i] = 1.0 / ((1.0 - roots[i] * roots[i]) * dp * dp); // 2/((1-x^2)P'^2) / 2
    }
    return rule;
}

/// (r+1)-point Gauss-Lobatto rule on [0,1], r >= 1. Includes both endpoints,
/// has strictly positive weights, and is exact for polynomials of degree <= 2r-1.
inline QuadratureRule gauss_lobatto_rule(int r) {
    if (r < 1 || r > 8)
        throw std::invalid_argument("gauss_lobatto_rule: degree " + std::to_string(r) +
                                    " outside supported range [1,8]");
    const int n = r + 1;
    std::vector<double> x(n);
    x.front() = -1.0;
    x.back() = 1.0;
    if (r >= 2) {
        // Interior nodes are the roots of P_r'; they interlace the roots of P_r,
        // which gives safe Newton brackets.
        const auto pr_roots = detail::legendre_roots(r);
        for (int i = 0; i < r - 1; ++i) {
            double xi = 0.5 * (pr_roots[i] + pr_roots[i + 1]);
            for (int it = 0; it < 100; ++it) {
                double p, dp;
                detail::legendre_eval(r, xi, p, dp);
                // Newton on P_r' with P_r'' from the Legendre ODE:
                // (1-x^2) P_r'' = 2 x P_r' - r(r+1) P_r
                const double ddp = (2.0 * xi * dp - r * (r + 1.0) * p) / (1.0 - xi * xi);
                const double dx = dp / ddp;
                xi -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            x[i + 1] = xi;
        }
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double p, dp;
        detail::legendre_eval(r, x[i], p, dp);
        rule.nodes[i] = 0.5 * (x[i] + 1.0);
        rule.weights[i] = 1.0 / (r * (r + 1.0) * p * p); // 2/(r(r+1)P_r^2) / 2
    }
    // Enforce exact symmetry of the computed rule.
    for (int i = 0; i < n / 2; ++i) {
        const double xm = 0.5 * (rule.nodes[i] + (1.0 - rule.nodes[n - 1 - i]));
        rule.nodes[i] = xm;
        rule.nodes[n - 1 - i] = 1.0 - xm;
        const double wm = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
        rule.weights[i] = wm;
        rule.weights[n - 1 - i] = wm;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
    return rule;
}

} // namespace acrk
