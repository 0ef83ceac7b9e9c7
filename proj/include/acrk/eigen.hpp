#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace acrk {

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
/// vectors is row-major n x n with vectors[k*n + i] = component i of eigenvector k.
struct SymmetricEigen {
    std::vector<double> values;
    std::vector<double> vectors;
};

namespace detail {

// Householder reduction of a symmetric matrix (row-major, overwritten) to
// tridiagonal form with accumulated transformations. Classic tred2.
inline void tred2(std::vector<double>& z, int n, std::vector<double>& d, std::vector<double>& e) {
    auto Z = [&](int i, int j) -> double& { return z[static_cast<size_t>(i) * n + j]; };
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(Z(i, k));
            if (scale == 0.0) {
                e[i] = Z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    Z(i, k) /= scale;
                    h += Z(i, k) * Z(i, k);
                }
                double f = Z(i, l);
                double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
                e[i] = scale * g;
                h -= f * g;
                Z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    Z(j, i) = Z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += Z(j, k) * Z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += Z(k, j) * Z(i, k);
                    e[j] = g / h;
                    f += e[j] * Z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = Z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) Z(j, k) -= f * e[k] + g * Z(i, k);
                }
            }
        } else {
            e[i] = Z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += Z(i, k) * Z(k, j);
                for (int k = 0; k <= l; ++k) Z(k, j) -= g * Z(k, i);
            }
        }
        d[i] = Z(i, i);
        Z(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) Z(j, i) = Z(i, j) = 0.0;
    }
}

// QL with implicit shifts on a symmetric tridiagonal matrix; rotations are
// accumulated into z (row-major, must hold the identity or the tred2 output).
inline void tql2(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, int n) {
    auto Z = [&](int i, int j) -> double& { return z[static_cast<size_t>(i) * n + j]; };
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw std::runtime_error("tql2: no convergence after 60 iterations (n = " +
                                             std::to_string(n) + ")");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double bb = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * bb;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - bb;
                    for (int k = 0; k < n; ++k) {
                        f = Z(k, i + 1);
                        Z(k, i + 1) = s * Z(k, i) + c * f;
                        Z(k, i) = c * Z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

inline void sort_and_orient(SymmetricEigen& eig, int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int p, int q) { return eig.values[p] < eig.values[q]; });
    std::vector<double> values(n);
    std::vector<double> vectors(static_cast<size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        values[k] = eig.values[order[k]];
        for (int i = 0; i < n; ++i)
            vectors[static_cast<size_t>(k) * n + i] = eig.vectors[static_cast<size_t>(order[k]) * n + i];
        // Sign convention: the entry of largest magnitude is positive.
        int imax = 0;
        double vmax = 0.0;
        for (int i = 0; i < n; ++i) {
            const double av = std::abs(vectors[static_cast<size_t>(k) * n + i]);
            if (av > vmax) { vmax = av; imax = i; }
        }
        if (vectors[static_cast<size_t>(k) * n + imax] < 0.0)
            for (int i = 0; i < n; ++i) vectors[static_cast<size_t>(k) * n + i] = -vectors[static_cast<size_t>(k) * n + i];
    }
    eig.values = std::move(values);
    eig.vectors = std::move(vectors);
}

} // namespace detail

/// Eigendecomposition of a dense symmetric matrix (row-major). Householder
/// reduction followed by implicit-shift QL; eigenvalues ascending; each
/// eigenvector's largest-magnitude entry is positive.
inline SymmetricEigen symmetric_eigen(std::vector<double> a, int n) {
    if (n < 1) throw std::invalid_argument("symmetric_eigen: empty matrix");
    std::vector<double> d(n, 0.0), e(n, 0.0);
    detail::tred2(a, n, d, e);
    detail::tql2(d, e, a, n);
    SymmetricEigen eig;
    eig.values = std::move(d);
    // tred2/tql2 leave eigenvectors in columns; transpose into row-major rows.
    eig.vectors.assign(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            eig.vectors[static_cast<size_t>(k) * n + i] = a[static_cast<size_t>(i) * n + k];
    detail::sort_and_orient(eig, n);
    return eig;
}

/// Eigendecomposition of a symmetric tridiagonal matrix given by its diagonal
/// and subdiagonal (sub[0] unused). The dense reduction is skipped.
inline SymmetricEigen symmetric_tridiagonal_eigen(std::vector<double> diag, std::vector<double> sub) {
    const int n = static_cast<int>(diag.size());
    if (n < 1) throw std::invalid_argument("symmetric_tridiagonal_eigen: empty matrix");
    std::vector<double> z(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) z[static_cast<size_t>(i) * n + i] = 1.0;
    detail::tql2(diag, sub, z, n);
    SymmetricEigen eig;
    eig.values = std::move(diag);
    eig.vectors.assign(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            eig.vectors[static_cast<size_t>(k) * n + i] = z[static_cast<size_t>(i) * n + k];
    detail::sort_and_orient(eig, n);
    return eig;
}

/// LU factorization with partial pivoting for small dense systems (stage
/// systems are m x m with m <= 3). Row-major.
class SmallLU {
  public:
    SmallLU() = default;
    SmallLU(std::vector<double> a, int n) : n_(n), lu_(std::move(a)), piv_(n) {
        for (int i = 0; i < n_; ++i) piv_[i] = i;
        for (int col = 0; col < n_; ++col) {
            int p = col;
            double best = std::abs(lu_[idx(col, col)]);
            for (int i = col + 1; i < n_; ++i) {
                const double v = std::abs(lu_[idx(i, col)]);
                if (v > best) { best = v; p = i; }
            }
            if (best == 0.0)
                throw std::runtime_error("SmallLU: singular matrix (pivot column " +
                                         std::to_string(col) + ")");
            if (p != col) {
                for (int j = 0; j < n_; ++j) std::swap(lu_[idx(p, j)], lu_[idx(col, j)]);
                std::swap(piv_[p], piv_[col]);
            }
            const double inv = 1.0 / lu_[idx(col, col)];
            for (int i = col + 1; i < n_; ++i) {
                const double m = lu_[idx(i, col)] * inv;
                lu_[idx(i, col)] = m;
                for (int j = col + 1; j < n_; ++j) lu_[idx(i, j)] -= m * lu_[idx(col, j)];
            }
        }
    }

    void solve(std::span<const double> b, std::span<double> x) const {
        for (int i = 0; i < n_; ++i) x[i] = b[piv_[i]];
        for (int i = 1; i < n_; ++i)
            for (int j = 0; j < i; ++j) x[i] -= lu_[idx(i, j)] * x[j];
        for (int i = n_ - 1; i >= 0; --i) {
            for (int j = i + 1; j < n_; ++j) x[i] -= lu_[idx(i, j)] * x[j];
            x[i] /= lu_[idx(i, i)];
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> x(n_);
        solve(b, x);
        return x;
    }

  private:
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * n_ + j; }
    int n_ = 0;
    std::vector<double> lu_;
    std::vector<int> piv_;
};

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
/// Used for the algebraic-stability checks and as a cross-check oracle.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
    auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (A(p, q) == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = A(i, i);
    std::sort(values.begin(), values.end());
    return values;
}

} // namespace acrk
