#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrk/lagrange.hpp"
#include "acrk/quadrature.hpp"

namespace acrk {

/// Uniform 1-D mesh carrying a degree-r Lagrange space on Gauss-Lobatto nodes.
/// The lumped weights realize the discrete inner product
///   (f,g)_h = sum_j w_j f(x_j) g(x_j),
/// assembled as composite Gauss-Lobatto quadrature: element-interface nodes
/// carry the sum of the two adjacent endpoint weights, the two domain-boundary
/// nodes carry a single endpoint weight. Then sum_j w_j = b-a exactly.
struct Mesh1D {
    double a = 0.0;
    double b = 1.0;
    int elements = 0; ///< M
    int degree = 1;   ///< r
    double h = 0.0;   ///< (b-a)/M
    QuadratureRule reference;          ///< (r+1)-point Gauss-Lobatto rule on [0,1]
    std::vector<double> global_nodes;  ///< M*r+1 coordinates, ascending
    std::vector<double> lumped_weights;///< M*r+1 positive weights

    int num_nodes() const { return elements * degree + 1; }

    bool same_layout(const Mesh1D& o) const {
        return a == o.a && b == o.b && elements == o.elements && degree == o.degree;
    }
};

using MeshPtr = std::shared_ptr<const Mesh1D>;

inline Mesh1D build_mesh(double a, double b, int elements, int degree) {
    if (!(a < b)) throw std::invalid_argument("build_mesh: requires a < b");
    if (elements < 1) throw std::invalid_argument("build_mesh: requires at least one element");
    Mesh1D mesh;
    mesh.a = a;
    mesh.b = b;
    mesh.elements = elements;
    mesh.degree = degree;
    mesh.h = (b - a) / elements;
    mesh.reference = gauss_lobatto_rule(degree);
    const int n = mesh.num_nodes();
    mesh.global_nodes.assign(n, 0.0);
    mesh.lumped_weights.assign(n, 0.0);
    for (int e = 0; e < elements; ++e) {
        const double x_left = a + e * mesh.h;
        for (int j = 0; j <= degree; ++j) {
            const int g = e * degree + j;
            mesh.global_nodes[g] = x_left + mesh.h * mesh.reference.nodes[j];
            mesh.lumped_weights[g] += mesh.h * mesh.reference.weights[j];
        }
    }
    mesh.global_nodes.front() = a;
    mesh.global_nodes.back() = b;
    return mesh;
}

inline MeshPtr make_mesh(double a, double b, int elements, int degree) {
    return std::make_shared<const Mesh1D>(build_mesh(a, b, elements, degree));
}

/// Values of a finite element function at the global Gauss-Lobatto nodes.
struct NodalField {
    MeshPtr mesh;
    std::vector<double> values;

    NodalField() = default;
    explicit NodalField(MeshPtr m) : mesh(std::move(m)), values(mesh->num_nodes(), 0.0) {}
    NodalField(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
        if (static_cast<int>(values.size()) != mesh->num_nodes())
            throw std::invalid_argument("NodalField: value count does not match mesh node count");
    }

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
};

namespace detail {
inline void require_same_mesh(const NodalField& f, const NodalField& g, const char* who) {
    if (!f.mesh || !g.mesh || !f.mesh->same_layout(*g.mesh))
        throw std::invalid_argument(std::string(who) + ": fields live on different meshes");
}
} // namespace detail

/// (f,g)_h, the lumped-mass inner product. Fixed summation order.
inline double discrete_inner(const NodalField& f, const NodalField& g) {
    detail::require_same_mesh(f, g, "discrete_inner");
    const auto& w = f.mesh->lumped_weights;
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) acc += w[i] * f.values[i] * g.values[i];
    return acc;
}

inline double norm_h(const NodalField& f) { return std::sqrt(discrete_inner(f, f)); }

/// Nodal (Lagrange) interpolation of a pointwise function.
inline NodalField interpolate(const std::function<double(double)>& fn, MeshPtr mesh) {
    NodalField out(std::move(mesh));
    for (int i = 0; i < out.size(); ++i) {
        const double v = fn(out.mesh->global_nodes[i]);
        if (!std::isfinite(v))
            throw std::domain_error("interpolate: function value not finite at x = " +
                                    std::to_string(out.mesh->global_nodes[i]));
        out.values[i] = v;
    }
    return out;
}

/// Evaluate the piecewise polynomial at an arbitrary point of [a,b].
inline double evaluate(const NodalField& f, double x) {
    const Mesh1D& mesh = *f.mesh;
    if (x < mesh.a - 1e-12 * (mesh.b - mesh.a) || x > mesh.b + 1e-12 * (mesh.b - mesh.a))
        throw std::domain_error("evaluate: point outside the mesh domain");
    int e = static_cast<int>((x - mesh.a) / mesh.h);
    e = std::min(std::max(e, 0), mesh.elements - 1);
    const double xi = (x - (mesh.a + e * mesh.h)) / mesh.h;
    const auto basis = lagrange_values(mesh.reference.nodes, xi);
    const int base = e * mesh.degree;
    double acc = 0.0;
    for (int j = 0; j <= mesh.degree; ++j) acc += basis[j] * f.values[base + j];
    return acc;
}

/// Symmetric banded matrix, lower storage by diagonals: entry (i,j) with
/// 0 <= i-j <= halfband lives at diag(i-j)[j].
class SymBandMatrix {
  public:
    SymBandMatrix() = default;
    SymBandMatrix(int n, int halfband) : n_(n), kd_(halfband), data_(static_cast<size_t>(halfband + 1) * n, 0.0) {}

    int size() const { return n_; }
    int halfband() const { return kd_; }

    double& at(int i, int j) { // requires i >= j, i-j <= kd
        return data_[static_cast<size_t>(i - j) * n_ + j];
    }
    double get(int i, int j) const {
        if (i < j) std::swap(i, j);
        if (i - j > kd_) return 0.0;
        return data_[static_cast<size_t>(i - j) * n_ + j];
    }

    /// y = K x
    void multiply(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < n_; ++i) y[i] = data_[i] * x[i]; // d = 0 diagonal
        for (int d = 1; d <= kd_; ++d) {
            const double* band = data_.data() + static_cast<size_t>(d) * n_;
            for (int j = 0; j + d < n_; ++j) {
                y[j + d] += band[j] * x[j];
                y[j] += band[j] * x[j + d];
            }
        }
    }

    /// x^T K x
    double quadratic_form(std::span<const double> x) const {
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) acc += data_[i] * x[i] * x[i];
        for (int d = 1; d <= kd_; ++d) {
            const double* band = data_.data() + static_cast<size_t>(d) * n_;
            double off = 0.0;
            for (int j = 0; j + d < n_; ++j) off += band[j] * x[j] * x[j + d];
            acc += 2.0 * off;
        }
        return acc;
    }

    std::vector<double> to_dense() const {
        std::vector<double> dense(static_cast<size_t>(n_) * n_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (int j = std::max(0, i - kd_); j <= i; ++j) {
                const double v = get(i, j);
                dense[static_cast<size_t>(i) * n_ + j] = v;
                dense[static_cast<size_t>(j) * n_ + i] = v;
            }
        return dense;
    }

  private:
    int n_ = 0;
    int kd_ = 0;
    std::vector<double> data_;
};

/// Stiffness matrix K with v^T K w = (v', w')_{L^2}: element integrands are
/// polynomials of degree <= 2r-2, integrated exactly with an r-point
/// Gauss-Legendre rule. Element rows are closed to zero sum so that constants
/// are exactly in the nullspace.
inline SymBandMatrix assemble_stiffness(const Mesh1D& mesh) {
    const int r = mesh.degree;
    const auto quad = gauss_legendre_rule(std::max(1, r));
    // Reference element matrix: (1/h) * int_0^1 l_i'(s) l_j'(s) ds
    std::vector<double> ref(static_cast<size_t>(r + 1) * (r + 1), 0.0);
    for (size_t q = 0; q < quad.nodes.size(); ++q) {
        const auto dl = lagrange_derivatives(mesh.reference.nodes, quad.nodes[q]);
        for (int i = 0; i <= r; ++i)
            for (int j = 0; j <= i; ++j)
                ref[static_cast<size_t>(i) * (r + 1) + j] += quad.weights[q] * dl[i] * dl[j];
    }
    for (int i = 0; i <= r; ++i) { // mirror and close row sums
        for (int j = i + 1; j <= r; ++j)
            ref[static_cast<size_t>(i) * (r + 1) + j] = ref[static_cast<size_t>(j) * (r + 1) + i];
        double off = 0.0;
        for (int j = 0; j <= r; ++j)
            if (j != i) off += ref[static_cast<size_t>(i) * (r + 1) + j];
        ref[static_cast<size_t>(i) * (r + 1) + i] = -off;
    }
    SymBandMatrix K(mesh.num_nodes(), r);
    for (int e = 0; e < mesh.elements; ++e) {
        const int base = e * r;
        for (int i = 0; i <= r; ++i)
            for (int j = 0; j <= i; ++j)
                K.at(base + i, base + j) += ref[static_cast<size_t>(i) * (r + 1) + j] / mesh.h;
    }
    return K;
}

/// || f ||_{L^2} by per-element Gauss-Legendre quadrature of degree >= 2r+2,
/// so the measurement never limits the observed accuracy.
inline double l2_norm(const NodalField& f) {
    const Mesh1D& mesh = *f.mesh;
    const auto quad = gauss_legendre_rule(mesh.degree + 2);
    std::vector<std::vector<double>> basis(quad.nodes.size());
    for (size_t q = 0; q < quad.nodes.size(); ++q)
        basis[q] = lagrange_values(mesh.reference.nodes, quad.nodes[q]);
    double acc = 0.0;
    for (int e = 0; e < mesh.elements; ++e) {
        const int base = e * mesh.degree;
        for (size_t q = 0; q < quad.nodes.size(); ++q) {
            double v = 0.0;
            for (int j = 0; j <= mesh.degree; ++j) v += basis[q][j] * f.values[base + j];
            acc += mesh.h * quad.weights[q] * v * v;
        }
    }
    return std::sqrt(acc);
}

/// || u - v ||_{L^2} for two fields on the same mesh.
inline double l2_error(const NodalField& u, const NodalField& v) {
    detail::require_same_mesh(u, v, "l2_error");
    NodalField d(u.mesh);
    for (int i = 0; i < u.size(); ++i) d.values[i] = u.values[i] - v.values[i];
    return l2_norm(d);
}

/// || u - fn ||_{L^2} against an exact pointwise function.
inline double l2_error(const NodalField& u, const std::function<double(double)>& fn) {
    const Mesh1D& mesh = *u.mesh;
    const auto quad = gauss_legendre_rule(mesh.degree + 2);
    std::vector<std::vector<double>> basis(quad.nodes.size());
    for (size_t q = 0; q < quad.nodes.size(); ++q)
        basis[q] = lagrange_values(mesh.reference.nodes, quad.nodes[q]);
    double acc = 0.0;
    for (int e = 0; e < mesh.elements; ++e) {
        const int base = e * mesh.degree;
        const double x_left = mesh.a + e * mesh.h;
        for (size_t q = 0; q < quad.nodes.size(); ++q) {
            double v = 0.0;
            for (int j = 0; j <= mesh.degree; ++j) v += basis[q][j] * u.values[base + j];
            const double diff = v - fn(x_left + mesh.h * quad.nodes[q]);
            acc += mesh.h * quad.weights[q] * diff * diff;
        }
    }
    return std::sqrt(acc);
}

/// Evaluate `fine` (typically a reference solution) at the nodes of `coarse`.
/// Exact for nodes shared between the meshes; elsewhere polynomial evaluation
/// within the containing element.
inline NodalField transfer(const NodalField& fine, MeshPtr coarse) {
    if (fine.mesh->a != coarse->a || fine.mesh->b != coarse->b)
        throw std::invalid_argument("transfer: meshes cover different domains");
    NodalField out(std::move(coarse));
    for (int i = 0; i < out.size(); ++i) out.values[i] = evaluate(fine, out.mesh->global_nodes[i]);
    return out;
}

/// || u - v ||_{L^2} for fields on different meshes of the same domain,
/// integrated on the union partition so both piecewise polynomials are
/// evaluated exactly. Comparing at shared nodes alone would instead measure
/// the superconvergent nodal error and overstate the observed order.
inline double l2_error_cross(const NodalField& u, const NodalField& v) {
    if (u.mesh->a != v.mesh->a || u.mesh->b != v.mesh->b)
        throw std::invalid_argument("l2_error_cross: meshes cover different domains");
    if (u.mesh->same_layout(*v.mesh)) return l2_error(u, v);
    const int degree = std::max(u.mesh->degree, v.mesh->degree);
    const auto quad = gauss_legendre_rule(degree + 2);
    // merged breakpoints of both meshes
    std::vector<double> cuts;
    cuts.reserve(u.mesh->elements + v.mesh->elements + 2);
    for (int e = 0; e <= u.mesh->elements; ++e) cuts.push_back(u.mesh->a + e * u.mesh->h);
    for (int e = 1; e < v.mesh->elements; ++e) cuts.push_back(v.mesh->a + e * v.mesh->h);
    std::sort(cuts.begin(), cuts.end());
    const double tiny = 1e-12 * (u.mesh->b - u.mesh->a);
    double acc = 0.0;
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s], hi = cuts[s + 1];
        if (hi - lo <= tiny) continue;
        for (size_t q = 0; q < quad.nodes.size(); ++q) {
            const double x = lo + (hi - lo) * quad.nodes[q];
            const double diff = evaluate(u, x) - evaluate(v, x);
            acc += (hi - lo) * quad.weights[q] * diff * diff;
        }
    }
    return std::sqrt(acc);
}

} // namespace acrk
