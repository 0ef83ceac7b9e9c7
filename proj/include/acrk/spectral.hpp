#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "acrk/eigen.hpp"
#include "acrk/mesh.hpp"
#include "acrk/tableau.hpp"

namespace acrk {

/// Spectral decomposition of the discrete Laplacian -Delta_h, defined by
/// (-Delta_h v, w)_h = (v', w'). The generalized problem K phi = lambda D phi
/// (D = diag of lumped weights) is symmetrized with D^{1/2}, so the modes are
/// orthonormal in (.,.)_h by construction. All implicit stage systems reduce
/// to m x m solves per mode in this basis.
class SpectralOperator {
  public:
    SpectralOperator(MeshPtr mesh, const SymBandMatrix& stiffness)
        : mesh_(std::move(mesh)), stiffness_(stiffness) {
        const int n = mesh_->num_nodes();
        const auto& w = mesh_->lumped_weights;
        std::vector<double> sqw(n), inv_sqw(n);
        for (int i = 0; i < n; ++i) {
            if (!(w[i] > 0.0)) throw std::invalid_argument("SpectralOperator: weights must be positive");
            sqw[i] = std::sqrt(w[i]);
            inv_sqw[i] = 1.0 / sqw[i];
        }
        SymmetricEigen eig;
        if (mesh_->degree == 1) {
            // B = D^{-1/2} K D^{-1/2} stays tridiagonal for r = 1.
            std::vector<double> diag(n), sub(n, 0.0);
            for (int i = 0; i < n; ++i) diag[i] = stiffness.get(i, i) / w[i];
            for (int i = 1; i < n; ++i) sub[i] = stiffness.get(i, i - 1) * inv_sqw[i] * inv_sqw[i - 1];
            eig = symmetric_tridiagonal_eigen(std::move(diag), std::move(sub));
        } else {
            std::vector<double> dense = stiffness.to_dense();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dense[static_cast<size_t>(i) * n + j] *= inv_sqw[i] * inv_sqw[j];
            eig = symmetric_eigen(std::move(dense), n);
        }
        eigenvalues_ = std::move(eig.values);
        // Neumann nullspace: the bottom eigenvalue is exactly zero; snap the
        // numerical residue so constants are reproduced by sigma(0) = 1.
        if (std::abs(eigenvalues_.front()) < 1e-8 * std::max(1.0, eigenvalues_.back()))
            eigenvalues_.front() = 0.0;
        // phi_k = D^{-1/2} y_k; also keep w-scaled rows for forward transforms.
        modes_ = std::move(eig.vectors);
        modes_w_.resize(modes_.size());
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) {
                double& m = modes_[static_cast<size_t>(k) * n + i];
                m *= inv_sqw[i];
                modes_w_[static_cast<size_t>(k) * n + i] = m * w[i];
            }
    }

    const MeshPtr& mesh() const { return mesh_; }
    const SymBandMatrix& stiffness() const { return stiffness_; }
    int size() const { return static_cast<int>(eigenvalues_.size()); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    /// Eigenvector j as a nodal field.
    NodalField mode(int j) const {
        NodalField f(mesh_);
        const int n = size();
        for (int i = 0; i < n; ++i) f.values[i] = modes_[static_cast<size_t>(j) * n + i];
        return f;
    }

    /// Modal coefficients c_j = (v, phi_j)_h.
    std::vector<double> to_modal(std::span<const double> nodal) const {
        const int n = size();
        std::vector<double> c(n);
        for (int k = 0; k < n; ++k) {
            const double* row = modes_w_.data() + static_cast<size_t>(k) * n;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += row[i] * nodal[i];
            c[k] = acc;
        }
        return c;
    }

    /// Nodal values v_i = sum_j c_j phi_j(x_i); fixed summation order.
    std::vector<double> from_modal(std::span<const double> c) const {
        const int n = size();
        std::vector<double> v(n, 0.0);
        for (int k = 0; k < n; ++k) {
            const double ck = c[k];
            if (ck == 0.0) continue;
            const double* row = modes_.data() + static_cast<size_t>(k) * n;
            for (int i = 0; i < n; ++i) v[i] += ck * row[i];
        }
        return v;
    }

    /// Delta_h v (modal multiply by -lambda_j).
    NodalField apply_laplacian(const NodalField& v) const {
        auto c = to_modal(v.values);
        for (int j = 0; j < size(); ++j) c[j] *= -eigenvalues_[j];
        return NodalField(mesh_, from_modal(c));
    }

    /// sigma(-tau Delta_h) v = sum_j sigma(tau lambda_j) (v, phi_j)_h phi_j.
    NodalField apply_sigma(const ButcherTableau& t, double tau, const NodalField& v) const {
        if (!(tau > 0.0)) throw std::invalid_argument("apply_sigma: tau must be positive");
        auto c = to_modal(v.values);
        for (int j = 0; j < size(); ++j) c[j] *= sigma_p_eval(t, tau * eigenvalues_[j]).sigma;
        return NodalField(mesh_, from_modal(c));
    }

    /// p_i(-tau Delta_h) v for one stage index i.
    NodalField apply_p(const ButcherTableau& t, int stage, double tau, const NodalField& v) const {
        auto c = to_modal(v.values);
        for (int j = 0; j < size(); ++j) c[j] *= sigma_p_eval(t, tau * eigenvalues_[j]).p[stage];
        return NodalField(mesh_, from_modal(c));
    }

  private:
    MeshPtr mesh_;
    SymBandMatrix stiffness_;
    std::vector<double> eigenvalues_;
    std::vector<double> modes_;   ///< row k = phi_k at the nodes
    std::vector<double> modes_w_; ///< row k = w .* phi_k  (forward transform)
};

inline std::shared_ptr<const SpectralOperator> make_spectral_operator(MeshPtr mesh) {
    auto K = assemble_stiffness(*mesh);
    return std::make_shared<const SpectralOperator>(std::move(mesh), K);
}

/// One implicit RK step of the linear stage system
///   du_i = Delta_h u_i + g_i,  u_i = u0 + tau sum_j a_ij du_j,
///   uhat = u0 + tau sum_i b_i du_i,
/// with frozen source fields g_i, solved mode by mode. Outputs modal
/// coefficients; reconstruct only what the caller needs.
struct StageSolveModal {
    std::vector<std::vector<double>> stage_coeffs; ///< m vectors: u_i modal
    std::vector<std::vector<double>> stage_rates;  ///< m vectors: du_i modal
    std::vector<double> update_coeffs;             ///< uhat modal
};

inline StageSolveModal solve_stages_modal(const SpectralOperator& op, const ButcherTableau& t,
                                          double tau, std::span<const double> u0_modal,
                                          const std::vector<std::vector<double>>& source_modal) {
    const int m = t.stages;
    const int n = op.size();
    if (static_cast<int>(source_modal.size()) != m)
        throw std::invalid_argument("solve_stages_modal: need one source field per stage");
    StageSolveModal out;
    out.stage_coeffs.assign(m, std::vector<double>(n));
    out.stage_rates.assign(m, std::vector<double>(n));
    out.update_coeffs.assign(n, 0.0);
    std::vector<double> mat(static_cast<size_t>(m) * m), rhs(m), x(m);
    for (int j = 0; j < n; ++j) {
        const double lam = op.eigenvalues()[j];
        for (int i = 0; i < m; ++i) {
            for (int q = 0; q < m; ++q)
                mat[static_cast<size_t>(i) * m + q] = (i == q ? 1.0 : 0.0) + tau * lam * t.a_at(i, q);
            double s = 0.0;
            for (int q = 0; q < m; ++q) s += t.a_at(i, q) * source_modal[q][j];
            rhs[i] = u0_modal[j] + tau * s;
        }
        SmallLU lu(mat, m);
        lu.solve(rhs, x);
        double acc = u0_modal[j];
        for (int i = 0; i < m; ++i) {
            const double rate = -lam * x[i] + source_modal[i][j];
            out.stage_coeffs[i][j] = x[i];
            out.stage_rates[i][j] = rate;
            acc += tau * t.b[i] * rate;
        }
        out.update_coeffs[j] = acc;
    }
    return out;
}

/// Nodal-space wrapper: previous state and per-stage sources in, stage states,
/// stage rates and the update in.
struct StageSolution {
    std::vector<NodalField> stage_states;
    std::vector<NodalField> stage_rates;
    NodalField update;
};

inline StageSolution solve_stages(const SpectralOperator& op, const ButcherTableau& t, double tau,
                                  const NodalField& previous, const std::vector<NodalField>& sources) {
    const int m = t.stages;
    std::vector<std::vector<double>> source_modal(m);
    for (int i = 0; i < m; ++i) source_modal[i] = op.to_modal(sources[i].values);
    const auto modal = solve_stages_modal(op, t, tau, op.to_modal(previous.values), source_modal);
    StageSolution out;
    out.update = NodalField(previous.mesh, op.from_modal(modal.update_coeffs));
    for (int i = 0; i < m; ++i) {
        out.stage_states.emplace_back(previous.mesh, op.from_modal(modal.stage_coeffs[i]));
        out.stage_rates.emplace_back(previous.mesh, op.from_modal(modal.stage_rates[i]));
    }
    return out;
}

} // namespace acrk
