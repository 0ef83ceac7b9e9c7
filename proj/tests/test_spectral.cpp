#include <doctest.h>

#include <cmath>
#include <vector>

#include "acrk/eigen.hpp"
#include "acrk/random.hpp"
#include "acrk/spectral.hpp"

using namespace acrk;

namespace {

NodalField random_field(MeshPtr mesh, SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    NodalField f(std::move(mesh));
    for (auto& v : f.values) v = rng.uniform(lo, hi);
    return f;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("neumann nullspace: zero eigenvalue with constant mode") {
    for (int r : {1, 2, 3}) {
        CAPTURE(r);
        auto op = make_spectral_operator(make_mesh(0.0, 2.0, 7, r));
        CHECK(op->eigenvalues().front() == 0.0);
        CHECK(std::abs(op->eigenvalues().front()) < 1e-10 * op->eigenvalues().back());
        const auto phi0 = op->mode(0);
        // constant up to sign, normalized in (.,.)_h: |phi0| = 1/sqrt(|domain|)
        const double expected = 1.0 / std::sqrt(2.0);
        for (double v : phi0.values) CHECK(std::abs(v) == doctest::Approx(expected).epsilon(1e-10));
        for (int j = 1; j < op->size(); ++j) CHECK(op->eigenvalues()[j] > 0.0);
    }
}

TEST_CASE("closed-form spectrum for r=1 and a brute-force dense cross-check") {
    for (int M : {4, 8}) {
        CAPTURE(M);
        const double L = 2.0, h = L / M;
        auto mesh = make_mesh(0.0, L, M, 1);
        auto op = make_spectral_operator(mesh);
        // brute force: dense D^{-1/2} K D^{-1/2} through the Jacobi oracle
        const auto K = assemble_stiffness(*mesh);
        const int n = mesh->num_nodes();
        auto dense = K.to_dense();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dense[static_cast<size_t>(i) * n + j] /=
                    std::sqrt(mesh->lumped_weights[i] * mesh->lumped_weights[j]);
        const auto oracle = jacobi_eigenvalues(dense, n);
        for (int j = 0; j < n; ++j) {
            const double exact = 4.0 / (h * h) * std::pow(std::sin(j * M_PI / (2.0 * M)), 2);
            CHECK(op->eigenvalues()[j] == doctest::Approx(exact).epsilon(1e-11));
            CHECK(oracle[j] == doctest::Approx(exact).epsilon(1e-11));
        }
    }
    // larger case against the closed form only
    const int M = 40;
    auto op = make_spectral_operator(make_mesh(0.0, 2.0, M, 1));
    const double h = 2.0 / M;
    for (int j = 1; j <= M; ++j) {
        const double exact = 4.0 / (h * h) * std::pow(std::sin(j * M_PI / (2.0 * M)), 2);
        CHECK(op->eigenvalues()[j] == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("modes are orthonormal in the lumped inner product") {
    for (int r : {1, 2, 3}) {
        CAPTURE(r);
        auto op = make_spectral_operator(make_mesh(0.0, 2.0, 6, r));
        for (int i = 0; i < op->size(); ++i)
            for (int j = 0; j <= i; ++j) {
                const double dot = discrete_inner(op->mode(i), op->mode(j));
                CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-11);
            }
    }
}

TEST_CASE("operator identity: (-Delta_h phi_j, v)_h = lambda_j (phi_j, v)_h") {
    SplitMix64 rng(3);
    for (int r : {1, 2, 3}) {
        CAPTURE(r);
        auto mesh = make_mesh(0.0, 2.0, 5, r);
        auto op = make_spectral_operator(mesh);
        auto v = random_field(mesh, rng);
        const double scale = op->eigenvalues().back();
        for (int j = 0; j < op->size(); ++j) {
            const auto phi = op->mode(j);
            NodalField lap = op->apply_laplacian(phi);
            const double lhs = -discrete_inner(lap, v);
            const double rhs = op->eigenvalues()[j] * discrete_inner(phi, v);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("modal round trip is the identity") {
    SplitMix64 rng(5);
    for (int r : {1, 3}) {
        auto mesh = make_mesh(-1.0, 1.5, 9, r);
        auto op = make_spectral_operator(mesh);
        auto v = random_field(mesh, rng);
        const auto back = op->from_modal(op->to_modal(v.values));
        for (int i = 0; i < v.size(); ++i)
            CHECK(back[i] == doctest::Approx(v.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("apply_sigma: constants, single modes, contraction") {
    auto mesh = make_mesh(0.0, 2.0, 8, 2);
    auto op = make_spectral_operator(mesh);
    const auto t = gauss_legendre(2);
    const double tau = 0.03;

    NodalField c(mesh);
    for (auto& v : c.values) v = 0.7;
    const auto sc = op->apply_sigma(t, tau, c);
    for (int i = 0; i < sc.size(); ++i) CHECK(sc.values[i] == doctest::Approx(0.7).epsilon(1e-12));

    for (int j : {1, 5, 11}) {
        const auto phi = op->mode(j);
        const double factor = sigma_p_eval(t, tau * op->eigenvalues()[j]).sigma;
        const auto out = op->apply_sigma(t, tau, phi);
        for (int i = 0; i < out.size(); ++i)
            CHECK(out.values[i] == doctest::Approx(factor * phi.values[i]).epsilon(1e-12));
    }

    SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto v = random_field(mesh, rng);
        CHECK(norm_h(op->apply_sigma(t, tau, v)) <= norm_h(v) * (1.0 + 1e-12));
    }
}

TEST_CASE("stage solve: zero sources reduce to the stability function") {
    auto mesh = make_mesh(0.0, 2.0, 6, 3);
    auto op = make_spectral_operator(mesh);
    for (const char* name : {"gl1", "gl3", "radau2"}) {
        CAPTURE(name);
        const auto t = tableau_by_name(name);
        const double tau = 0.02;
        const std::vector<NodalField> zeros(t.stages, NodalField(mesh));
        for (int j : {0, 4, 9}) {
            const auto phi = op->mode(j);
            const auto sol = solve_stages(*op, t, tau, phi, zeros);
            const auto direct = op->apply_sigma(t, tau, phi);
            for (int i = 0; i < phi.size(); ++i)
                CHECK(sol.update.values[i] == doctest::Approx(direct.values[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("stage solve: constants are fixed points") {
    auto mesh = make_mesh(0.0, 2.0, 5, 1);
    auto op = make_spectral_operator(mesh);
    const auto t = gauss_legendre(2);
    NodalField c(mesh);
    for (auto& v : c.values) v = -0.4;
    const std::vector<NodalField> zeros(t.stages, NodalField(mesh));
    const auto sol = solve_stages(*op, t, 0.1, c, zeros);
    for (int i = 0; i < c.size(); ++i) {
        CHECK(sol.update.values[i] == doctest::Approx(-0.4).epsilon(1e-13));
        for (int s = 0; s < t.stages; ++s)
            CHECK(sol.stage_states[s].values[i] == doctest::Approx(-0.4).epsilon(1e-13));
    }
}

TEST_CASE("stage solve: implicit midpoint hand value on a scalar mode") {
    // lambda = 1, tau = 0.1, zero source: modal factor (1 - 0.05)/(1 + 0.05)
    const auto sp = sigma_p_eval(gauss_legendre(1), 0.1);
    CHECK(sp.sigma == doctest::Approx((1.0 - 0.05) / (1.0 + 0.05)).epsilon(1e-15));
}

TEST_CASE("operator stability: p_i bounded, tau*Delta_h*p_i bounded, uniformly") {
    // sup over the discrete spectrum of |p_i(tau*lambda)| and tau*lambda*|p_i|,
    // for tau spanning 1e-4..1e-1 and M spanning 10..160: the measured
    // constants must stay below fixed bounds.
    for (const char* name : {"gl1", "gl2", "gl3", "radau2", "radau3"}) {
        CAPTURE(name);
        const auto t = tableau_by_name(name);
        double sup_p = 0.0, sup_lam_p = 0.0;
        for (int M : {10, 40, 160}) {
            auto op = make_spectral_operator(make_mesh(0.0, 2.0, M, 1));
            for (double tau : {1e-4, 1e-3, 1e-2, 1e-1}) {
                for (double lam : op->eigenvalues()) {
                    const auto sp = sigma_p_eval(t, tau * lam);
                    for (double pi : sp.p) {
                        sup_p = std::max(sup_p, std::abs(pi));
                        sup_lam_p = std::max(sup_lam_p, tau * lam * std::abs(pi));
                    }
                    CHECK(std::abs(sp.sigma) <= 1.0);
                }
            }
        }
        CHECK(sup_p <= 2.0);
        CHECK(sup_lam_p <= 20.0);
    }
}

TEST_CASE("quadrature consistency: (Pi_h Lap v - Delta_h Pi_h v, phi)_h decays at order >= r+1") {
    // Exact sup over ||phi||_{H^1} = 1 (discrete H^1) via the modal basis:
    // sup = sqrt(sum_j q_j^2 / (1 + lambda_j)); random fields stay below it.
    auto v_exact = [](double x) { return std::cos(M_PI * x / 2.0); };
    auto lap_exact = [](double x) {
        return -(M_PI / 2.0) * (M_PI / 2.0) * std::cos(M_PI * x / 2.0);
    };
    SplitMix64 rng(29);
    for (int r : {1, 2, 3}) {
        CAPTURE(r);
        std::vector<double> worst;
        const std::vector<int> levels = {8, 16, 32, 64};
        for (int M : levels) {
            auto mesh = make_mesh(0.0, 2.0, M, r);
            auto op = make_spectral_operator(mesh);
            const auto K = assemble_stiffness(*mesh);
            auto g = interpolate(lap_exact, mesh);                         // Pi_h (Lap v)
            auto lap_vh = op->apply_laplacian(interpolate(v_exact, mesh)); // Delta_h Pi_h v
            NodalField diff(mesh);
            for (int i = 0; i < diff.size(); ++i) diff.values[i] = g.values[i] - lap_vh.values[i];
            const auto q = op->to_modal(diff.values);
            double sup2 = 0.0;
            for (int j = 0; j < op->size(); ++j)
                sup2 += q[j] * q[j] / (1.0 + op->eigenvalues()[j]);
            const double sup = std::sqrt(sup2);
            // spot check: sampled test functions never exceed the exact sup
            for (int trial = 0; trial < 5; ++trial) {
                auto phi = random_field(mesh, rng);
                const double h1 =
                    std::sqrt(discrete_inner(phi, phi) + K.quadratic_form(phi.values));
                CHECK(std::abs(discrete_inner(diff, phi)) <= sup * h1 * (1.0 + 1e-10));
            }
            worst.push_back(sup);
        }
        for (size_t i = 1; i < worst.size(); ++i) {
            const double rate = std::log2(worst[i - 1] / worst[i]);
            CAPTURE(i);
            CHECK(rate >= r + 1 - 0.25);
        }
    }
}

}
