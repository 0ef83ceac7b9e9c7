#include <doctest.h>

#include <cmath>

#include "acrk/quadrature.hpp"

using namespace acrk;

namespace {

double integrate_monomial(const QuadratureRule& rule, int q) {
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * std::pow(rule.nodes[i], q);
    return acc;
}

} // namespace

TEST_SUITE("quadrature") {

TEST_CASE("gauss-lobatto r=1 is the trapezoid rule") {
    const auto rule = gauss_lobatto_rule(1);
    REQUIRE(rule.nodes.size() == 2);
    CHECK(rule.nodes[0] == 0.0);
    CHECK(rule.nodes[1] == 1.0);
    CHECK(rule.weights[0] == doctest::Approx(0.5));
    CHECK(rule.weights[1] == doctest::Approx(0.5));
}

TEST_CASE("gauss-lobatto r=2 is Simpson's rule") {
    const auto rule = gauss_lobatto_rule(2);
    REQUIRE(rule.nodes.size() == 3);
    CHECK(rule.nodes[1] == doctest::Approx(0.5));
    CHECK(rule.weights[0] == doctest::Approx(1.0 / 6.0));
    CHECK(rule.weights[1] == doctest::Approx(2.0 / 3.0));
    CHECK(rule.weights[2] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("gauss-lobatto r=3 matches a brute-force moment-system solve") {
    // Symmetric ansatz: nodes {0, 1/2-s, 1/2+s, 1}, weights {w0, w1, w1, w0}.
    // In midpoint coordinates t = x - 1/2, exactness for 1, t^2, t^4 reads
    //   2 w0 + 2 w1            = 1
    //   w0 / 2 + 2 w1 s^2      = 1/12
    //   w0 / 8 + 2 w1 s^4      = 1/80
    // Given s, the first two rows fix w1(s) and w0(s); bisect on the residual
    // of the third row.
    auto w1_of = [](double s) { return (1.0 / 12.0 - 0.25) / (2.0 * s * s - 0.5); };
    auto residual = [&](double s) {
        const double w1 = w1_of(s);
        const double w0 = 0.5 - w1;
        return w0 / 8.0 + 2.0 * w1 * s * s * s * s - 1.0 / 80.0;
    };
    double lo = 0.05, hi = 0.45; // residual changes sign inside (0, 1/2)
    REQUIRE(residual(lo) * residual(hi) < 0.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(lo) * residual(mid) <= 0.0 ? hi : lo) = mid;
    }
    const double s = 0.5 * (lo + hi);
    const double w1 = w1_of(s), w0 = 0.5 - w1;
    CHECK(s == doctest::Approx(std::sqrt(1.0 / 20.0)).epsilon(1e-12));
    CHECK(w0 == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(w1 == doctest::Approx(5.0 / 12.0).epsilon(1e-12));

    const auto rule = gauss_lobatto_rule(3);
    CHECK(rule.nodes[1] == doctest::Approx(0.5 - s).epsilon(1e-12));
    CHECK(rule.nodes[2] == doctest::Approx(0.5 + s).epsilon(1e-12));
    CHECK(rule.nodes[1] == doctest::Approx((1.0 - 1.0 / std::sqrt(5.0)) / 2.0).epsilon(1e-14));
    CHECK(rule.weights[0] == doctest::Approx(w0).epsilon(1e-12));
    CHECK(rule.weights[1] == doctest::Approx(w1).epsilon(1e-12));
}

TEST_CASE("gauss-lobatto invariants for r = 1..8") {
    for (int r = 1; r <= 8; ++r) {
        CAPTURE(r);
        const auto rule = gauss_lobatto_rule(r);
        REQUIRE(rule.nodes.size() == static_cast<size_t>(r + 1));
        CHECK(rule.nodes.front() == 0.0);
        CHECK(rule.nodes.back() == 1.0);
        double wsum = 0.0;
        for (size_t i = 0; i < rule.weights.size(); ++i) {
            CHECK(rule.weights[i] > 0.0);
            wsum += rule.weights[i];
            if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
            // symmetry about 1/2
            CHECK(rule.nodes[i] == doctest::Approx(1.0 - rule.nodes[rule.nodes.size() - 1 - i]).epsilon(1e-15));
            CHECK(rule.weights[i] == doctest::Approx(rule.weights[rule.weights.size() - 1 - i]).epsilon(1e-15));
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        // exact for monomials up to degree 2r-1
        for (int q = 0; q <= 2 * r - 1; ++q) {
            const double exact = 1.0 / (q + 1.0);
            CHECK(integrate_monomial(rule, q) == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("gauss-lobatto rejects unsupported degrees") {
    CHECK_THROWS_AS(gauss_lobatto_rule(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_lobatto_rule(9), std::invalid_argument);
    CHECK_THROWS_AS(gauss_lobatto_rule(-3), std::invalid_argument);
}

TEST_CASE("gauss-legendre rules integrate to machine accuracy") {
    for (int n = 1; n <= 12; ++n) {
        CAPTURE(n);
        const auto rule = gauss_legendre_rule(n);
        for (int q = 0; q <= 2 * n - 1; ++q) {
            const double exact = 1.0 / (q + 1.0);
            CHECK(integrate_monomial(rule, q) == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

}
