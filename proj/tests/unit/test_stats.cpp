#include <doctest.h>

#include <cmath>
#include <limits>

#include "araim/stats.hpp"
#include "../oracles.hpp"

using araim::q_tail;
using araim::q_tail_inv;

TEST_CASE("q_tail reference values") {
    // 40-digit reference values.
    CHECK(q_tail(0.0).value() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(q_tail(1.6448536269514722) - 0.0500000000000000531) < 1e-15);
    CHECK(q_tail(8.0).value() == doctest::Approx(6.220960574271784e-16).epsilon(1e-12));
}

TEST_CASE("q_tail agrees with density quadrature") {
    for (double x : {-3.0, -1.0, 0.0, 0.5, 1.6448536269514722, 3.0, 5.0}) {
        CAPTURE(x);
        const double ref = oracle::gauss_tail(x);
        CHECK(std::abs(q_tail(x) - ref) <= 1e-12 * std::max(ref, 1e-3));
    }
}

TEST_CASE("q_tail_inv reference values") {
    CHECK(std::abs(q_tail_inv(0.05) - 1.6448536269514727149) < 1e-12);
    CHECK(std::abs(q_tail_inv(1e-7) - 5.1993375821928169316) < 1e-12);
    CHECK(q_tail_inv(0.5).value() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(q_tail_inv(0.05) - oracle::gauss_tail_inverse(0.05)) < 1e-10);
}

TEST_CASE("q_tail is monotone decreasing and symmetric") {
    double prev = 1.0;
    for (double x = -8.0; x <= 8.0; x += 0.125) {
        const double v = q_tail(x);
        CHECK(v <= prev);
        CHECK(v + q_tail(-x) == doctest::Approx(1.0).epsilon(1e-15));
        prev = v;
    }
}

TEST_CASE("q_tail_inv round trip on a log grid") {
    for (double lp = -15.0; lp <= std::log10(0.999); lp += 0.1) {
        const double p = std::pow(10.0, lp);
        CAPTURE(p);
        const double x = q_tail_inv(p);
        CHECK(std::abs(q_tail(x) - p) <= 1e-12 * p);
    }
}

TEST_CASE("q_tail_inv is monotone") {
    double prev = std::numeric_limits<double>::infinity();
    for (double lp = -300.0; lp < -0.31; lp += 0.5) {
        const double x = q_tail_inv(std::pow(10.0, lp));
        CHECK(x < prev);
        prev = x;
    }
}

TEST_CASE("q_tail_inv domain") {
    CHECK_THROWS_AS(q_tail_inv(0.0), araim::DomainError);
    CHECK_THROWS_AS(q_tail_inv(1.0), araim::DomainError);
    CHECK_THROWS_AS(q_tail_inv(-0.1), araim::DomainError);
    CHECK_THROWS_AS(q_tail_inv(1e-301), araim::DomainError);
    CHECK_THROWS_AS(q_tail_inv(std::nan("")), araim::DomainError);
    CHECK_NOTHROW(q_tail_inv(1e-300));
    CHECK_THROWS_AS(q_tail(std::nan("")), araim::DomainError);
}

TEST_CASE("erf values and identities") {
    CHECK(std::abs(araim::erf(1.0) - 0.84270079294971486934) < 1e-15);
    CHECK(araim::erf(0.0) == 0.0);
    for (double x = -3.0; x <= 3.0; x += 0.25) {
        CAPTURE(x);
        CHECK(araim::erf(-x) == -araim::erf(x));
        CHECK(std::abs(araim::erf(x)) <= 1.0);
        CHECK(std::abs(araim::erf(x) - oracle::erf_series(x)) < 1e-13);
        // erf(x) = 1 - 2 Q(sqrt(2) x)
        CHECK(std::abs(araim::erf(x) - (1.0 - 2.0 * q_tail(std::sqrt(2.0) * x))) < 1e-15);
    }
}

TEST_CASE("probability and quantile wrappers validate") {
    CHECK_THROWS_AS(araim::Probability{1.5}, araim::DomainError);
    CHECK_THROWS_AS(araim::Probability{-1e-18}, araim::DomainError);
    CHECK_THROWS_AS(araim::Quantile{std::numeric_limits<double>::infinity()}, araim::DomainError);
    CHECK(araim::Probability(0.25).value() == 0.25);
}
