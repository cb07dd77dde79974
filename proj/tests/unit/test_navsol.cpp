#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "araim/error.hpp"
#include "araim/navsol.hpp"
#include "araim/rng.hpp"
#include "araim/scenario.hpp"
#include "../oracles.hpp"

using namespace araim;

namespace {

const std::vector<std::pair<double, double>> kSix = {{75, 30}, {50, 120}, {40, 220}, {30, 310}, {20, 10}, {15, 160}};

GeometryEpoch six_sat_geometry() {
    std::vector<SkyPoint> sky;
    int i = 1;
    for (auto [el, az] : kSix) {
        sky.push_back({"G0" + std::to_string(i++), el, az});
    }
    return geometry_from_sky(sky);
}

ErrorBudget ramp_budget(std::size_t n) {
    ErrorBudget b = ErrorBudget::uniform(n, 1.0, 2.0, 0.1, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
        b.sigma_cont[i] = 0.8 + 0.1 * i;
        b.sigma_int[i] = 1.5 * b.sigma_cont[i];
    }
    return b;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("six-satellite geometry: S0 H0 = I and Sn H0 = I") {
    const GeometryEpoch geom = six_sat_geometry();
    const ErrorBudget budget = ErrorBudget::uniform(6, 1.0, 1.0);
    const SolutionSet set = build_solution_set(geom, budget);
    CHECK(max_abs(set.s0 * geom.h0() - Matrix4::Identity()) < 1e-12);
    for (const auto& sub : set.subs) {
        CAPTURE(sub.excluded);
        CHECK(max_abs(sub.sn * geom.h0() - Matrix4::Identity()) < 1e-12);
        CHECK(sub.sn.col(sub.excluded).isZero(0.0));
    }
}

TEST_CASE("H0 rows match the hand-built line-of-sight matrix") {
    const GeometryEpoch geom = six_sat_geometry();
    const auto rows = oracle::h_rows(kSix);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int c = 0; c < 4; ++c) {
            CHECK(geom.h0()(i, c) == doctest::Approx(rows[i][c]).epsilon(1e-14));
        }
        CHECK(geom.elevation_deg(i) == doctest::Approx(kSix[i].first).epsilon(1e-12));
    }
}

TEST_CASE("full and sub-solutions agree with the cofactor-inverse oracle") {
    const GeometryEpoch geom = six_sat_geometry();
    const ErrorBudget budget = ramp_budget(6);
    const auto rows = oracle::h_rows(kSix);
    std::vector<double> w(6);
    for (int i = 0; i < 6; ++i) {
        w[i] = 1.0 / (budget.sigma_cont[i] * budget.sigma_cont[i]);
    }
    const SolutionSet set = build_solution_set(geom, budget);
    const auto p0 = oracle::weighted_covariance(rows, w);
    const auto s0 = oracle::solution_columns(rows, w);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            CHECK(set.p0(r, c) == doctest::Approx(p0[r][c]).epsilon(1e-11));
        }
        for (int i = 0; i < 6; ++i) {
            CHECK(std::abs(set.s0(r, i) - s0[i][r]) < 1e-12);
        }
    }
    for (int n = 0; n < 6; ++n) {
        auto wn = w;
        wn[n] = 0.0;
        const auto sn = oracle::solution_columns(rows, wn);
        const auto pn = oracle::weighted_covariance(rows, wn);
        // Integrity covariance: Sn R_int Sn'.
        for (int r = 0; r < 4; ++r) {
            for (int i = 0; i < 6; ++i) {
                CHECK(std::abs(set.subs[n].sn(r, i) - sn[i][r]) < 1e-11);
            }
            for (int c = 0; c < 4; ++c) {
                CHECK(set.subs[n].pn_cont(r, c) == doctest::Approx(pn[r][c]).epsilon(1e-10));
                double pint = 0.0;
                for (int i = 0; i < 6; ++i) {
                    pint += sn[i][r] * budget.sigma_int[i] * budget.sigma_int[i] * sn[i][c];
                }
                CHECK(set.subs[n].pn_int(r, c) == doctest::Approx(pint).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("random geometries: separation covariance equals Pn - P0") {
    std::uint64_t tried = 0;
    for (std::uint64_t seed = 0; tried < 100; ++seed) {
        const std::size_t n = 5 + seed % 11;
        GeometryEpoch geom = synth_constellation(seed, n, 5.0);
        ErrorBudget budget = ErrorBudget::uniform(n, 1.0, 1.5);
        auto engine = rng::make_stream(seed, rng::StreamPurpose::Constellation, 99);
        for (std::size_t i = 0; i < n; ++i) {
            budget.sigma_cont[i] = 0.5 + 1.5 * rng::uniform01(engine);
            budget.sigma_int[i] = 1.6 * budget.sigma_cont[i];
        }
        SolutionSet set;
        try {
            set = build_solution_set(geom, budget);
        } catch (const SingularGeometryError&) {
            continue;  // a sub-geometry without redundancy
        }
        ++tried;
        CAPTURE(seed);
        CHECK(max_abs(set.s0 * geom.h0() - Matrix4::Identity()) < 1e-9);
        for (const auto& sub : set.subs) {
            CHECK(max_abs(sub.sn * geom.h0() - Matrix4::Identity()) < 1e-9);
            CHECK(sub.sn.col(sub.excluded).isZero(0.0));
            const Matrix4 expected = sub.pn_cont - set.p0;
            CHECK(max_abs(sub.dpn - expected) <= 1e-9 * std::max(1.0, max_abs(sub.pn_cont)));
            CHECK(max_abs(sub.dpn - sub.dpn.transpose()) == 0.0);
            Eigen::SelfAdjointEigenSolver<Matrix4> eig(sub.dpn);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * max_abs(sub.pn_cont));
            Eigen::SelfAdjointEigenSolver<Matrix4> eig_p(sub.pn_int);
            CHECK(eig_p.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("fewer than four satellites or coplanar directions are singular") {
    std::vector<SkyPoint> three = {{"A", 30, 0}, {"B", 30, 120}, {"C", 30, 240}};
    CHECK_THROWS_AS(geometry_from_sky(three), SingularGeometryError);
    // All satellites at the same elevation: the Down column is parallel to the clock column.
    std::vector<SkyPoint> ring;
    for (int i = 0; i < 6; ++i) {
        ring.push_back({"R" + std::to_string(i), 30.0, 60.0 * i});
    }
    CHECK_THROWS_AS(geometry_from_sky(ring), SingularGeometryError);
}

TEST_CASE("singular sub-geometry reports the excluded satellite") {
    // Five satellites: removing the only high one leaves a ring at 20 deg.
    std::vector<SkyPoint> sky = {{"Z", 80, 0}, {"A", 20, 0}, {"B", 20, 90}, {"C", 20, 180}, {"D", 20, 270}};
    const GeometryEpoch geom = geometry_from_sky(sky);
    const ErrorBudget budget = ErrorBudget::uniform(5, 1.0, 1.0);
    CHECK_NOTHROW(build_full_solution(geom, budget));
    try {
        build_subsolution(geom, budget, 0);
        FAIL("expected a singular sub-geometry");
    } catch (const SingularGeometryError& e) {
        CHECK(e.is_subgeometry());
        CHECK(e.excluded() == 0);
    }
    CHECK_THROWS_AS(build_solution_set(geom, budget), SingularGeometryError);
}

TEST_CASE("line-of-sight validation") {
    std::vector<Eigen::Vector3d> los(4, Eigen::Vector3d(0, 0, -1));
    los[0] = Eigen::Vector3d(1, 1, 0);
    CHECK_THROWS_AS(GeometryEpoch({"a", "b", "c", "d"}, los), DomainError);
    CHECK_THROWS_AS(GeometryEpoch({"a", "b"}, std::vector<Eigen::Vector3d>(3, Eigen::Vector3d(0, 0, -1))),
                    DomainError);
}

TEST_CASE("budget validation") {
    ErrorBudget b = ErrorBudget::uniform(4, 1.0, 0.5);
    CHECK_THROWS_AS(b.validate(4), DomainError);
    b = ErrorBudget::uniform(4, 1.0, 1.0);
    CHECK_NOTHROW(b.validate(4));
    CHECK_THROWS_AS(b.validate(5), DomainError);
    b.b_nom[1] = -0.1;
    CHECK_THROWS_AS(b.validate(4), DomainError);
}

TEST_CASE("solve_position recovers a position offset and the clock") {
    const GeometryEpoch geom = six_sat_geometry();
    const ErrorBudget budget = ramp_budget(6);
    const SolutionSet set = build_solution_set(geom, budget);
    const Vector4 truth(1.5, -2.0, 3.25, 10.0);
    const Eigen::VectorXd rho = geom.h0() * truth;
    const Vector4 x_init(100.0, 200.0, 300.0, 0.0);
    const NavEstimate est = solve_position(set.s0, rho, x_init);
    CHECK(max_abs(est.delta_x - truth) < 1e-12);
    CHECK(max_abs(est.position - (x_init + truth)) < 1e-12);
    for (const auto& sub : set.subs) {
        CHECK(std::abs(vertical_separation(est, solve_position(sub.sn, rho, x_init))) < 1e-12);
    }
    CHECK_THROWS_AS(solve_position(set.s0, Eigen::VectorXd::Zero(5)), DomainError);
}

TEST_CASE("empirical error covariance matches P0 and dPn") {
    const GeometryEpoch geom = six_sat_geometry();
    const ErrorBudget budget = ramp_budget(6);
    const SolutionSet set = build_solution_set(geom, budget);
    auto engine = rng::make_stream(7, rng::StreamPurpose::FalseAlertSim, 0);
    std::normal_distribution<double> normal;
    const int trials = 100000;
    Matrix4 acc = Matrix4::Zero();
    double sep_acc = 0.0;
    Eigen::VectorXd rho(6);
    for (int t = 0; t < trials; ++t) {
        for (int i = 0; i < 6; ++i) {
            rho[i] = budget.sigma_cont[i] * normal(engine);
        }
        const Vector4 dx = set.s0 * rho;
        acc += dx * dx.transpose();
        const double d = (set.s0.row(kDown) - set.subs[2].sn.row(kDown)).dot(rho);
        sep_acc += d * d;
    }
    acc /= trials;
    for (int i = 0; i < 4; ++i) {
        CAPTURE(i);
        CHECK(acc(i, i) == doctest::Approx(set.p0(i, i)).epsilon(0.05));
    }
    CHECK(sep_acc / trials == doctest::Approx(set.subs[2].dpn(kDown, kDown)).epsilon(0.05));
}

TEST_CASE("exactly determined system: S0 is the inverse of H0") {
    const std::vector<std::pair<double, double>> four = {{70, 10}, {35, 100}, {25, 200}, {15, 300}};
    std::vector<SkyPoint> sky;
    for (auto [el, az] : four) {
        sky.push_back({"X" + std::to_string(sky.size()), el, az});
    }
    const GeometryEpoch geom = geometry_from_sky(sky);
    ErrorBudget budget = ramp_budget(4);
    const FullSolution full = build_full_solution(geom, budget);
    oracle::Mat4 h{};
    const auto rows = oracle::h_rows(four);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            h[r][c] = rows[r][c];
        }
    }
    const oracle::Mat4 hinv = oracle::cofactor_inverse(h);
    Matrix4 hinv_e;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            CHECK(std::abs(full.s0(r, c) - hinv[r][c]) < 1e-11);
            hinv_e(r, c) = hinv[r][c];
        }
    }
    const Matrix4 r0 = budget.continuity_variance().asDiagonal();
    CHECK(max_abs(full.p0 - hinv_e * r0 * hinv_e.transpose()) < 1e-10);
}

TEST_CASE("weight scaling scales P0 and leaves S0 unchanged") {
    const GeometryEpoch geom = six_sat_geometry();
    ErrorBudget budget = ramp_budget(6);
    const FullSolution a = build_full_solution(geom, budget);
    budget.sigma_cont *= 3.0;
    budget.sigma_int *= 3.0;
    const FullSolution b = build_full_solution(geom, budget);
    CHECK(max_abs(b.s0 - a.s0) < 1e-12);
    CHECK(max_abs(b.p0 - 9.0 * a.p0) < 1e-11);
}

TEST_CASE("five satellites: a sub-solution is the zero-padded four-satellite solution") {
    const std::vector<SkyPoint> sky = {{"A", 70, 10}, {"B", 35, 100}, {"C", 25, 200}, {"D", 15, 300}, {"E", 45, 250}};
    const GeometryEpoch geom = geometry_from_sky(sky);
    const ErrorBudget budget = ramp_budget(5);
    for (std::size_t n = 0; n < 5; ++n) {
        std::vector<SkyPoint> rest;
        for (std::size_t i = 0; i < 5; ++i) {
            if (i != n) {
                rest.push_back(sky[i]);
            }
        }
        const FullSolution small = build_full_solution(geometry_from_sky(rest), ErrorBudget::uniform(4, 1.0, 1.0));
        const SubSolution sub = build_subsolution(geom, budget, n);
        for (Eigen::Index i = 0, j = 0; i < 5; ++i) {
            if (static_cast<std::size_t>(i) == n) {
                CHECK(sub.sn.col(i).isZero(0.0));
                continue;
            }
            CHECK((sub.sn.col(i) - small.s0.col(j++)).cwiseAbs().maxCoeff() < 1e-11);
        }
    }
}

TEST_CASE("separation covariance of identical solutions is zero") {
    const GeometryEpoch geom = six_sat_geometry();
    const ErrorBudget budget = ramp_budget(6);
    const FullSolution full = build_full_solution(geom, budget);
    CHECK(separation_covariance(full.s0, full.s0, budget).isZero(0.0));
}

TEST_CASE("vertical separation arithmetic") {
    NavEstimate a;
    NavEstimate b;
    a.position = Vector4(0.0, 0.0, -2.0, 0.0);
    b.position = Vector4(5.0, 1.0, -3.5, 7.0);
    CHECK(vertical_separation(a, b) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(vertical_separation(a, a) == 0.0);
    const NavEstimate zero = solve_position(build_full_solution(six_sat_geometry(), ramp_budget(6)).s0,
                                            Eigen::VectorXd::Zero(6), Vector4(1, 2, 3, 4));
    CHECK(zero.delta_x.isZero(0.0));
    CHECK(zero.position == Vector4(1, 2, 3, 4));
}
