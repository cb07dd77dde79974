#include "araim/navsol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "araim/error.hpp"

namespace araim {

namespace {

constexpr double kUnitNormTolerance = 1e-9;
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

double condition_number(const MeasurementMatrix& a) {
    Eigen::JacobiSVD<MeasurementMatrix> svd(a);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return sv(0) / smin;
}

Matrix4 symmetrized(const Matrix4& m) { return 0.5 * (m + m.transpose()); }

struct WeightedSolve {
    SolutionMatrix s;
    Matrix4 p;
};

// Solves the normal equations for the given per-row weights (0 removes a row).
// Returns false when the weighted geometry fails the conditioning gate.
bool weighted_solve(const MeasurementMatrix& h, const Eigen::VectorXd& weights, WeightedSolve& out) {
    const MeasurementMatrix scaled = weights.cwiseSqrt().asDiagonal() * h;
    if (condition_number(scaled) > kMaxConditionNumber) {
        return false;
    }
    const SolutionMatrix htw = h.transpose() * weights.asDiagonal();
    const Matrix4 normal = htw * h;
    const Eigen::LLT<Matrix4> llt(normal);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    out.s = llt.solve(htw);
    out.p = symmetrized(llt.solve(Matrix4::Identity()));
    return true;
}

}  // namespace

GeometryEpoch::GeometryEpoch(std::vector<std::string> sat_ids, std::vector<Eigen::Vector3d> los_ned)
    : sat_ids_(std::move(sat_ids)), los_(std::move(los_ned)) {
    if (sat_ids_.size() != los_.size()) {
        throw DomainError("geometry: satellite id and LOS counts differ");
    }
    if (los_.size() < 4) {
        throw SingularGeometryError("geometry: fewer than 4 satellites");
    }
    h0_.resize(static_cast<Eigen::Index>(los_.size()), 4);
    for (std::size_t i = 0; i < los_.size(); ++i) {
        if (!los_[i].allFinite() || std::abs(los_[i].norm() - 1.0) > kUnitNormTolerance) {
            throw DomainError("geometry: LOS of " + sat_ids_[i] + " is not a unit vector");
        }
        const auto row = static_cast<Eigen::Index>(i);
        h0_.row(row) << los_[i].x(), los_[i].y(), los_[i].z(), 1.0;
    }
    if (condition_number(h0_) > kMaxConditionNumber) {
        throw SingularGeometryError("geometry: measurement matrix is rank deficient");
    }
}

double GeometryEpoch::elevation_deg(std::size_t i) const {
    return std::asin(std::clamp(-los_.at(i).z(), -1.0, 1.0)) * kRadToDeg;
}

void ErrorBudget::validate(std::size_t n_sats) const {
    const auto n = static_cast<Eigen::Index>(n_sats);
    if (sigma_cont.size() != n || sigma_int.size() != n || b_nom.size() != n || b_max.size() != n) {
        throw DomainError("error budget: vector sizes do not match the satellite count");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(sigma_cont(i) > 0.0) || !(sigma_int(i) >= sigma_cont(i)) || !std::isfinite(sigma_int(i))) {
            throw DomainError("error budget: need sigma_int >= sigma_cont > 0");
        }
        if (!(b_nom(i) >= 0.0) || !(b_max(i) >= 0.0)) {
            throw DomainError("error budget: biases must be non-negative");
        }
    }
}

ErrorBudget ErrorBudget::uniform(std::size_t n_sats, double sigma_cont, double sigma_int,
                                 double b_nom, double b_max) {
    const auto n = static_cast<Eigen::Index>(n_sats);
    return ErrorBudget{Eigen::VectorXd::Constant(n, sigma_cont), Eigen::VectorXd::Constant(n, sigma_int),
                       Eigen::VectorXd::Constant(n, b_nom), Eigen::VectorXd::Constant(n, b_max)};
}

FullSolution build_full_solution(const GeometryEpoch& geom, const ErrorBudget& budget) {
    budget.validate(geom.size());
    const Eigen::VectorXd weights = budget.continuity_variance().cwiseInverse();
    WeightedSolve ws;
    if (!weighted_solve(geom.h0(), weights, ws)) {
        throw SingularGeometryError("full solution: weighted geometry is singular");
    }
    return FullSolution{std::move(ws.s), ws.p};
}

SubSolution build_subsolution(const GeometryEpoch& geom, const ErrorBudget& budget, std::size_t n) {
    budget.validate(geom.size());
    if (n >= geom.size()) {
        throw DomainError("sub-solution: exclusion index out of range");
    }
    Eigen::VectorXd weights = budget.continuity_variance().cwiseInverse();
    weights(static_cast<Eigen::Index>(n)) = 0.0;
    WeightedSolve ws;
    if (!weighted_solve(geom.h0(), weights, ws)) {
        throw SingularGeometryError("sub-solution excluding " + geom.sat_ids()[n] + " is singular", n);
    }
    // Eliminated exactly by the zero weight; assign anyway so the invariant
    // does not depend on solver rounding.
    ws.s.col(static_cast<Eigen::Index>(n)).setZero();

    SubSolution sub;
    sub.excluded = n;
    sub.pn_cont = ws.p;
    sub.pn_int = symmetrized(ws.s * budget.integrity_variance().asDiagonal() * ws.s.transpose());
    sub.sn = std::move(ws.s);
    return sub;
}

Matrix4 separation_covariance(const SolutionMatrix& s0, const SolutionMatrix& sn,
                              const ErrorBudget& budget) {
    const SolutionMatrix diff = s0 - sn;
    return symmetrized(diff * budget.continuity_variance().asDiagonal() * diff.transpose());
}

SolutionSet build_solution_set(const GeometryEpoch& geom, const ErrorBudget& budget) {
    FullSolution full = build_full_solution(geom, budget);
    SolutionSet set{std::move(full.s0), full.p0, {}};
    set.subs.reserve(geom.size());
    for (std::size_t n = 0; n < geom.size(); ++n) {
        SubSolution sub = build_subsolution(geom, budget, n);
        sub.dpn = separation_covariance(set.s0, sub.sn, budget);
        set.subs.push_back(std::move(sub));
    }
    return set;
}

NavEstimate solve_position(const SolutionMatrix& s, const Eigen::VectorXd& delta_rho,
                           const Vector4& x_init) {
    if (s.cols() != delta_rho.size()) {
        throw DomainError("solve_position: dimension mismatch");
    }
    const Vector4 dx = s * delta_rho;
    return NavEstimate{dx, x_init + dx};
}

double vertical_separation(const NavEstimate& est0, const NavEstimate& estn) {
    return est0.position(kDown) - estn.position(kDown);
}

}  // namespace araim
