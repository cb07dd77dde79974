#pragma once

// Snapshot weighted-least-squares navigation: the all-in-view solution,
// single-exclusion sub-solutions and their covariance/separation matrices.
//
// States are ordered North, East, Down, clock; the clock state is carried in
// meters. Row i of the measurement matrix is [u_N, u_E, u_D, 1] where u is the
// unit line of sight from the receiver to satellite i, so that a position
// offset dx produces a pseudorange error u . dx_pos + dx_clk.

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace araim {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;
using MeasurementMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4>;
using SolutionMatrix = Eigen::Matrix<double, 4, Eigen::Dynamic>;

inline constexpr Eigen::Index kDown = 2;

/// Conditioning limit above which a geometry is declared singular.
inline constexpr double kMaxConditionNumber = 1e12;

/// Satellites in view at one epoch.
class GeometryEpoch {
public:
    /// Throws DomainError on non-unit LOS vectors or size mismatch, and
    /// SingularGeometryError when H0 is rank deficient or N < 4.
    GeometryEpoch(std::vector<std::string> sat_ids, std::vector<Eigen::Vector3d> los_ned);

    std::size_t size() const noexcept { return sat_ids_.size(); }
    const std::vector<std::string>& sat_ids() const noexcept { return sat_ids_; }
    const std::vector<Eigen::Vector3d>& los_ned() const noexcept { return los_; }
    const MeasurementMatrix& h0() const noexcept { return h0_; }

    /// Elevation of satellite i in degrees, recovered from its LOS.
    double elevation_deg(std::size_t i) const;

private:
    std::vector<std::string> sat_ids_;
    std::vector<Eigen::Vector3d> los_;
    MeasurementMatrix h0_;
};

/// Per-satellite error model, meters.
struct ErrorBudget {
    Eigen::VectorXd sigma_cont;  ///< non-integrity-assured 1-sigma
    Eigen::VectorXd sigma_int;   ///< integrity-assured 1-sigma
    Eigen::VectorXd b_nom;       ///< nominal bias
    Eigen::VectorXd b_max;       ///< maximum bias

    /// Throws DomainError unless sigma_int >= sigma_cont > 0 and biases >= 0.
    void validate(std::size_t n_sats) const;

    Eigen::VectorXd continuity_variance() const { return sigma_cont.array().square(); }
    Eigen::VectorXd integrity_variance() const { return sigma_int.array().square(); }

    /// Same sigma/bias for every satellite.
    static ErrorBudget uniform(std::size_t n_sats, double sigma_cont, double sigma_int,
                               double b_nom = 0.0, double b_max = 0.0);
};

struct FullSolution {
    SolutionMatrix s0;
    Matrix4 p0;
};

struct SubSolution {
    std::size_t excluded = 0;
    SolutionMatrix sn;
    Matrix4 pn_cont;
    Matrix4 pn_int;
    Matrix4 dpn;
};

struct SolutionSet {
    SolutionMatrix s0;
    Matrix4 p0;
    std::vector<SubSolution> subs;
};

struct NavEstimate {
    Vector4 delta_x;
    Vector4 position;  ///< x_init + delta_x
};

/// S0 = (H'WH)^-1 H'W and P0 = (H'WH)^-1 with W = diag(1/sigma_cont^2).
FullSolution build_full_solution(const GeometryEpoch& geom, const ErrorBudget& budget);

/// Solution with measurement n removed; column n of Sn is exactly zero.
/// Throws SingularGeometryError carrying n when the remaining rows are rank deficient.
SubSolution build_subsolution(const GeometryEpoch& geom, const ErrorBudget& budget, std::size_t n);

/// dPn = (S0 - Sn) R0 (S0 - Sn)' with R0 = diag(sigma_cont^2).
Matrix4 separation_covariance(const SolutionMatrix& s0, const SolutionMatrix& sn,
                              const ErrorBudget& budget);

/// Full solution plus all N single-exclusion sub-solutions.
SolutionSet build_solution_set(const GeometryEpoch& geom, const ErrorBudget& budget);

NavEstimate solve_position(const SolutionMatrix& s, const Eigen::VectorXd& delta_rho,
                           const Vector4& x_init = Vector4::Zero());

/// Down-component difference est0 - estn, meters.
double vertical_separation(const NavEstimate& est0, const NavEstimate& estn);

}  // namespace araim
