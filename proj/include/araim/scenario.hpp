#pragma once

// Geometry ingestion and synthesis, and elevation-dependent error budgets.
//
// Geometry table (comma separated, '#' starts a comment line):
//
//     epoch_id,sat_id,elevation_deg,azimuth_deg
//     0,G01,62.5,41.0
//     ...
//
// Rows of one epoch need not be contiguous; epochs keep the order of their
// first row.
//
// Budget file (key = value, '#' comments):
//
//     mask_angle_deg = 5
//     b_nom_m = 0.1
//     b_max_m = 0.75
//     sigma_cont_m = 5:2.4, 15:1.2, 90:0.75   # elevation_deg:sigma_m pairs
//     sigma_int_m  = 5:4.2, 15:2.2, 90:1.4

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "araim/navsol.hpp"

namespace araim {

struct SkyPoint {
    std::string sat_id;
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
};

/// Receiver-to-satellite unit vector in North-East-Down.
Eigen::Vector3d los_from_sky(double elevation_deg, double azimuth_deg);

/// Throws SingularGeometryError for fewer than 4 or rank-deficient directions.
GeometryEpoch geometry_from_sky(const std::vector<SkyPoint>& sky);

struct EpochRecord {
    std::string epoch_id;
    std::vector<SkyPoint> sky;            ///< satellites at or above the mask
    std::optional<GeometryEpoch> geometry;  ///< empty when unusable
    std::string status = "ok";            ///< reason when unusable

    bool usable() const noexcept { return geometry.has_value(); }
};

/// Parses a geometry table, dropping satellites below `mask_angle_deg`.
/// Throws ParseError with the offending line on malformed rows.
std::vector<EpochRecord> parse_geometry(std::istream& in, double mask_angle_deg = 0.0);
std::vector<EpochRecord> load_geometry(const std::filesystem::path& path, double mask_angle_deg = 0.0);

/// Writes the sky points of each record with fixed 10-decimal angles.
void write_geometry(std::ostream& out, const std::vector<EpochRecord>& records);

/// Azimuth uniform in [0, 360), elevation in [mask, 90] with density cos(el).
std::vector<SkyPoint> synth_sky(std::uint64_t seed, std::size_t n_sats, double mask_angle_deg);
GeometryEpoch synth_constellation(std::uint64_t seed, std::size_t n_sats, double mask_angle_deg);

/// Piecewise-linear sigma(elevation), knots sorted by elevation.
class ElevationTable {
public:
    ElevationTable() = default;
    explicit ElevationTable(std::vector<std::pair<double, double>> knots);

    /// Throws ConfigError outside the tabulated elevation range.
    double at(double elevation_deg) const;
    double min_elevation() const;
    double max_elevation() const;
    const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;
};

struct BudgetConfig {
    ElevationTable sigma_cont;
    ElevationTable sigma_int;
    double b_nom = 0.0;
    double b_max = 0.0;
    double mask_angle_deg = 5.0;

    /// Throws ConfigError if tables miss [mask, 90] or biases are negative.
    void validate() const;
};

BudgetConfig parse_budget(std::istream& in);
BudgetConfig load_budget(const std::filesystem::path& path);
void write_budget(std::ostream& out, const BudgetConfig& cfg);

/// Dual-frequency style fixture: ~0.75 m continuity / ~1.4 m integrity at
/// zenith, inflated towards the horizon. A test fixture, not a standard.
BudgetConfig default_budget_config();

/// Per-satellite sigmas interpolated at each satellite's elevation.
ErrorBudget apply_budget(const BudgetConfig& cfg, const GeometryEpoch& geom);

}  // namespace araim
