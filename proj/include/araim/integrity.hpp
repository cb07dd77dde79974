#pragma once

// Solution-separation thresholds, vertical protection levels, detection and
// availability statistics.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "araim/navsol.hpp"
#include "araim/stats.hpp"

namespace araim {

/// How the per-window false-alert budget becomes a per-sample probability.
enum class PfaMode {
    White,       ///< budget divided by the samples per window
    CorrCommon,  ///< whole window treated as one sample
    Cond,        ///< white value scaled by a correction coefficient
};

std::string_view to_string(PfaMode mode);
/// Accepts "white", "common"/"corr_common" and "cond".
PfaMode parse_pfa_mode(std::string_view text);

struct IntegrityConfig {
    double pfa_total_vertical = 4e-6;  ///< per window
    double window_seconds = 15.0;
    double sample_dt = 1.0;
    double p_md = 1e-3;
    PfaMode pfa_mode = PfaMode::White;
    std::optional<double> c_corr;  ///< required in Cond mode
    double val = 35.0;             ///< vertical alert limit, meters

    /// Samples per window; throws ConfigError unless window/dt is a positive integer.
    std::size_t samples_per_window() const;
    /// Throws ConfigError on any invariant violation.
    void validate() const;
};

struct SubsolutionIntegrity {
    std::size_t excluded = 0;
    double d_v = 0.0;   ///< decision threshold D_Vn
    double db_v = 0.0;  ///< nominal-bias contribution DB_Vn
    double a_v = 0.0;   ///< missed-detection bound a_Vn
    double ab_v = 0.0;  ///< max-bias contribution AB_Vn
    double vpl = 0.0;   ///< D_Vn + a_Vn
};

struct IntegrityOutput {
    std::vector<SubsolutionIntegrity> subs;
    double vpl = 0.0;  ///< max over sub-solutions
    bool alert = false;
};

/// Per-sample false-alert probability for the configured mode.
Probability pfa_per_sample(const IntegrityConfig& cfg);

/// DB_Vn = sum_i |(S0 - Sn)(Down, i)| b_nom[i].
double nominal_bias_term(const SolutionMatrix& s0, const SolutionMatrix& sn, const Eigen::VectorXd& b_nom);

/// AB_Vn = sum_i |Sn(Down, i)| b_max[i].
double max_bias_term(const SolutionMatrix& sn, const Eigen::VectorXd& b_max);

/// D_Vn = sqrt(dPn(3,3)) Q^-1(pfa / 2N) + DB_Vn.
double decision_threshold(const Matrix4& dpn, double pfa_sample, std::size_t n_subsolutions, double db_v);

/// a_Vn = sqrt(Pn(3,3)) Q^-1(P_MD) + AB_Vn.
double missed_detection_bound(const Matrix4& pn_int, double p_md, double ab_v);

/// Fills each VPL_n = D_Vn + a_Vn and the overall maximum.
void vertical_protection_level(IntegrityOutput& out);

/// True iff some |d_Vn| strictly exceeds its D_Vn.
bool detect(std::span<const double> separations, std::span<const double> thresholds);

/// Thresholds and protection levels for every sub-solution of one epoch.
IntegrityOutput evaluate_integrity(const SolutionSet& set, const ErrorBudget& budget,
                                   const IntegrityConfig& cfg);

/// Separations d_Vn for a pseudorange error vector.
std::vector<double> vertical_separations(const SolutionSet& set, const Eigen::VectorXd& delta_rho);

struct AvailabilityStats {
    double availability = 0.0;  ///< share of samples with VPL <= VAL
    double vpl_at_99pct = 0.0;
};

/// Smallest sample value v such that at least `fraction` of samples are <= v.
double empirical_quantile(std::span<const double> samples, double fraction);

/// Throws DomainError on an empty sample list.
AvailabilityStats availability_stats(std::span<const double> vpl_samples, double val);

}  // namespace araim
