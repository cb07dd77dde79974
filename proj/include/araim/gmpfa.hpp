#pragma once

// Conditional false-alert probability under first-order Gauss-Markov noise.
//
// A statistic x_k follows x_{k+1} = a x_k + w_k, w_k ~ N(0, Q), started from
// its stationary law N(0, Px), Px = Q / (1 - a^2). The interval S_q = [-q, q]
// is sized so that P(x_0 outside S_q) = P_OUT,0. P_OUT,k is the probability of
// leaving S_q at step k given that x stayed inside at every earlier step.
//
// Two routes compute it:
//  * conditional_pdf_k1 / pout1_analytic: closed-form density of x_1 given
//    x_0 in S_q, integrated numerically (step 1 only);
//  * mc_conditional_pout: survivor Monte-Carlo, any number of steps.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "araim/integrity.hpp"
#include "araim/navsol.hpp"
#include "araim/stats.hpp"

namespace araim {

struct GmParams {
    double tau = 0.0;    ///< time constant, seconds (0 for the white limit)
    double dt = 1.0;     ///< sampling interval, seconds
    double a = 0.0;      ///< exp(-dt / tau), in [0, 1)
    double q_var = 0.0;  ///< driving-noise variance Q
    double p_x = 0.0;    ///< stationary variance Q / (1 - a^2)

    /// Standard deviation of the driving noise.
    double driving_sigma() const;
};

/// Throws DomainError unless tau, dt and q_var are positive.
GmParams gm_params(double tau, double dt, double q_var);

/// Parameters from the AR coefficient directly; a = 0 yields white noise.
GmParams gm_from_coefficient(double a, double q_var, double dt = 1.0);

/// q = sqrt(Px) Q^-1(P_OUT,0 / 2), the half-width of S_q.
double quantile_bound(double p_out_0, double p_x);

/// Density of x_1 given x_0 in [-q, q].
double conditional_pdf_k1(double x1, const GmParams& gm, double q, double p_out_0);

/// P_OUT,1 = 1 - integral of conditional_pdf_k1 over [-q, q], to 1e-10 absolute.
Probability pout1_analytic(const GmParams& gm, double q, double p_out_0);

struct PfaStep {
    std::size_t k = 0;
    double p_out = 0.0;       ///< M_OUT / M_q at this step
    double moving_avg = 0.0;  ///< mean of p_out over steps 1..k
    double ratio = 0.0;       ///< p_out_0 / moving_avg
    std::uint64_t survivors = 0;  ///< inside S_q after this step
    std::uint64_t events = 0;     ///< exits at this step (M_OUT)
    bool low_confidence = false;  ///< fewer than 10 exits observed
};

struct PfaSeries {
    double p_out_0 = 0.0;
    double q = 0.0;
    GmParams gm;
    std::uint64_t total_samples = 0;
    std::uint64_t initial_survivors = 0;  ///< samples drawn inside S_q at k = 0
    std::uint64_t seed = 0;
    std::size_t batch_size = 0;
    std::vector<PfaStep> steps;  ///< steps[k - 1] holds step k

    std::size_t k_end() const noexcept { return steps.size(); }
    const PfaStep& step(std::size_t k) const;
    /// Realised exit fraction of the initial draw.
    double initial_exit_fraction() const;
};

struct McOptions {
    std::size_t batch_size = 10'000'000;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

inline constexpr std::uint64_t kMinMcSamples = 1'000'000;
inline constexpr std::uint64_t kLowConfidenceEvents = 10;

/// Survivor Monte-Carlo estimate of P_OUT,k for k = 1..k_end.
/// Bit-identical for a given (seed, batch_size, m_total) whatever the thread count.
/// Throws DepletionError when the survivor population empties.
PfaSeries mc_conditional_pout(const GmParams& gm, double p_out_0, std::size_t k_end,
                              std::uint64_t m_total, std::uint64_t seed, const McOptions& opts = {});

/// c_corr = p_out_0 / moving_avg[k_end].
double correction_coefficient(const PfaSeries& series, std::size_t k_end);

struct SimulationOptions {
    std::uint64_t windows_per_batch = 1'000'000;
    unsigned threads = 0;
    /// Scales the simulated noise; thresholds still come from the budget.
    double noise_scale = 1.0;
    double confidence = 0.99;
};

struct FalseAlertReport {
    std::uint64_t windows = 0;
    std::uint64_t alert_windows = 0;
    std::size_t samples_per_window = 0;
    double rate = 0.0;
    double ci_low = 0.0;   ///< Clopper-Pearson bounds at `confidence`
    double ci_high = 0.0;
    double half_width = 0.0;
    double confidence = 0.0;
    double pfa_total = 0.0;
    double pfa_sample = 0.0;
};

/// Windowed false-alert rate with fault-free noise on every pseudorange.
///
/// Each window starts from the stationary law. Satellite i carries noise of
/// stationary standard deviation sigma_cont[i]; with `gm` present every
/// satellite follows an independent Gauss-Markov process with coefficient
/// gm->a, otherwise samples are white. A window counts once if any sample in
/// it raises an alert.
FalseAlertReport simulate_false_alerts(const GeometryEpoch& geom, const ErrorBudget& budget,
                                       const std::optional<GmParams>& gm, const IntegrityConfig& cfg,
                                       std::uint64_t n_windows, std::uint64_t seed,
                                       const SimulationOptions& opts = {});

}  // namespace araim
