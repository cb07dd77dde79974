#include <boost/math/distributions/binomial.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>

#include "araim/error.hpp"
#include "araim/gmpfa.hpp"
#include "araim/parallel.hpp"
#include "araim/rng.hpp"

namespace araim {

namespace {

struct AlertModel {
    Eigen::MatrixXd separation_rows;  // row n: Down row of S0 - Sn
    Eigen::VectorXd thresholds;
    Eigen::VectorXd stationary_sigma;
    Eigen::VectorXd driving_sigma;
    double a = 0.0;
    std::size_t samples_per_window = 0;
};

std::uint64_t run_window_batch(const AlertModel& model, std::uint64_t windows, std::uint64_t seed,
                               std::uint64_t batch_index) {
    auto engine = rng::make_stream(seed, rng::StreamPurpose::FalseAlertSim, batch_index);
    boost::random::normal_distribution<double> normal(0.0, 1.0);

    const Eigen::Index n_sats = model.stationary_sigma.size();
    Eigen::VectorXd x(n_sats);
    Eigen::VectorXd d(model.separation_rows.rows());
    std::uint64_t alerts = 0;

    for (std::uint64_t w = 0; w < windows; ++w) {
        for (Eigen::Index i = 0; i < n_sats; ++i) {
            x(i) = model.stationary_sigma(i) * normal(engine);
        }
        for (std::size_t k = 0; k < model.samples_per_window; ++k) {
            if (k > 0) {
                for (Eigen::Index i = 0; i < n_sats; ++i) {
                    x(i) = model.a * x(i) + model.driving_sigma(i) * normal(engine);
                }
            }
            d.noalias() = model.separation_rows * x;
            if ((d.array().abs() > model.thresholds.array()).any()) {
                ++alerts;
                break;
            }
        }
    }
    return alerts;
}

}  // namespace

FalseAlertReport simulate_false_alerts(const GeometryEpoch& geom, const ErrorBudget& budget,
                                       const std::optional<GmParams>& gm, const IntegrityConfig& cfg,
                                       std::uint64_t n_windows, std::uint64_t seed,
                                       const SimulationOptions& opts) {
    if (n_windows == 0) {
        throw DomainError("simulate_false_alerts: need at least one window");
    }
    if (!(opts.noise_scale >= 0.0) || !(opts.confidence > 0.0 && opts.confidence < 1.0) ||
        opts.windows_per_batch == 0) {
        throw DomainError("simulate_false_alerts: invalid simulation options");
    }

    const SolutionSet set = build_solution_set(geom, budget);
    const IntegrityOutput integrity = evaluate_integrity(set, budget, cfg);

    AlertModel model;
    const auto n_subs = static_cast<Eigen::Index>(set.subs.size());
    model.separation_rows.resize(n_subs, static_cast<Eigen::Index>(geom.size()));
    model.thresholds.resize(n_subs);
    for (Eigen::Index n = 0; n < n_subs; ++n) {
        const auto& sub = set.subs[static_cast<std::size_t>(n)];
        model.separation_rows.row(n) = set.s0.row(kDown) - sub.sn.row(kDown);
        model.thresholds(n) = integrity.subs[static_cast<std::size_t>(n)].d_v;
    }
    model.a = gm ? gm->a : 0.0;
    model.stationary_sigma = opts.noise_scale * budget.sigma_cont;
    model.driving_sigma = std::sqrt(1.0 - model.a * model.a) * model.stationary_sigma;
    model.samples_per_window = cfg.samples_per_window();

    const std::uint64_t per_batch = opts.windows_per_batch;
    const std::uint64_t n_batches = (n_windows + per_batch - 1) / per_batch;
    std::vector<std::uint64_t> alerts(n_batches, 0);
    parallel_for_batches(n_batches, opts.threads, [&](std::size_t b) {
        const std::uint64_t begin = b * per_batch;
        alerts[b] = run_window_batch(model, std::min(per_batch, n_windows - begin), seed, b);
    });

    FalseAlertReport report;
    report.windows = n_windows;
    for (auto c : alerts) {
        report.alert_windows += c;
    }
    report.samples_per_window = model.samples_per_window;
    report.rate = static_cast<double>(report.alert_windows) / static_cast<double>(n_windows);
    report.confidence = opts.confidence;
    report.pfa_total = cfg.pfa_total_vertical;
    report.pfa_sample = pfa_per_sample(cfg);

    const double alpha = 0.5 * (1.0 - opts.confidence);
    using boost::math::binomial_distribution;
    const auto trials = static_cast<double>(n_windows);
    const auto successes = static_cast<double>(report.alert_windows);
    report.ci_low = report.alert_windows == 0
                        ? 0.0
                        : binomial_distribution<>::find_lower_bound_on_p(trials, successes, alpha);
    report.ci_high = report.alert_windows == n_windows
                         ? 1.0
                         : binomial_distribution<>::find_upper_bound_on_p(trials, successes, alpha);
    report.half_width = 0.5 * (report.ci_high - report.ci_low);
    return report;
}

}  // namespace araim
