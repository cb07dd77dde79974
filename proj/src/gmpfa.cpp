#include "araim/gmpfa.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "araim/error.hpp"
#include "araim/parallel.hpp"
#include "araim/rng.hpp"

namespace araim {

namespace {

double normal_pdf(double x, double variance) {
    return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

void check_gm(const GmParams& gm) {
    if (!(gm.a >= 0.0 && gm.a < 1.0) || !(gm.q_var > 0.0) || !(gm.p_x > 0.0)) {
        throw DomainError("invalid Gauss-Markov parameters");
    }
}

void check_open_probability(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(std::string(what) + " must lie in (0, 1)");
    }
}

// Per-batch outcome of the survivor simulation.
struct BatchCounts {
    std::uint64_t inside = 0;
    std::vector<std::uint64_t> events;
};

BatchCounts run_survivor_batch(const GmParams& gm, double q, std::size_t k_end, std::uint64_t samples,
                               std::uint64_t seed, std::uint64_t batch_index) {
    auto engine = rng::make_stream(seed, rng::StreamPurpose::ConditionalPout, batch_index);
    boost::random::normal_distribution<double> normal(0.0, 1.0);

    const double sigma_x = std::sqrt(gm.p_x);
    const double sigma_w = gm.driving_sigma();
    const double a = gm.a;

    // Steps 2-3: draw from the stationary law and keep the points inside S_q.
    std::vector<double> x;
    x.reserve(samples);
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double v = sigma_x * normal(engine);
        if (std::abs(v) <= q) {
            x.push_back(v);
        }
    }

    BatchCounts out;
    out.inside = x.size();
    out.events.assign(k_end, 0);

    // Steps 4-6: propagate survivors, drop the ones that left S_q. A leaving
    // point is overwritten by the last live one, which is then propagated in
    // its new slot, so every survivor advances exactly once per step.
    std::size_t live = x.size();
    for (std::size_t k = 0; k < k_end && live > 0; ++k) {
        std::uint64_t exits = 0;
        std::size_t i = 0;
        while (i < live) {
            const double v = a * x[i] + sigma_w * normal(engine);
            if (std::abs(v) > q) {
                ++exits;
                x[i] = x[--live];
            } else {
                x[i] = v;
                ++i;
            }
        }
        out.events[k] = exits;
    }
    return out;
}

}  // namespace

double GmParams::driving_sigma() const { return std::sqrt(q_var); }

GmParams gm_params(double tau, double dt, double q_var) {
    if (!(tau > 0.0) || !(dt > 0.0) || !(q_var > 0.0) || !std::isfinite(tau) || !std::isfinite(q_var)) {
        throw DomainError("gm_params: tau, dt and q_var must be positive and finite");
    }
    GmParams gm;
    gm.tau = tau;
    gm.dt = dt;
    gm.a = std::exp(-dt / tau);
    gm.q_var = q_var;
    // 1 - a^2 = -expm1(-2 dt / tau) keeps precision as dt / tau -> 0.
    gm.p_x = q_var / -std::expm1(-2.0 * dt / tau);
    check_gm(gm);
    return gm;
}

GmParams gm_from_coefficient(double a, double q_var, double dt) {
    if (!(a >= 0.0 && a < 1.0) || !(q_var > 0.0) || !(dt > 0.0)) {
        throw DomainError("gm_from_coefficient: need 0 <= a < 1, q_var > 0, dt > 0");
    }
    GmParams gm;
    gm.dt = dt;
    gm.tau = a > 0.0 ? -dt / std::log(a) : 0.0;
    gm.a = a;
    gm.q_var = q_var;
    gm.p_x = q_var / (1.0 - a * a);
    return gm;
}

double quantile_bound(double p_out_0, double p_x) {
    check_open_probability(p_out_0, "p_out_0");
    if (!(p_x > 0.0)) {
        throw DomainError("quantile_bound: variance must be positive");
    }
    return std::sqrt(p_x) * q_tail_inv(0.5 * p_out_0);
}

double conditional_pdf_k1(double x1, const GmParams& gm, double q, double p_out_0) {
    check_gm(gm);
    check_open_probability(p_out_0, "p_out_0");
    if (!(q > 0.0)) {
        throw DomainError("conditional_pdf_k1: q must be positive");
    }
    if (gm.a == 0.0) {
        // x_1 = w_0 carries no memory of the conditioning.
        return normal_pdf(x1, gm.q_var);
    }

    const double scaled_var = gm.a * gm.a * gm.p_x;  // variance of a x_0
    const double total_var = scaled_var + gm.q_var;  // equals Px
    const double denom = std::sqrt(scaled_var * gm.q_var * total_var);
    const double u = std::abs(x1);  // the density is even

    // q_y Px -+ a^2 Px u with q_y = a q, factored as a Px (q -+ a u). The
    // difference is formed as (q - u) + (1 - a) u so it stays accurate when
    // a is close to 1 and u is close to q.
    const double scale = gm.a * total_var / denom * std::numbers::sqrt2 * 0.5;
    const double lower = scale * ((q - u) + (1.0 - gm.a) * u);
    const double upper = scale * (q + gm.a * u);
    // erf(lower) + erf(upper), written to avoid cancellation for large |x1|.
    const double bracket = std::erfc(-lower) - std::erfc(upper);

    const double c_norm = 1.0 / (1.0 - p_out_0);
    return 0.5 * c_norm * normal_pdf(u, total_var) * bracket;
}

Probability pout1_analytic(const GmParams& gm, double q, double p_out_0) {
    check_gm(gm);
    check_open_probability(p_out_0, "p_out_0");
    if (gm.a == 0.0) {
        // White limit: x_1 ~ N(0, Q) and Q = Px, so nothing changes.
        return Probability(2.0 * q_tail(q / std::sqrt(gm.q_var)).value());
    }

    auto density = [&](double x) { return conditional_pdf_k1(x, gm, q, p_out_0); };

    // By symmetry P_OUT,1 = 2 * integral over (q, inf). The density changes
    // fastest within a few posterior deviations of q_y = a q, just below q.
    const double scaled_var = gm.a * gm.a * gm.p_x;
    const double posterior_sd = std::sqrt(scaled_var * gm.q_var / (scaled_var + gm.q_var));
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    constexpr unsigned kMaxDepth = 20;
    constexpr double kRelTol = 1e-13;
    double total = 0.0;
    double error = 0.0;
    double lo = q;
    for (double width : {1.0, 2.0, 4.0, 12.0}) {
        const double hi = q + width * posterior_sd;
        double err = 0.0;
        total += Quad::integrate(density, lo, hi, kMaxDepth, kRelTol, &err);
        error += err;
        lo = hi;
    }
    double err_far = 0.0;
    total += Quad::integrate(density, lo, std::numeric_limits<double>::infinity(), kMaxDepth, kRelTol, &err_far);
    error += err_far;
    if (2.0 * error > 1e-10 || !std::isfinite(total)) {
        throw NumericalError("pout1_analytic: quadrature did not converge");
    }
    return Probability(std::clamp(2.0 * total, 0.0, 1.0));
}

const PfaStep& PfaSeries::step(std::size_t k) const {
    if (k == 0 || k > steps.size()) {
        throw DomainError("PfaSeries: step index out of range");
    }
    return steps[k - 1];
}

double PfaSeries::initial_exit_fraction() const {
    if (total_samples == 0) {
        return 0.0;
    }
    return static_cast<double>(total_samples - initial_survivors) / static_cast<double>(total_samples);
}

PfaSeries mc_conditional_pout(const GmParams& gm, double p_out_0, std::size_t k_end, std::uint64_t m_total,
                              std::uint64_t seed, const McOptions& opts) {
    check_gm(gm);
    if (!(p_out_0 > 0.0 && p_out_0 < 0.5)) {
        throw DomainError("mc_conditional_pout: p_out_0 must lie in (0, 0.5)");
    }
    if (k_end < 1) {
        throw DomainError("mc_conditional_pout: k_end must be at least 1");
    }
    if (m_total < kMinMcSamples) {
        throw DomainError("mc_conditional_pout: at least 1e6 samples required");
    }
    if (opts.batch_size == 0) {
        throw DomainError("mc_conditional_pout: batch size must be positive");
    }

    const double q = quantile_bound(p_out_0, gm.p_x);
    const std::uint64_t batch = opts.batch_size;
    const std::uint64_t n_batches = (m_total + batch - 1) / batch;

    std::vector<BatchCounts> counts(n_batches);
    parallel_for_batches(n_batches, opts.threads, [&](std::size_t b) {
        const std::uint64_t begin = b * batch;
        const std::uint64_t size = std::min(batch, m_total - begin);
        counts[b] = run_survivor_batch(gm, q, k_end, size, seed, b);
    });

    PfaSeries series;
    series.p_out_0 = p_out_0;
    series.q = q;
    series.gm = gm;
    series.total_samples = m_total;
    series.seed = seed;
    series.batch_size = opts.batch_size;

    std::vector<std::uint64_t> events(k_end, 0);
    for (const auto& c : counts) {
        series.initial_survivors += c.inside;
        for (std::size_t k = 0; k < k_end; ++k) {
            events[k] += c.events[k];
        }
    }
    if (series.initial_survivors == 0) {
        throw DepletionError(0);
    }

    series.steps.reserve(k_end);
    std::uint64_t survivors = series.initial_survivors;
    double running_sum = 0.0;
    for (std::size_t k = 1; k <= k_end; ++k) {
        PfaStep s;
        s.k = k;
        s.events = events[k - 1];
        s.p_out = static_cast<double>(s.events) / static_cast<double>(survivors);
        survivors -= s.events;
        s.survivors = survivors;
        running_sum += s.p_out;
        s.moving_avg = running_sum / static_cast<double>(k);
        s.ratio = s.moving_avg > 0.0 ? p_out_0 / s.moving_avg : std::numeric_limits<double>::infinity();
        s.low_confidence = s.events < kLowConfidenceEvents;
        series.steps.push_back(s);
        if (survivors == 0) {
            throw DepletionError(k);
        }
    }
    return series;
}

double correction_coefficient(const PfaSeries& series, std::size_t k_end) {
    const PfaStep& s = series.step(k_end);
    if (!(s.moving_avg > 0.0)) {
        throw DepletionError(k_end);
    }
    return series.p_out_0 / s.moving_avg;
}

}  // namespace araim
