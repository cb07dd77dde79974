#include "araim/integrity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "araim/error.hpp"

namespace araim {

std::string_view to_string(PfaMode mode) {
    switch (mode) {
        case PfaMode::White:
            return "white";
        case PfaMode::CorrCommon:
            return "common";
        case PfaMode::Cond:
            return "cond";
    }
    return "unknown";
}

PfaMode parse_pfa_mode(std::string_view text) {
    if (text == "white") {
        return PfaMode::White;
    }
    if (text == "common" || text == "corr_common") {
        return PfaMode::CorrCommon;
    }
    if (text == "cond") {
        return PfaMode::Cond;
    }
    throw ConfigError("unknown pfa mode '" + std::string(text) + "'");
}

std::size_t IntegrityConfig::samples_per_window() const {
    if (!(window_seconds > 0.0) || !(sample_dt > 0.0)) {
        throw ConfigError("window and sample interval must be positive");
    }
    const double ratio = window_seconds / sample_dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw ConfigError("window length must be a whole number of samples");
    }
    return static_cast<std::size_t>(rounded);
}

void IntegrityConfig::validate() const {
    if (!(pfa_total_vertical > 0.0 && pfa_total_vertical < 1.0)) {
        throw ConfigError("pfa_total_vertical must lie in (0, 1)");
    }
    if (!(p_md > 0.0 && p_md < 0.5)) {
        throw ConfigError("p_md must lie in (0, 0.5)");
    }
    if (!(val > 0.0)) {
        throw ConfigError("vertical alert limit must be positive");
    }
    samples_per_window();
    if (pfa_mode == PfaMode::Cond) {
        if (!c_corr) {
            throw ConfigError("cond mode requires a correction coefficient");
        }
        if (!(*c_corr >= 1.0) || !std::isfinite(*c_corr)) {
            throw ConfigError("correction coefficient must be >= 1");
        }
    }
}

Probability pfa_per_sample(const IntegrityConfig& cfg) {
    cfg.validate();
    const double white = cfg.pfa_total_vertical / static_cast<double>(cfg.samples_per_window());
    switch (cfg.pfa_mode) {
        case PfaMode::White:
            return Probability(white);
        case PfaMode::CorrCommon:
            return Probability(cfg.pfa_total_vertical);
        case PfaMode::Cond:
            return Probability(std::min(white * *cfg.c_corr, cfg.pfa_total_vertical));
    }
    throw ConfigError("unknown pfa mode");
}

double nominal_bias_term(const SolutionMatrix& s0, const SolutionMatrix& sn, const Eigen::VectorXd& b_nom) {
    return (s0.row(kDown) - sn.row(kDown)).cwiseAbs().dot(b_nom.transpose());
}

double max_bias_term(const SolutionMatrix& sn, const Eigen::VectorXd& b_max) {
    return sn.row(kDown).cwiseAbs().dot(b_max.transpose());
}

double decision_threshold(const Matrix4& dpn, double pfa_sample, std::size_t n_subsolutions, double db_v) {
    if (n_subsolutions == 0) {
        throw DomainError("decision threshold: no sub-solutions");
    }
    const double variance = dpn(kDown, kDown);
    if (!(variance >= 0.0)) {
        throw DomainError("decision threshold: negative separation variance");
    }
    const double per_test = pfa_sample / (2.0 * static_cast<double>(n_subsolutions));
    if (!(per_test > 0.0) || per_test >= 0.5) {
        throw DomainError("degenerate threshold: pfa / 2N must lie in (0, 0.5)");
    }
    return std::sqrt(variance) * q_tail_inv(per_test) + db_v;
}

double missed_detection_bound(const Matrix4& pn_int, double p_md, double ab_v) {
    if (!(p_md > 0.0 && p_md < 0.5)) {
        throw DomainError("missed detection bound: p_md must lie in (0, 0.5)");
    }
    const double variance = pn_int(kDown, kDown);
    if (!(variance >= 0.0)) {
        throw DomainError("missed detection bound: negative variance");
    }
    return std::sqrt(variance) * q_tail_inv(p_md) + ab_v;
}

void vertical_protection_level(IntegrityOutput& out) {
    out.vpl = 0.0;
    for (auto& sub : out.subs) {
        sub.vpl = sub.d_v + sub.a_v;
        out.vpl = std::max(out.vpl, sub.vpl);
    }
}

bool detect(std::span<const double> separations, std::span<const double> thresholds) {
    if (separations.size() != thresholds.size()) {
        throw DomainError("detect: separation and threshold counts differ");
    }
    for (std::size_t i = 0; i < separations.size(); ++i) {
        if (std::abs(separations[i]) > thresholds[i]) {
            return true;
        }
    }
    return false;
}

IntegrityOutput evaluate_integrity(const SolutionSet& set, const ErrorBudget& budget,
                                   const IntegrityConfig& cfg) {
    const double pfa = pfa_per_sample(cfg);
    const std::size_t n = set.subs.size();
    IntegrityOutput out;
    out.subs.reserve(n);
    for (const auto& sub : set.subs) {
        SubsolutionIntegrity si;
        si.excluded = sub.excluded;
        si.db_v = nominal_bias_term(set.s0, sub.sn, budget.b_nom);
        si.d_v = decision_threshold(sub.dpn, pfa, n, si.db_v);
        si.ab_v = max_bias_term(sub.sn, budget.b_max);
        si.a_v = missed_detection_bound(sub.pn_int, cfg.p_md, si.ab_v);
        out.subs.push_back(si);
    }
    vertical_protection_level(out);
    return out;
}

std::vector<double> vertical_separations(const SolutionSet& set, const Eigen::VectorXd& delta_rho) {
    const NavEstimate est0 = solve_position(set.s0, delta_rho);
    std::vector<double> d;
    d.reserve(set.subs.size());
    for (const auto& sub : set.subs) {
        d.push_back(vertical_separation(est0, solve_position(sub.sn, delta_rho)));
    }
    return d;
}

double empirical_quantile(std::span<const double> samples, double fraction) {
    if (samples.empty()) {
        throw DomainError("empirical quantile of an empty sample");
    }
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw DomainError("quantile fraction must lie in (0, 1]");
    }
    const double n = static_cast<double>(samples.size());
    // Rank of the smallest element covering `fraction` of the sample; the
    // slack absorbs representation error in products like 0.07 * 100.
    auto rank = static_cast<std::size_t>(std::ceil(fraction * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, samples.size());
    std::vector<double> sorted(samples.begin(), samples.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
    return sorted[rank - 1];
}

AvailabilityStats availability_stats(std::span<const double> vpl_samples, double val) {
    if (vpl_samples.empty()) {
        throw DomainError("availability statistics need at least one sample");
    }
    const auto available = std::count_if(vpl_samples.begin(), vpl_samples.end(),
                                         [val](double v) { return v <= val; });
    return AvailabilityStats{static_cast<double>(available) / static_cast<double>(vpl_samples.size()),
                             empirical_quantile(vpl_samples, 0.99)};
}

}  // namespace araim
