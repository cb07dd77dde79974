#include "araim/stats.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

namespace araim {

namespace {

// Inputs below this never come from a valid configuration.
constexpr double kSmallestTailProbability = 1e-300;

}  // namespace

Probability q_tail(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("q_tail: non-finite argument");
    }
    return Probability(0.5 * std::erfc(x / std::numbers::sqrt2));
}

Quantile q_tail_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("q_tail_inv: probability must lie in (0, 1)");
    }
    if (p < kSmallestTailProbability) {
        throw DomainError("q_tail_inv: probability below 1e-300");
    }
    double x = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    // One Newton step on Q(x) - p; erfc_inv is already near full precision.
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (density > 0.0) {
        x += (q_tail(x).value() - p) / density;
    }
    return Quantile(x);
}

double erf(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("erf: non-finite argument");
    }
    return std::erf(x);
}

}  // namespace araim
