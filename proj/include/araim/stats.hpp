#pragma once

// Standard-normal tail function, its inverse, and the error function.

#include <cmath>

#include "araim/error.hpp"

namespace araim {

/// A probability in [0, 1]. Construction validates; reads convert to double.
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw DomainError("probability outside [0, 1]");
        }
    }
    constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

/// A finite position on the standard-normal axis.
class Quantile {
public:
    constexpr Quantile() = default;
    explicit Quantile(double value) : value_(value) {
        if (!std::isfinite(value)) {
            throw DomainError("quantile must be finite");
        }
    }
    constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

/// Q(x): probability that a standard normal variable exceeds x.
Probability q_tail(double x);

/// Q^-1(p): the x with Q(x) = p, for 1e-300 <= p < 1.
Quantile q_tail_inv(double p);

/// Error function, odd, |erf(x)| <= 1.
double erf(double x);

}  // namespace araim
