#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace araim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or incomplete configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Full geometry (or the sub-geometry excluding `excluded()`) is rank deficient.
class SingularGeometryError : public Error {
public:
    static constexpr std::size_t kFullSolution = static_cast<std::size_t>(-1);

    explicit SingularGeometryError(const std::string& what, std::size_t excluded = kFullSolution)
        : Error(what), excluded_(excluded) {}
    std::size_t excluded() const noexcept { return excluded_; }
    bool is_subgeometry() const noexcept { return excluded_ != kFullSolution; }

private:
    std::size_t excluded_;
};

/// Quadrature or iteration failed to converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Monte-Carlo survivor population emptied before the requested step.
class DepletionError : public NumericalError {
public:
    explicit DepletionError(std::size_t step)
        : NumericalError("survivor population depleted at step " + std::to_string(step)),
          step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace araim
