#pragma once

// Command implementations behind the `araim` executable. Each command writes
// its result files next to the `out` prefix and returns a process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace araim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Parses sample counts such as "5e8" or "1000000" into an exact integer.
std::uint64_t parse_count(const std::string& text);

struct CommonOptions {
    std::filesystem::path out;
    unsigned threads = 0;
    bool timestamp = false;  ///< embed the wall-clock time in the manifest
};

struct PfaOptions {
    CommonOptions common;
    double tau = 100.0;
    double dt = 1.0;
    double q_var = 0.01;
    double pout0 = 1e-6;
    std::size_t kend = 100;
    std::uint64_t samples = 10'000'000;
    std::size_t batch = 10'000'000;
    std::uint64_t seed = 1;
};

struct IntegrityOptions {
    std::optional<std::filesystem::path> budget;  ///< built-in fixture when empty
    std::string pfa_mode = "white";
    std::optional<double> c_corr;
    double p_md = 1e-3;
    double pfa_total = 4e-6;
    double window = 15.0;
    double dt = 1.0;
    double val = 35.0;
};

struct VplOptions {
    CommonOptions common;
    IntegrityOptions integrity;
    std::filesystem::path geometry;
    std::optional<std::filesystem::path> measurements;
};

struct SweepOptions {
    CommonOptions common;
    IntegrityOptions integrity;
    std::uint64_t epochs = 1000;
    std::uint64_t seed = 1;
    std::size_t sats = 18;
    std::optional<double> mask;  ///< budget mask angle when empty
};

struct SimulateOptions {
    CommonOptions common;
    IntegrityOptions integrity;
    std::filesystem::path geometry;
    std::optional<std::string> epoch;
    std::optional<double> tau;  ///< white noise when empty or zero
    std::uint64_t windows = 0;
    std::uint64_t seed = 1;
    std::uint64_t batch = 1'000'000;
    double confidence = 0.99;
    double noise_scale = 1.0;
};

struct ValidateOptions {
    CommonOptions common;
    std::uint64_t samples = 10'000'000;
    std::size_t batch = 10'000'000;
    std::uint64_t seed = 1;
};

/// Errors are reported on `err`; the return value is the exit code.
int run_pfa(const PfaOptions& opts, std::ostream& err);
int run_vpl(const VplOptions& opts, std::ostream& err);
int run_sweep(const SweepOptions& opts, std::ostream& err);
int run_simulate(const SimulateOptions& opts, std::ostream& err);
int run_validate(const ValidateOptions& opts, std::ostream& err);

}  // namespace araim::cli
