#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "keyhole/config.hpp"
#include "keyhole/results.hpp"

namespace keyhole {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitDisagreement = 1,  // validate experiment found analytic/Monte Carlo mismatch
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitIo = 4,
};

/// One results row: grid point x alpha x C.
struct SweepRow {
    std::string experiment;
    std::optional<double> h;
    std::optional<double> rho;
    double alpha = 1.0;
    int reflections = 0;
    std::vector<std::optional<double>> analytic;  // analytic_c0..analytic_cC
    std::optional<double> analytic_total;
    std::optional<double> mc_mean;
    std::optional<double> mc_stderr;
    std::optional<int> trials;
    double seconds = 0.0;
};

struct SweepResult {
    int max_reflections = 0;
    std::vector<SweepRow> rows;
    bool numeric_failure = false;
    bool disagreement = false;
    std::vector<std::string> messages;

    CsvTable to_table() const;
};

/// experiment, h, rho, alpha, C, analytic_c0..analytic_c<max_c>, analytic_total,
/// mc_mean, mc_stderr, trials, seconds
std::vector<std::string> csv_header(int max_reflections);

/// Evaluates every grid point. Numeric failures stop the sweep and are
/// flagged; rows computed before the failure are kept.
SweepResult compute_sweep(const ExperimentConfig& config);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

struct RunOutcome {
    SweepResult result;
    int exit_code = kExitOk;
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
};

/// Runs an experiment and writes `<out_dir>/<output>` plus a manifest next to
/// it. The manifest is itself a valid config that reproduces the run.
/// Throws ConfigError for invalid configs and std::ios_base::failure for I/O.
RunOutcome run_experiment(ExperimentConfig config, const RunOptions& options);

}  // namespace keyhole
