#pragma once

// Experiment driver behind the command-line tool: reads a Config, validates
// every parameter up front, runs one experiment and writes its CSV files.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracelab/config.hpp"
#include "tracelab/report.hpp"

namespace tracelab::harness {

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
};

struct SummaryRow {
    std::string check;
    std::size_t rows = 0;
    std::size_t failed = 0;
    bool hard = true;

    bool passed() const noexcept { return failed == 0; }
};

struct RunResult {
    std::string experiment;
    std::vector<CheckRow> checks;
    std::vector<SummaryRow> summary;
    std::vector<std::string> files;   // written, relative to out_dir
    int exit_status = 0;              // 1 when a hard check failed
};

inline constexpr std::uint64_t default_seed = 20240601;

/// exponents | poisson | truncation | staircase | celliptic | divergence | sweep
const std::vector<std::string>& experiment_names();

/// Throws DomainError for unknown experiments, unknown or out-of-range config
/// keys; ResourceError when a grid exceeds its cap.
RunResult run(const std::string& experiment, const Config& config, const RunOptions& options = {});

/// Check name with a trailing `_j<k>` removed; one CSV per group.
std::string check_group(const std::string& name);

}  // namespace tracelab::harness
