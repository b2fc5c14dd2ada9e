#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "projcred/config.hpp"
#include "projcred/mc_engine.hpp"

namespace projcred {

// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_config = 2,
    exit_numeric = 3,
    exit_io = 4,
};

// Both Monte Carlo steps at one sample size.
struct SweepResult {
    int n = 0;
    FrequentistRun freq;
    RealizationQuantiles posterior;
};

SweepResult run_sweep(const ExperimentDesign& design, int n, const RunConfig& config,
                      std::ostream& progress);

// Shortest decimal that parses back to the same double.
std::string format_exact(double v);
// 17 significant digits.
std::string format_17(double v);

std::string qq_csv(const std::vector<QqPoint>& points);
std::string coverage_csv(const std::vector<std::pair<int, std::vector<CoverageRow>>>& rows);

// Each command writes its CSVs under config.out_dir and returns the written
// paths. Progress goes to `progress`.
std::vector<std::string> cmd_qq(const RunConfig& config, std::ostream& progress);
std::vector<std::string> cmd_coverage(const RunConfig& config, std::ostream& progress);
std::vector<std::string> cmd_bounds(const RunConfig& config, std::ostream& progress);

struct SelfcheckOptions {
    std::uint64_t seed = 7;
    int instances = 200;
    bool inject_fault = false;
};

// Fast invariant suite. Prints one line per check to `out`; true if all pass.
bool cmd_selfcheck(const SelfcheckOptions& options, std::ostream& out);

// Full command-line entry point; returns an ExitCode.
int run_cli(int argc, char** argv);

}  // namespace projcred
