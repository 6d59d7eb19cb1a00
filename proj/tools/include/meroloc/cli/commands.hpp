#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "meroloc/cli/job.hpp"

namespace meroloc::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kFailure = 1, kPartial = 2 };

struct LocateArgs {
    std::string config;
    std::optional<std::string> output;
    Overrides overrides;
    /// Leave wall-clock timing out of the document.
    bool no_timing = false;
};

struct ScanArgs {
    std::string config;
    std::string output;
    Overrides overrides;
};

struct SelftestArgs {
    /// Fault injection hook: forces the rank threshold of every search.
    std::optional<double> rank_tol;
    unsigned workers = 1;
    int random_cases = 20;
};

struct SuiteOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Writes the result document to args.output, the job's output path, or
/// `out`. Returns kSuccess, kPartial or kFailure.
int run_locate(const LocateArgs& args, std::ostream& out, std::ostream& err);

/// One CSV row per root per sweep point:
///   sweep_value,re,im,multiplicity,error,status
/// A sweep point that fails outright gets one row with empty root columns.
int run_scan(const ScanArgs& args, std::ostream& out, std::ostream& err);

std::vector<SuiteOutcome> selftest_suites(const SelftestArgs& args);
int run_selftest(const SelftestArgs& args, std::ostream& out, std::ostream& err);

/// Full command line, including argv[0].
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace meroloc::cli
