#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlkpp/error.hpp"
#include "nlkpp/io.hpp"
#include "nlkpp/scenario.hpp"
#include "nlkpp/speed.hpp"

namespace nlkpp {

/// Process exit codes. `violated` marks a check whose outcome was a definite
/// failure (a residual of the wrong sign, an ordering violation, a failed verdict).
enum ExitCode : int {
    exit_ok = 0,
    exit_runtime_error = 1,
    exit_assumption = 2,
    exit_not_certified = 3,
    exit_violated = 4,
};

int exit_code_for(ErrorKind kind);

struct CommandResult {
    int exit_code = exit_ok;
    /// Contents of the summary.json written to the output directory.
    io::json summary;
    std::string message;
};

/// ⌊μ⌋ used by the speed formulas: the exact mean when one exists, otherwise
/// the finite-window estimate.
struct GrowthAnalysis {
    LeastMeanEstimate estimate;
    double mu_least_mean = 0.0;
    bool exact_mean = false;
    AssumptionReport assumptions;
};

GrowthAnalysis analyze_growth(const Scenario& s);

/// speed_curve.csv + summary.json.
CommandResult cmd_speeds(const Scenario& s);
/// fronts.csv, envelope.csv, verdict.json, summary.json and optional snapshots.
CommandResult cmd_simulate(const Scenario& s);
/// Residual certificates, comparison and positivity reports, summary.json.
CommandResult cmd_verify(const Scenario& s);
/// Every requested check, each in its own subdirectory, plus a combined summary.json.
CommandResult cmd_report(const Scenario& s);

/// `sweep` documents: {"base": scenario object or path, "verb": "simulate",
/// "grid": {"dotted.path": [values...], ...}}. Runs the cartesian product on
/// `threads` workers, one subdirectory per run, and writes sweep.json.
CommandResult cmd_sweep(const io::json& sweep, const std::filesystem::path& base_dir,
                        const std::filesystem::path& out, int threads);

/// Dispatches one verb on an already parsed scenario, converting library
/// errors into exit codes and an error summary.
CommandResult run_verb(const std::string& verb, const Scenario& s);

}  // namespace nlkpp
