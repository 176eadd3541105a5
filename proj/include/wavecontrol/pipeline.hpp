#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecontrol/config.hpp"
#include "wavecontrol/coupling.hpp"
#include "wavecontrol/moments.hpp"
#include "wavecontrol/waveform.hpp"

namespace wavecontrol {

enum class Command { analyze, synthesize, verify, sweep };

std::optional<Command> parse_command(const std::string& name);
const char* to_string(Command c) noexcept;

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConditionsViolated = 2,
    kExitNumericalFailure = 3,
    kExitBadInput = 4,
};

struct RunOptions {
    std::optional<Method> method;  // overrides the config
    bool force = false;            // synthesize even when conditions fail
    unsigned seed = 0;             // recorded; the pipeline itself is deterministic
};

struct SynthesisSummary {
    std::string basis;
    double cond_estimate = 0.0;
    bool cond_extended = false;
    double moment_residual = 0.0;
    double raw_moment_residual = 0.0;
    double realification_residual = 0.0;
    double control_l2 = 0.0;
    std::size_t terms = 0;
};

struct VerificationSummary {
    double tol = 0.0;
    double max_relative_error = 0.0;
    int worst_k = 0;
    std::size_t worst_l = 0;
    bool pass = false;
    double wellposedness_ratio = 0.0;
};

struct SweepRow {
    double value = 0.0;
    bool controllable = false;
    double cond_estimate = 0.0;
    bool cond_extended = false;
    double moment_residual = 0.0;
    double verify_error = 0.0;
    std::string status;
};

struct RunReport {
    Command command = Command::analyze;
    Method method = Method::raw;
    unsigned seed = 0;
    bool forced = false;
    int exit_code = kExitOk;
    std::string status = "ok";
    std::string error;
    std::optional<ConditionsReport> conditions;
    std::optional<SynthesisSummary> synthesis;
    std::optional<VerificationSummary> verification;
    std::string sweep_param;
    std::vector<SweepRow> sweep;
    std::map<std::string, double> timings;  // seconds; not part of the deterministic report
};

struct RunResult {
    RunReport report;
    std::optional<ControlSignal> control;  // only set when the control may be published
    std::optional<FieldValues> state;
    std::size_t samples = 2048;  // rows of control.csv
};

RunResult run(Command command, const ProblemConfig& cfg, const RunOptions& options = {});

/// Deterministic report document (timings excluded).
nlohmann::json report_to_json(const RunReport& report);
nlohmann::json timings_to_json(const RunReport& report);

/// Writes report.json, timings.json and whatever artifacts the run produced
/// (control.csv, control_combo.json, state.csv, sweep.csv).
void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir);

}  // namespace wavecontrol
