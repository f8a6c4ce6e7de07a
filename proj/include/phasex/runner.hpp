#pragma once

#include "phasex/energy_meter.hpp"
#include "phasex/toolchain.hpp"
#include "phasex/validate.hpp"

#include <json.hpp>

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phasex {

/// How one measured execution variant runs.
struct ExecConfig {
    std::map<std::string, std::string> env_overrides;
    std::chrono::milliseconds run_timeout{60000};
};

enum class EvalStatus { ok, compile_failed, invalid_output, run_failed };

std::string_view to_string(EvalStatus s);
EvalStatus eval_status_from_string(std::string_view s);

/// Everything known about one evaluated (kernel, build, execution) cell.
/// This is the unit stored in the campaign journal and consumed by reports.
struct EvaluationRecord {
    std::string kernel;
    std::string phase;  // baseline | screening | rescreening
    std::string origin; // random | model | standard-level | manual
    std::string level;  // stock level for baselines, e.g. "-O2"
    std::vector<std::string> sequence; // pass names; empty for stock builds
    std::string sequence_id;           // stable identity within the campaign
    bool openmp = false;
    int threads = 1; // meaningful when openmp
    int reps = 1;

    EvalStatus status = EvalStatus::compile_failed;
    std::string compile_status = "tool-error";
    std::string compile_stage;
    std::string compile_log;
    Verdict verdict;
    std::vector<MeasurementSample> samples;

    std::string exec_label() const {
        return openmp ? "omp" + std::to_string(threads) : "serial";
    }
    /// Arithmetic means over the repetition block; NaN when unmeasured.
    double mean_energy_j() const;
    double mean_time_ms() const;
    bool usable() const { return status == EvalStatus::ok && !samples.empty(); }

    nlohmann::json to_json() const;
    static EvaluationRecord from_json(const nlohmann::json& j);
    bool operator==(const EvaluationRecord&) const = default;
};

/// Fills the outcome-dependent half of `rec` (identity fields stay as the
/// caller set them): compile diagnostics, validation verdict, and `reps`
/// measured samples. The machine-wide measurement lock is held across the
/// validation run and the whole repetition block so nothing else measures
/// concurrently. Run failure during measurement discards partial samples.
/// ProviderError propagates; it means no measurement can succeed.
void run_evaluation(EvaluationRecord& rec, const CompileOutcome& compile,
                    const std::vector<double>& reference, double tolerance,
                    EnergyProvider& provider, const std::filesystem::path& lock_file,
                    const ExecConfig& exec);

} // namespace phasex
