#pragma once

#include "phasex/journal.hpp"
#include "phasex/runner.hpp"

#include <string>
#include <vector>

namespace phasex {

/// One rescreened candidate scored against its kernel's best stock build.
/// Ratios are baseline over candidate, so values above 1 favor the found
/// phase order.
struct RatioPoint {
    std::string kernel;
    std::string origin;
    std::string sequence_id;
    std::string exec;
    double candidate_energy_j = 0.0;
    double candidate_time_ms = 0.0;
    std::string baseline_level;
    std::string baseline_exec;
    double baseline_energy_j = 0.0;
    double baseline_time_ms = 0.0;
    double ratio_energy = 0.0;
    double ratio_time = 0.0;

    bool operator==(const RatioPoint&) const = default;
};

/// Pairs every usable rescreened record with the best usable baseline of
/// its kernel. Kernels without a usable baseline contribute no points.
/// Output is sorted by (kernel, origin, sequence_id, exec).
std::vector<RatioPoint> compute_ratios(const std::vector<EvaluationRecord>& records);

enum class ReportFormat { table_csv, records_jsonl, scatter_csv };

ReportFormat report_format_from_string(std::string_view s);

/// Renders one report over everything the journal holds. `table_csv` is a
/// per-kernel champion summary, `scatter_csv` one row per rescreened
/// candidate, `records_jsonl` the full evaluation log, one JSON object per
/// line. CSV headers carry seed, provider, ratio orientation, and a partial
/// marker when the campaign has not finished.
std::string make_report(const Journal& journal, ReportFormat format);

} // namespace phasex
