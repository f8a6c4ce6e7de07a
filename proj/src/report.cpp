#include "phasex/report.hpp"

#include "phasex/errors.hpp"
#include "phasex/text_util.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace phasex {

using nlohmann::json;

namespace {

/// CSV cells never need quoting here: pass names, labels, and ids carry no
/// commas or quotes by construction, but guard anyway.
std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

struct Meta {
    std::string seed = "unknown";
    std::string provider = "unknown";
    bool partial = false;
};

Meta journal_meta(const Journal& journal) {
    Meta m;
    if (const auto manifest = journal.read_manifest()) {
        m.seed = manifest->value("seed", m.seed);
        m.provider = manifest->value("provider", m.provider);
    }
    m.partial = !journal.read_result("summary").has_value();
    return m;
}

std::string header_comment(const Meta& m) {
    std::string out;
    out += "# seed: " + m.seed + "\n";
    out += "# provider: " + m.provider + "\n";
    out += "# ratio orientation: baseline/candidate (values above 1 favor the candidate)\n";
    if (m.partial) out += "# partial: campaign incomplete, rows reflect the journal so far\n";
    return out;
}

bool record_order(const EvaluationRecord& a, const EvaluationRecord& b) {
    return std::tie(a.kernel, a.phase, a.origin, a.sequence_id) <
               std::tie(b.kernel, b.phase, b.origin, b.sequence_id) ||
           (std::tie(a.kernel, a.phase, a.origin, a.sequence_id) ==
                std::tie(b.kernel, b.phase, b.origin, b.sequence_id) &&
            std::make_tuple(a.openmp, a.threads, a.reps) <
                std::make_tuple(b.openmp, b.threads, b.reps));
}

} // namespace

std::vector<RatioPoint> compute_ratios(const std::vector<EvaluationRecord>& records) {
    struct Best {
        bool set = false;
        std::string level, exec;
        double energy = 0.0, time = 0.0;
    };
    std::map<std::string, Best> baselines;
    for (const auto& rec : records) {
        if (rec.phase != "baseline" || !rec.usable()) continue;
        Best& b = baselines[rec.kernel];
        const double e = rec.mean_energy_j();
        const double t = rec.mean_time_ms();
        if (!b.set || e < b.energy || (e == b.energy && t < b.time)) {
            b = {true, rec.level, rec.exec_label(), e, t};
        }
    }

    std::vector<RatioPoint> points;
    for (const auto& rec : records) {
        if (rec.phase != "rescreening" || !rec.usable()) continue;
        const auto it = baselines.find(rec.kernel);
        if (it == baselines.end() || !it->second.set) continue;
        const Best& b = it->second;
        RatioPoint p;
        p.kernel = rec.kernel;
        p.origin = rec.origin;
        p.sequence_id = rec.sequence_id;
        p.exec = rec.exec_label();
        p.candidate_energy_j = rec.mean_energy_j();
        p.candidate_time_ms = rec.mean_time_ms();
        p.baseline_level = b.level;
        p.baseline_exec = b.exec;
        p.baseline_energy_j = b.energy;
        p.baseline_time_ms = b.time;
        p.ratio_energy = b.energy / p.candidate_energy_j;
        p.ratio_time = b.time / p.candidate_time_ms;
        points.push_back(std::move(p));
    }
    std::sort(points.begin(), points.end(), [](const RatioPoint& a, const RatioPoint& b) {
        return std::tie(a.kernel, a.origin, a.sequence_id, a.exec) <
               std::tie(b.kernel, b.origin, b.sequence_id, b.exec);
    });
    return points;
}

ReportFormat report_format_from_string(std::string_view s) {
    if (s == "table" || s == "table_csv") return ReportFormat::table_csv;
    if (s == "records" || s == "records_jsonl") return ReportFormat::records_jsonl;
    if (s == "scatter" || s == "scatter_csv") return ReportFormat::scatter_csv;
    throw ConfigError("unknown report format: " + std::string(s) +
                      " (expected table, records, or scatter)");
}

std::string make_report(const Journal& journal, ReportFormat format) {
    auto records = journal.all_records();
    const Meta meta = journal_meta(journal);

    if (format == ReportFormat::records_jsonl) {
        std::sort(records.begin(), records.end(), record_order);
        std::string out;
        for (const auto& rec : records) out += rec.to_json().dump() + "\n";
        return out;
    }

    const auto points = compute_ratios(records);

    if (format == ReportFormat::scatter_csv) {
        std::string out = header_comment(meta);
        out += "kernel,origin,sequence_id,exec,candidate_energy_j,candidate_time_ms,"
               "baseline_level,baseline_exec,baseline_energy_j,baseline_time_ms,"
               "ratio_energy,ratio_time\n";
        for (const auto& p : points) {
            out += csv_cell(p.kernel) + "," + csv_cell(p.origin) + "," +
                   csv_cell(p.sequence_id) + "," + csv_cell(p.exec) + "," +
                   fmt_double(p.candidate_energy_j) + "," + fmt_double(p.candidate_time_ms) +
                   "," + csv_cell(p.baseline_level) + "," + csv_cell(p.baseline_exec) + "," +
                   fmt_double(p.baseline_energy_j) + "," + fmt_double(p.baseline_time_ms) + "," +
                   fmt_double(p.ratio_energy) + "," + fmt_double(p.ratio_time) + "\n";
        }
        return out;
    }

    // table_csv: the best point per kernel.
    std::map<std::string, const RatioPoint*> champions;
    for (const auto& p : points) {
        auto [it, inserted] = champions.emplace(p.kernel, &p);
        if (inserted) continue;
        const RatioPoint* cur = it->second;
        if (p.candidate_energy_j < cur->candidate_energy_j ||
            (p.candidate_energy_j == cur->candidate_energy_j &&
             p.candidate_time_ms < cur->candidate_time_ms))
            it->second = &p;
    }
    std::string out = header_comment(meta);
    out += "kernel,baseline_level,baseline_exec,baseline_energy_j,baseline_time_ms,"
           "champion_origin,champion_id,champion_exec,champion_energy_j,champion_time_ms,"
           "ratio_energy,ratio_time\n";
    for (const auto& [kernel, p] : champions) {
        out += csv_cell(kernel) + "," + csv_cell(p->baseline_level) + "," +
               csv_cell(p->baseline_exec) + "," + fmt_double(p->baseline_energy_j) + "," +
               fmt_double(p->baseline_time_ms) + "," + csv_cell(p->origin) + "," +
               csv_cell(p->sequence_id) + "," + csv_cell(p->exec) + "," +
               fmt_double(p->candidate_energy_j) + "," + fmt_double(p->candidate_time_ms) + "," +
               fmt_double(p->ratio_energy) + "," + fmt_double(p->ratio_time) + "\n";
    }
    return out;
}

} // namespace phasex
