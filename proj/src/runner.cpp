#include "phasex/runner.hpp"

#include "phasex/errors.hpp"

#include <cmath>
#include <limits>

namespace phasex {

using nlohmann::json;

std::string_view to_string(EvalStatus s) {
    switch (s) {
    case EvalStatus::ok: return "ok";
    case EvalStatus::compile_failed: return "compile-failed";
    case EvalStatus::invalid_output: return "invalid-output";
    case EvalStatus::run_failed: return "run-failed";
    }
    return "?";
}

EvalStatus eval_status_from_string(std::string_view s) {
    if (s == "ok") return EvalStatus::ok;
    if (s == "compile-failed") return EvalStatus::compile_failed;
    if (s == "invalid-output") return EvalStatus::invalid_output;
    if (s == "run-failed") return EvalStatus::run_failed;
    throw Error("unknown evaluation status: " + std::string(s));
}

double EvaluationRecord::mean_energy_j() const {
    if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (const auto& s : samples) sum += s.energy_joules;
    return sum / static_cast<double>(samples.size());
}

double EvaluationRecord::mean_time_ms() const {
    if (samples.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (const auto& s : samples) sum += s.elapsed_ms;
    return sum / static_cast<double>(samples.size());
}

json EvaluationRecord::to_json() const {
    json j;
    j["kernel"] = kernel;
    j["phase"] = phase;
    j["origin"] = origin;
    j["level"] = level;
    j["sequence"] = sequence;
    j["sequence_id"] = sequence_id;
    j["openmp"] = openmp;
    j["threads"] = threads;
    j["reps"] = reps;
    j["status"] = std::string(to_string(status));
    j["compile"] = {{"status", compile_status}, {"stage", compile_stage}, {"log", compile_log}};
    j["verdict"] = {{"correct", verdict.correct},
                    {"max_abs_diff", std::isnan(verdict.max_abs_diff)
                                         ? json()
                                         : json(verdict.max_abs_diff)},
                    {"compared_values", verdict.compared_values},
                    {"reason", verdict.reason}};
    json samples_j = json::array();
    for (const auto& s : samples)
        samples_j.push_back({{"energy_j", s.energy_joules},
                             {"time_ms", s.elapsed_ms},
                             {"low_confidence", s.low_confidence}});
    j["samples"] = std::move(samples_j);
    return j;
}

EvaluationRecord EvaluationRecord::from_json(const json& j) {
    EvaluationRecord r;
    try {
        r.kernel = j.at("kernel").get<std::string>();
        r.phase = j.at("phase").get<std::string>();
        r.origin = j.at("origin").get<std::string>();
        r.level = j.at("level").get<std::string>();
        r.sequence = j.at("sequence").get<std::vector<std::string>>();
        r.sequence_id = j.at("sequence_id").get<std::string>();
        r.openmp = j.at("openmp").get<bool>();
        r.threads = j.at("threads").get<int>();
        r.reps = j.at("reps").get<int>();
        r.status = eval_status_from_string(j.at("status").get<std::string>());
        const auto& c = j.at("compile");
        r.compile_status = c.at("status").get<std::string>();
        r.compile_stage = c.at("stage").get<std::string>();
        r.compile_log = c.at("log").get<std::string>();
        const auto& v = j.at("verdict");
        r.verdict.correct = v.at("correct").get<bool>();
        r.verdict.max_abs_diff = v.at("max_abs_diff").is_null()
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : v.at("max_abs_diff").get<double>();
        r.verdict.compared_values = v.at("compared_values").get<std::size_t>();
        r.verdict.reason = v.at("reason").get<std::string>();
        for (const auto& s : j.at("samples")) {
            MeasurementSample m;
            m.energy_joules = s.at("energy_j").get<double>();
            m.elapsed_ms = s.at("time_ms").get<double>();
            m.low_confidence = s.at("low_confidence").get<bool>();
            r.samples.push_back(m);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed evaluation record: ") + e.what());
    }
    return r;
}

void run_evaluation(EvaluationRecord& rec, const CompileOutcome& compile,
                    const std::vector<double>& reference, double tolerance,
                    EnergyProvider& provider, const std::filesystem::path& lock_file,
                    const ExecConfig& exec) {
    rec.compile_status = std::string(to_string(compile.status));
    rec.compile_stage = compile.stage;
    rec.compile_log = compile.log_excerpt;
    rec.verdict = Verdict{};
    rec.samples.clear();

    if (!compile.ok()) {
        rec.status = EvalStatus::compile_failed;
        return;
    }

    auto env = exec.env_overrides;
    if (rec.openmp) env["OMP_NUM_THREADS"] = std::to_string(rec.threads);

    MeasurementLock lock(lock_file);

    rec.verdict = validate_binary(compile.binary_path, reference, env, exec.run_timeout,
                                  tolerance);
    if (!rec.verdict.correct) {
        rec.status = EvalStatus::invalid_output;
        return;
    }

    for (int i = 0; i < rec.reps; ++i) {
        try {
            rec.samples.push_back(measure({compile.binary_path.string()}, provider, env,
                                          exec.run_timeout));
        } catch (const ProviderError&) {
            throw;
        } catch (const Error& e) {
            // A binary that validated but dies under measurement is noise,
            // not a candidate; partial samples would skew the mean.
            rec.samples.clear();
            rec.status = EvalStatus::run_failed;
            rec.verdict.reason = e.what();
            return;
        }
    }
    rec.status = EvalStatus::ok;
}

} // namespace phasex
