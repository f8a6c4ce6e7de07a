#include "phasex/campaign_config.hpp"

#include "phasex/errors.hpp"
#include "phasex/text_util.hpp"

#include <set>
#include <string>

namespace phasex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + " needs '" + std::string(key) + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
    }
}

template <typename T>
T optional_of(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
    }
}

void parse_provider(const json& j, const fs::path& base, ProviderSpec& spec) {
    reject_unknown_keys(j,
                        {"kind", "mock_model", "rapl_root", "rapl_include_dram",
                         "rapl_include_gpu", "sensor_files", "sensor_period_us"},
                        "provider");
    spec.kind = provider_kind_from_string(require<std::string>(j, "kind", "provider"));
    switch (spec.kind) {
    case ProviderKind::mock: {
        spec.mock_model = resolve(base, require<std::string>(j, "mock_model", "provider"));
        if (!fs::exists(spec.mock_model))
            throw ConfigError("mock model file does not exist: " + spec.mock_model.string());
        break;
    }
    case ProviderKind::rapl: {
        spec.rapl_root =
            resolve(base, optional_of<std::string>(j, "rapl_root", "/sys/class/powercap",
                                                   "provider"));
        spec.rapl_include_dram = optional_of(j, "rapl_include_dram", true, "provider");
        spec.rapl_include_gpu = optional_of(j, "rapl_include_gpu", false, "provider");
        break;
    }
    case ProviderKind::sensor_files: {
        const auto files =
            require<std::vector<std::string>>(j, "sensor_files", "provider");
        if (files.empty()) throw ConfigError("provider.sensor_files must not be empty");
        for (const auto& f : files) spec.sensor_files.push_back(resolve(base, f));
        const auto period =
            optional_of<std::int64_t>(j, "sensor_period_us", 263808, "provider");
        if (period <= 0) throw ConfigError("provider.sensor_period_us must be positive");
        spec.sensor_period = std::chrono::microseconds(period);
        break;
    }
    }
}

void parse_toolchain(const json& j, ToolchainConfig& tc) {
    reject_unknown_keys(j,
                        {"profile", "frontend", "optimizer", "backend", "linker", "standard",
                         "openmp_flags", "extra_flags", "cpu_flag", "fp_contract_flag",
                         "tool_timeout_ms"},
                        "toolchain");
    const std::string profile = optional_of<std::string>(j, "profile", "llvm", "toolchain");
    if (profile == "llvm") {
        tc = ToolchainConfig::llvm_default();
    } else if (profile == "custom") {
        tc = ToolchainConfig{};
        for (const char* key : {"frontend", "optimizer", "backend", "linker", "standard"})
            if (!j.contains(key))
                throw ConfigError("toolchain profile 'custom' needs '" + std::string(key) + "'");
    } else {
        throw ConfigError("toolchain profile must be 'llvm' or 'custom', got '" + profile + "'");
    }

    auto take = [&](const char* key, std::vector<std::string>& into) {
        if (j.contains(key))
            into = require<std::vector<std::string>>(j, key, "toolchain");
    };
    take("frontend", tc.frontend);
    take("optimizer", tc.optimizer);
    take("backend", tc.backend);
    take("linker", tc.linker);
    take("standard", tc.standard);
    take("openmp_flags", tc.openmp_flags);
    take("extra_flags", tc.extra_flags);
    if (j.contains("cpu_flag")) tc.cpu_flag = require<std::string>(j, "cpu_flag", "toolchain");
    if (j.contains("fp_contract_flag"))
        tc.fp_contract_flag = require<std::string>(j, "fp_contract_flag", "toolchain");
    const auto timeout =
        optional_of<std::int64_t>(j, "tool_timeout_ms", tc.tool_timeout.count(), "toolchain");
    if (timeout <= 0) throw ConfigError("toolchain.tool_timeout_ms must be positive");
    tc.tool_timeout = std::chrono::milliseconds(timeout);

    for (const auto* tmpl : {&tc.frontend, &tc.optimizer, &tc.backend, &tc.linker, &tc.standard})
        if (tmpl->empty())
            throw ConfigError("toolchain stage templates must not be empty");
}

} // namespace

CampaignConfig load_campaign_config(const fs::path& config_file) {
    json j;
    try {
        j = json::parse(read_text_file(config_file));
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + config_file.string() + ": " + e.what());
    }
    const fs::path base = config_file.has_parent_path() ? config_file.parent_path() : ".";
    const std::string where = "campaign config";

    reject_unknown_keys(
        j,
        {"seed", "catalog", "journal", "scratch", "kernels", "levels", "thread_set",
         "random_count", "model_count", "sequence_length", "fraction", "reps", "screen_reps",
         "tolerance", "run_timeout_ms", "parallel_jobs", "lock_file", "keep_artifacts",
         "provider", "toolchain"},
        where);

    CampaignConfig cfg;
    cfg.plan.seed = require<std::string>(j, "seed", where);
    if (cfg.plan.seed.empty()) throw ConfigError("seed must not be empty");

    cfg.catalog_path = resolve(base, require<std::string>(j, "catalog", where));
    if (!fs::exists(cfg.catalog_path))
        throw ConfigError("catalog file does not exist: " + cfg.catalog_path.string());

    cfg.journal_dir = resolve(base, require<std::string>(j, "journal", where));
    cfg.scratch_dir = resolve(
        base, optional_of<std::string>(j, "scratch", (cfg.journal_dir / "scratch").string(),
                                       where));
    cfg.keep_artifacts = optional_of(j, "keep_artifacts", false, where);

    if (!j.contains("kernels") || !j["kernels"].is_array() || j["kernels"].empty())
        throw ConfigError("campaign config needs a non-empty 'kernels' array");
    for (const auto& kj : j["kernels"]) {
        reject_unknown_keys(kj, {"name", "source", "harness", "openmp"}, "kernel entry");
        KernelSpec k;
        k.name = require<std::string>(kj, "name", "kernel entry");
        if (k.name.empty()) throw ConfigError("kernel name must not be empty");
        k.source = resolve(base, require<std::string>(kj, "source", "kernel " + k.name));
        k.harness = resolve(base, require<std::string>(kj, "harness", "kernel " + k.name));
        k.openmp = optional_of(kj, "openmp", false, "kernel " + k.name);
        if (!fs::exists(k.source))
            throw ConfigError("kernel source does not exist: " + k.source.string());
        if (!fs::exists(k.harness))
            throw ConfigError("kernel harness does not exist: " + k.harness.string());
        cfg.plan.kernels.push_back(std::move(k));
    }

    cfg.plan.levels = optional_of(j, "levels", cfg.plan.levels, where);
    if (cfg.plan.levels.empty()) throw ConfigError("levels must not be empty");
    cfg.plan.thread_set = optional_of(j, "thread_set", cfg.plan.thread_set, where);
    for (int t : cfg.plan.thread_set)
        if (t <= 0) throw ConfigError("thread_set entries must be positive");
    bool any_openmp = false;
    for (const auto& k : cfg.plan.kernels) any_openmp |= k.openmp;
    if (any_openmp && cfg.plan.thread_set.empty())
        throw ConfigError("thread_set must not be empty when a kernel has openmp set");

    cfg.plan.random_count = optional_of(j, "random_count", cfg.plan.random_count, where);
    cfg.plan.model_count = optional_of(j, "model_count", cfg.plan.model_count, where);
    if (cfg.plan.random_count < 0 || cfg.plan.model_count < 0)
        throw ConfigError("random_count and model_count must not be negative");
    cfg.plan.sequence_length = optional_of(j, "sequence_length", cfg.plan.sequence_length, where);
    if (cfg.plan.sequence_length <= 0) throw ConfigError("sequence_length must be positive");
    cfg.plan.fraction = optional_of(j, "fraction", cfg.plan.fraction, where);
    if (!(cfg.plan.fraction > 0.0 && cfg.plan.fraction <= 1.0))
        throw ConfigError("fraction must be in (0, 1]");
    cfg.plan.reps = optional_of(j, "reps", cfg.plan.reps, where);
    cfg.plan.screen_reps = optional_of(j, "screen_reps", cfg.plan.screen_reps, where);
    if (cfg.plan.reps <= 0 || cfg.plan.screen_reps <= 0)
        throw ConfigError("reps and screen_reps must be positive");
    cfg.plan.tolerance = optional_of(j, "tolerance", cfg.plan.tolerance, where);
    if (!(cfg.plan.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    const auto run_timeout = optional_of<std::int64_t>(j, "run_timeout_ms",
                                                       cfg.plan.run_timeout.count(), where);
    if (run_timeout <= 0) throw ConfigError("run_timeout_ms must be positive");
    cfg.plan.run_timeout = std::chrono::milliseconds(run_timeout);
    cfg.plan.parallel_jobs = optional_of(j, "parallel_jobs", cfg.plan.parallel_jobs, where);
    if (cfg.plan.parallel_jobs < 0) throw ConfigError("parallel_jobs must not be negative");
    cfg.plan.lock_file =
        resolve(base, optional_of<std::string>(j, "lock_file", cfg.plan.lock_file.string(),
                                               where));

    if (!j.contains("provider")) throw ConfigError("campaign config needs 'provider'");
    parse_provider(j["provider"], base, cfg.provider);
    parse_toolchain(j.contains("toolchain") ? j["toolchain"] : json::object(), cfg.toolchain);

    return cfg;
}

json CampaignConfig::to_json() const {
    json kernels = json::array();
    for (const auto& k : plan.kernels)
        kernels.push_back({{"name", k.name},
                           {"source", k.source.string()},
                           {"harness", k.harness.string()},
                           {"openmp", k.openmp}});

    json provider_j{{"kind", std::string(to_string(provider.kind))}};
    switch (provider.kind) {
    case ProviderKind::mock:
        provider_j["mock_model"] = provider.mock_model.string();
        break;
    case ProviderKind::rapl:
        provider_j["rapl_root"] = provider.rapl_root.string();
        provider_j["rapl_include_dram"] = provider.rapl_include_dram;
        provider_j["rapl_include_gpu"] = provider.rapl_include_gpu;
        break;
    case ProviderKind::sensor_files: {
        json files = json::array();
        for (const auto& f : provider.sensor_files) files.push_back(f.string());
        provider_j["sensor_files"] = std::move(files);
        provider_j["sensor_period_us"] = provider.sensor_period.count();
        break;
    }
    }

    return json{{"seed", plan.seed},
                {"catalog", catalog_path.string()},
                {"journal", journal_dir.string()},
                {"scratch", scratch_dir.string()},
                {"keep_artifacts", keep_artifacts},
                {"kernels", std::move(kernels)},
                {"levels", plan.levels},
                {"thread_set", plan.thread_set},
                {"random_count", plan.random_count},
                {"model_count", plan.model_count},
                {"sequence_length", plan.sequence_length},
                {"fraction", plan.fraction},
                {"reps", plan.reps},
                {"screen_reps", plan.screen_reps},
                {"tolerance", plan.tolerance},
                {"run_timeout_ms", plan.run_timeout.count()},
                {"parallel_jobs", plan.parallel_jobs},
                {"lock_file", plan.lock_file.string()},
                {"provider", std::move(provider_j)},
                {"toolchain",
                 {{"frontend", toolchain.frontend},
                  {"optimizer", toolchain.optimizer},
                  {"backend", toolchain.backend},
                  {"linker", toolchain.linker},
                  {"standard", toolchain.standard},
                  {"openmp_flags", toolchain.openmp_flags},
                  {"extra_flags", toolchain.extra_flags},
                  {"cpu_flag", toolchain.cpu_flag},
                  {"fp_contract_flag", toolchain.fp_contract_flag},
                  {"tool_timeout_ms", toolchain.tool_timeout.count()}}}};
}

} // namespace phasex
