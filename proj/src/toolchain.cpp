#include "phasex/toolchain.hpp"

#include "phasex/errors.hpp"
#include "phasex/fnv.hpp"
#include "phasex/subprocess.hpp"
#include "phasex/text_util.hpp"

namespace phasex {

namespace fs = std::filesystem;

ToolchainConfig ToolchainConfig::llvm_default() {
    ToolchainConfig c;
    c.frontend = {"clang", "-c", "-emit-llvm", "-O0", "{openmp}", "{extra}",
                  "{input}", "-o", "{output}"};
    c.optimizer = {"opt", "{passes}", "{input}", "-o", "{output}"};
    c.backend = {"llc", "-filetype=obj", "{cpu_flag}", "{fp_contract_flag}",
                 "{input}", "-o", "{output}"};
    c.linker = {"clang", "{inputs}", "{openmp}", "-lm", "-o", "{output}"};
    c.standard = {"clang", "{level}", "{openmp}", "{extra}", "{inputs}", "-lm",
                  "-o", "{output}"};
    return c;
}

std::string_view to_string(CompileStatus s) {
    switch (s) {
    case CompileStatus::ok: return "ok";
    case CompileStatus::tool_error: return "tool-error";
    case CompileStatus::tool_timeout: return "tool-timeout";
    }
    return "?";
}

namespace {

std::string sanitize_tag(const std::string& tag) {
    std::string out;
    out.reserve(tag.size());
    for (char c : tag) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    if (out.empty()) out = "work";
    return out;
}

std::string file_tail(const fs::path& p, std::size_t max_bytes) {
    std::error_code ec;
    if (!fs::exists(p, ec)) return {};
    std::string text;
    try {
        text = read_text_file(p);
    } catch (const Error&) {
        return {};
    }
    if (text.size() > max_bytes) text.erase(0, text.size() - max_bytes);
    return text;
}

} // namespace

ToolchainDriver::ToolchainDriver(ToolchainConfig config, fs::path scratch_root,
                                 bool keep_artifacts)
    : config_(std::move(config)),
      scratch_root_(std::move(scratch_root)),
      keep_artifacts_(keep_artifacts) {
    std::error_code ec;
    fs::create_directories(scratch_root_, ec);
    if (ec)
        throw ToolchainError("cannot create scratch root " + scratch_root_.string() + ": " +
                             ec.message());
}

std::vector<std::string> ToolchainDriver::expand(
    const std::vector<std::string>& tmpl, const std::map<std::string, std::string>& scalars,
    const std::vector<std::string>& passes, const std::vector<std::string>& inputs,
    bool openmp) const {
    std::vector<std::string> argv;
    argv.reserve(tmpl.size() + passes.size() + inputs.size());
    for (const auto& token : tmpl) {
        if (token == "{passes}") {
            argv.insert(argv.end(), passes.begin(), passes.end());
            continue;
        }
        if (token == "{inputs}") {
            argv.insert(argv.end(), inputs.begin(), inputs.end());
            continue;
        }
        if (token == "{openmp}") {
            if (openmp)
                argv.insert(argv.end(), config_.openmp_flags.begin(), config_.openmp_flags.end());
            continue;
        }
        if (token == "{extra}") {
            argv.insert(argv.end(), config_.extra_flags.begin(), config_.extra_flags.end());
            continue;
        }
        std::string t = token;
        for (const auto& [key, value] : scalars) {
            const std::string pat = "{" + key + "}";
            std::size_t at = 0;
            while ((at = t.find(pat, at)) != std::string::npos) {
                t.replace(at, pat.size(), value);
                at += value.size();
            }
        }
        if (!t.empty()) argv.push_back(std::move(t));
    }
    if (argv.empty()) throw ToolchainError("stage template expanded to an empty command");
    return argv;
}

ToolchainDriver::StageRun ToolchainDriver::run_stage(const std::vector<std::string>& argv,
                                                     const fs::path& work_dir,
                                                     const std::string& stage) {
    RunSpec spec;
    spec.argv = argv;
    spec.timeout = config_.tool_timeout;
    spec.stdout_path = work_dir / (stage + ".out");
    spec.stderr_path = work_dir / (stage + ".err");

    StageRun sr;
    sr.argv_line = join(argv, " ");
    const RunResult r = run_process(spec);
    sr.ok = r.ok();
    sr.timed_out = r.status == RunStatus::timed_out;
    if (!sr.ok) {
        sr.stderr_tail = file_tail(*spec.stderr_path, 2000);
        if (r.status == RunStatus::spawn_failed)
            sr.stderr_tail = r.error;
        else if (r.status == RunStatus::signaled)
            sr.stderr_tail += "\n[killed by signal " + std::to_string(r.term_signal) + "]";
        else if (sr.timed_out)
            sr.stderr_tail += "\n[timed out after " +
                              std::to_string(config_.tool_timeout.count()) + " ms]";
    }
    return sr;
}

fs::path ToolchainDriver::fresh_work_dir(const std::string& tag) {
    const fs::path dir = scratch_root_ / sanitize_tag(tag);
    std::error_code ec;
    fs::remove_all(dir, ec); // stale leftovers from an interrupted run
    fs::create_directories(dir, ec);
    if (ec)
        throw ToolchainError("cannot create work dir " + dir.string() + ": " + ec.message());
    return dir;
}

fs::path ToolchainDriver::harness_object(const fs::path& harness_src, bool openmp) {
    std::error_code ec;
    const fs::path canon = fs::weakly_canonical(harness_src, ec);
    const std::string key = (ec ? harness_src : canon).string() + (openmp ? "|omp" : "|serial");

    std::lock_guard<std::mutex> lock(harness_mu_);
    if (const auto it = harness_cache_.find(key); it != harness_cache_.end()) return it->second;

    const fs::path dir =
        scratch_root_ / "harness" / (fnv1a64_hex(key) + (openmp ? "-omp" : "-serial"));
    fs::create_directories(dir, ec);
    if (ec)
        throw ToolchainError("cannot create harness dir " + dir.string() + ": " + ec.message());

    const fs::path bc = dir / "harness.bc";
    const fs::path obj = dir / "harness.o";
    const std::map<std::string, std::string> common{
        {"cpu_flag", config_.cpu_flag}, {"fp_contract_flag", config_.fp_contract_flag}};

    auto front = common;
    front["input"] = harness_src.string();
    front["output"] = bc.string();
    StageRun fr = run_stage(expand(config_.frontend, front, {}, {}, openmp), dir, "frontend");
    if (!fr.ok)
        throw ToolchainError("harness frontend failed for " + harness_src.string() + ": " +
                             fr.stderr_tail);

    auto back = common;
    back["input"] = bc.string();
    back["output"] = obj.string();
    StageRun br = run_stage(expand(config_.backend, back, {}, {}, openmp), dir, "backend");
    if (!br.ok)
        throw ToolchainError("harness backend failed for " + harness_src.string() + ": " +
                             br.stderr_tail);

    harness_cache_.emplace(key, obj);
    return obj;
}

CompileOutcome ToolchainDriver::compile_sequence(const fs::path& kernel_src,
                                                 const fs::path& harness_src, bool openmp,
                                                 const std::vector<std::string>& pass_names,
                                                 const std::string& tag) {
    const fs::path harness_obj = harness_object(harness_src, openmp);

    CompileOutcome out;
    out.work_dir = fresh_work_dir(tag);
    const fs::path bc = out.work_dir / "kernel.bc";
    const fs::path opt_bc = out.work_dir / "kernel.opt.bc";
    const fs::path obj = out.work_dir / "kernel.o";
    const fs::path bin = out.work_dir / "bin";
    const std::map<std::string, std::string> common{
        {"cpu_flag", config_.cpu_flag}, {"fp_contract_flag", config_.fp_contract_flag}};

    struct Step {
        const char* name;
        const std::vector<std::string>* tmpl;
        std::string input, output;
        const std::vector<std::string>* passes;
        std::vector<std::string> inputs;
    };
    const std::vector<std::string> none;
    std::vector<Step> steps;
    steps.push_back({"frontend", &config_.frontend, kernel_src.string(), bc.string(), &none, {}});
    steps.push_back({"optimizer", &config_.optimizer, bc.string(), opt_bc.string(), &pass_names, {}});
    steps.push_back({"backend", &config_.backend, opt_bc.string(), obj.string(), &none, {}});
    steps.push_back({"linker", &config_.linker, "", bin.string(), &none,
                     {obj.string(), harness_obj.string()}});

    for (const auto& step : steps) {
        auto scalars = common;
        if (!step.input.empty()) scalars["input"] = step.input;
        scalars["output"] = step.output;
        const auto argv = expand(*step.tmpl, scalars, *step.passes, step.inputs, openmp);
        StageRun sr = run_stage(argv, out.work_dir, step.name);
        out.argv_log.push_back(sr.argv_line);
        if (!sr.ok) {
            out.status = sr.timed_out ? CompileStatus::tool_timeout : CompileStatus::tool_error;
            out.stage = step.name;
            out.log_excerpt = sr.stderr_tail;
            return out;
        }
    }
    out.status = CompileStatus::ok;
    out.binary_path = bin;
    return out;
}

CompileOutcome ToolchainDriver::compile_standard(const fs::path& kernel_src,
                                                 const fs::path& harness_src, bool openmp,
                                                 const std::string& level,
                                                 const std::string& tag) {
    CompileOutcome out;
    out.work_dir = fresh_work_dir(tag);
    const fs::path bin = out.work_dir / "bin";

    const std::map<std::string, std::string> scalars{
        {"output", bin.string()},
        {"level", level},
        {"cpu_flag", config_.cpu_flag},
        {"fp_contract_flag", config_.fp_contract_flag}};
    const auto argv = expand(config_.standard, scalars, {},
                             {kernel_src.string(), harness_src.string()}, openmp);
    StageRun sr = run_stage(argv, out.work_dir, "standard");
    out.argv_log.push_back(sr.argv_line);
    if (!sr.ok) {
        out.status = sr.timed_out ? CompileStatus::tool_timeout : CompileStatus::tool_error;
        out.stage = "standard";
        out.log_excerpt = sr.stderr_tail;
        return out;
    }
    out.status = CompileStatus::ok;
    out.binary_path = bin;
    return out;
}

void ToolchainDriver::cleanup(const CompileOutcome& outcome) {
    if (keep_artifacts_ || outcome.work_dir.empty()) return;
    std::error_code ec;
    fs::remove_all(outcome.work_dir, ec);
}

} // namespace phasex
