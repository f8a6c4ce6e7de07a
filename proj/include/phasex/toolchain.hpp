#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace phasex {

/// Command templates for the four pipeline stages plus the stock-level
/// path. Tokens may hold placeholders:
///   {input} {output}            stage input / output file
///   {inputs}                    expands to all link inputs (token alone)
///   {passes}                    expands to the pass names (token alone)
///   {openmp}                    expands to openmp_flags, or nothing
///   {extra}                     expands to extra_flags (token alone)
///   {level}                     stock optimization level flag, e.g. -O2
///   {cpu_flag} {fp_contract_flag}  config values; empty tokens are dropped
struct ToolchainConfig {
    std::vector<std::string> frontend;
    std::vector<std::string> optimizer;
    std::vector<std::string> backend;
    std::vector<std::string> linker;
    std::vector<std::string> standard;

    std::vector<std::string> openmp_flags{"-fopenmp"};
    std::vector<std::string> extra_flags;
    std::string cpu_flag = "-mcpu=native";
    std::string fp_contract_flag = "-fp-contract=fast";
    std::chrono::milliseconds tool_timeout{10000};

    /// Templates for a stock clang/opt/llc installation. The kernel goes
    /// through frontend -> optimizer -> backend; the measurement harness is
    /// built by the same frontend/backend but never passes the optimizer.
    static ToolchainConfig llvm_default();
};

enum class CompileStatus { ok, tool_error, tool_timeout };

std::string_view to_string(CompileStatus s);

struct CompileOutcome {
    CompileStatus status = CompileStatus::tool_error;
    std::filesystem::path binary_path; // set when status == ok
    std::filesystem::path work_dir;
    std::string stage;       // failing stage when not ok
    std::string log_excerpt; // stderr tail of the failing tool
    std::vector<std::string> argv_log; // one rendered command line per stage run

    bool ok() const { return status == CompileStatus::ok; }
};

/// Drives the compile pipeline inside a scratch tree. One work directory
/// per tag; the harness object is compiled once per (source, openmp) pair
/// and reused byte-identically for every candidate link.
class ToolchainDriver {
public:
    ToolchainDriver(ToolchainConfig config, std::filesystem::path scratch_root,
                    bool keep_artifacts = false);

    /// Kernel through the pass sequence, linked against the cached harness.
    /// Candidate tool failures and timeouts come back in the outcome; only
    /// harness or scratch-setup failures throw ToolchainError.
    CompileOutcome compile_sequence(const std::filesystem::path& kernel_src,
                                    const std::filesystem::path& harness_src,
                                    bool openmp,
                                    const std::vector<std::string>& pass_names,
                                    const std::string& tag);

    /// One-shot stock build of kernel + harness at a stock level ("-O2").
    CompileOutcome compile_standard(const std::filesystem::path& kernel_src,
                                    const std::filesystem::path& harness_src,
                                    bool openmp, const std::string& level,
                                    const std::string& tag);

    /// Drops the outcome's work directory unless keep_artifacts is set.
    void cleanup(const CompileOutcome& outcome);

    const std::filesystem::path& scratch_root() const { return scratch_root_; }
    const ToolchainConfig& config() const { return config_; }

private:
    struct StageRun {
        bool ok = false;
        bool timed_out = false;
        std::string argv_line;
        std::string stderr_tail;
    };

    StageRun run_stage(const std::vector<std::string>& argv,
                       const std::filesystem::path& work_dir, const std::string& stage);

    std::vector<std::string> expand(const std::vector<std::string>& tmpl,
                                    const std::map<std::string, std::string>& scalars,
                                    const std::vector<std::string>& passes,
                                    const std::vector<std::string>& inputs,
                                    bool openmp) const;

    /// Cached harness object; throws ToolchainError if it cannot be built.
    std::filesystem::path harness_object(const std::filesystem::path& harness_src, bool openmp);

    std::filesystem::path fresh_work_dir(const std::string& tag);

    ToolchainConfig config_;
    std::filesystem::path scratch_root_;
    bool keep_artifacts_;
    std::mutex harness_mu_; // compile_* may run from worker threads
    std::map<std::string, std::filesystem::path> harness_cache_;
};

} // namespace phasex
