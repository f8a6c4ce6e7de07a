#pragma once

// Shared scaffolding for the test binaries: build-injected locations of the
// fake toolchain and fixtures, a self-cleaning temp directory, and builders
// for the hermetic campaign configuration the end-to-end tests drive.

#include "phasex/toolchain.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef PHASEX_FAKE_TOOL
#error "build must define PHASEX_FAKE_TOOL"
#endif
#ifndef PHASEX_FIXTURE_DIR
#error "build must define PHASEX_FIXTURE_DIR"
#endif
#ifndef PHASEX_CATALOG_FILE
#error "build must define PHASEX_CATALOG_FILE"
#endif

namespace phasex::test {

inline std::string fake_tool() { return PHASEX_FAKE_TOOL; }
inline std::filesystem::path fixture_dir() { return PHASEX_FIXTURE_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return fixture_dir() / name; }
inline std::filesystem::path bundled_catalog() { return PHASEX_CATALOG_FILE; }

/// mkdtemp-backed scratch directory, removed recursively on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "phasex-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("read failed: " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Command templates that drive the fake tool through the same four-stage
/// shape the real pipeline uses.
inline ToolchainConfig fake_toolchain(std::chrono::milliseconds tool_timeout =
                                          std::chrono::milliseconds{5000}) {
    ToolchainConfig cfg;
    const std::string ft = fake_tool();
    cfg.frontend = {ft, "--role", "frontend", "{openmp}", "{extra}", "{input}", "-o", "{output}"};
    cfg.optimizer = {ft, "--role", "optimizer", "{input}", "-o", "{output}", "{passes}"};
    cfg.backend = {ft, "--role", "backend", "{input}", "-o", "{output}"};
    cfg.linker = {ft, "--role", "linker", "-o", "{output}", "{openmp}", "{inputs}"};
    cfg.standard = {ft, "--role", "standard", "{level}", "{openmp}", "-o", "{output}", "{inputs}"};
    cfg.openmp_flags = {"--openmp"};
    cfg.cpu_flag.clear();
    cfg.fp_contract_flag.clear();
    cfg.tool_timeout = tool_timeout;
    return cfg;
}

/// Campaign config document for the three fixture kernels over the small
/// poisoned catalog, sized so a whole campaign finishes in seconds. Tests
/// adjust fields before writing it out.
inline nlohmann::json campaign_doc(const std::filesystem::path& dir, const std::string& seed) {
    const std::string ft = fake_tool();
    nlohmann::json j;
    j["seed"] = seed;
    j["catalog"] = fixture("catalog-small.txt").string();
    j["journal"] = (dir / "journal").string();
    j["scratch"] = (dir / "scratch").string();
    j["lock_file"] = (dir / "measure.lock").string();
    j["kernels"] = nlohmann::json::array(
        {{{"name", "k1"}, {"source", fixture("k1.fk").string()},
          {"harness", fixture("harness.fk").string()}},
         {{"name", "k2"}, {"source", fixture("k2.fk").string()},
          {"harness", fixture("harness.fk").string()}, {"openmp", true}},
         {{"name", "k3"}, {"source", fixture("k3.fk").string()},
          {"harness", fixture("harness.fk").string()}}});
    j["levels"] = {"-O0", "-O1", "-O2", "-O3"};
    j["thread_set"] = {1, 2, 4};
    j["random_count"] = 40;
    j["model_count"] = 40;
    j["sequence_length"] = 8;
    j["fraction"] = 0.05;
    j["reps"] = 3;
    j["screen_reps"] = 1;
    j["run_timeout_ms"] = 10000;
    j["provider"] = {{"kind", "mock"}, {"mock_model", fixture("mock-sidecar.json").string()}};
    j["toolchain"] = {
        {"profile", "custom"},
        {"frontend", {ft, "--role", "frontend", "{openmp}", "{extra}", "{input}", "-o", "{output}"}},
        {"optimizer", {ft, "--role", "optimizer", "{input}", "-o", "{output}", "{passes}"}},
        {"backend", {ft, "--role", "backend", "{input}", "-o", "{output}"}},
        {"linker", {ft, "--role", "linker", "-o", "{output}", "{openmp}", "{inputs}"}},
        {"standard", {ft, "--role", "standard", "{level}", "{openmp}", "-o", "{output}", "{inputs}"}},
        {"openmp_flags", {"--openmp"}},
        {"cpu_flag", ""},
        {"fp_contract_flag", ""},
        {"tool_timeout_ms", 5000}};
    return j;
}

inline std::filesystem::path write_campaign_config(const std::filesystem::path& dir,
                                                   const nlohmann::json& doc) {
    const auto path = dir / "config.json";
    write_text(path, doc.dump(2) + "\n");
    return path;
}

} // namespace phasex::test
