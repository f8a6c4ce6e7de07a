#pragma once

#include "phasex/runner.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace phasex {

/// Crash-safe campaign store. Every measured cell lands here before it is
/// used, keyed by what was measured, so an interrupted campaign resumes
/// without repeating a single measurement.
///
/// Layout under the journal directory:
///   manifest.json          campaign identity, written once
///   records/<key>.json     one completed evaluation per file (atomic)
///   index.txt              append-only key log, in completion order
///   models/<kernel>.json   fitted sequence models
///   results/<name>.json    campaign outputs (selections, summaries)
class Journal {
public:
    explicit Journal(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    /// True when the journal holds no manifest and no records.
    bool empty() const;

    void write_manifest(const nlohmann::json& manifest);
    std::optional<nlohmann::json> read_manifest() const;

    /// Measurement identity: kernel, execution variant, repetition count,
    /// and the build (stock level or the exact pass list). Phase and origin
    /// are deliberately excluded: a sequence the model regenerates must hit
    /// the same cell a random draw already measured.
    static std::string record_key(const EvaluationRecord& rec);

    bool has(const std::string& key) const;
    void store(const std::string& key, const EvaluationRecord& rec);
    EvaluationRecord load(const std::string& key) const;

    /// Keys in completion order, exactly as appended.
    std::vector<std::string> index_keys() const;

    /// Every stored record, ordered by key for determinism.
    std::vector<EvaluationRecord> all_records() const;

    void write_model(const std::string& kernel, const nlohmann::json& model);
    std::optional<nlohmann::json> read_model(const std::string& kernel) const;

    void write_result(const std::string& name, const nlohmann::json& doc);
    std::optional<nlohmann::json> read_result(const std::string& name) const;

private:
    std::filesystem::path record_path(const std::string& key) const;

    std::filesystem::path dir_;
};

} // namespace phasex
