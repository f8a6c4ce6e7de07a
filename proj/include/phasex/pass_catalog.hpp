#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phasex {

/// One optimizer pass, treated as an opaque token (e.g. "-licm").
struct PassId {
    std::string name;
    std::size_t index = 0;
};

/// The ordered pool of passes a campaign explores over. Immutable after
/// load and safe to share across threads.
class PassCatalog {
public:
    /// Loads a catalog file: UTF-8, one pass name per line, '#' comment
    /// lines ignored, surrounding whitespace trimmed, blank lines skipped.
    /// Throws Error on I/O failure, ConfigError on duplicate/malformed
    /// names or an empty catalog.
    static PassCatalog load(const std::filesystem::path& path);

    static PassCatalog from_names(std::vector<std::string> names, std::string source_label);

    const std::vector<PassId>& passes() const { return passes_; }
    std::size_t size() const { return passes_.size(); }
    const PassId& at(std::size_t index) const { return passes_.at(index); }
    std::optional<std::size_t> find(std::string_view name) const;
    const std::string& source_label() const { return source_label_; }

    /// The pass names in catalog order (what render over the identity
    /// sequence of the full catalog would produce).
    std::vector<std::string> names() const;

private:
    std::vector<PassId> passes_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::string source_label_;
};

enum class SequenceOrigin { random, model, standard_level, manual };

std::string_view to_string(SequenceOrigin origin);
SequenceOrigin sequence_origin_from_string(std::string_view s);

/// An ordered phase order over a catalog; repetitions allowed, empty means
/// identity optimization. Items are catalog indices.
struct PassSequence {
    std::vector<std::size_t> items;
    SequenceOrigin origin = SequenceOrigin::manual;

    bool operator==(const PassSequence&) const = default;
};

/// Pass names in order, ready to append to the optimizer command line.
/// Throws ConfigError if any item does not resolve in the catalog.
std::vector<std::string> render_sequence(const PassCatalog& catalog, const PassSequence& seq);

} // namespace phasex
