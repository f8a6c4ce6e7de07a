#include "phasex/pass_catalog.hpp"

#include "phasex/errors.hpp"
#include "phasex/text_util.hpp"

#include <sstream>

namespace phasex {

PassCatalog PassCatalog::load(const std::filesystem::path& path) {
    std::string content = read_text_file(path);
    std::vector<std::string> names;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        std::string token = trim(line);
        if (token.empty() || token[0] == '#') continue;
        names.push_back(std::move(token));
    }
    return from_names(std::move(names), path.filename().string());
}

PassCatalog PassCatalog::from_names(std::vector<std::string> names, std::string source_label) {
    if (names.empty()) throw ConfigError("catalog is empty: " + source_label);
    PassCatalog cat;
    cat.source_label_ = std::move(source_label);
    cat.passes_.reserve(names.size());
    for (auto& name : names) {
        if (name.empty() || name[0] != '-')
            throw ConfigError("pass name must begin with '-': \"" + name + "\" in " + cat.source_label_);
        auto [it, inserted] = cat.by_name_.emplace(name, cat.passes_.size());
        if (!inserted)
            throw ConfigError("duplicate pass name \"" + name + "\" in " + cat.source_label_);
        cat.passes_.push_back(PassId{std::move(name), cat.passes_.size()});
        (void)it;
    }
    return cat;
}

std::optional<std::size_t> PassCatalog::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> PassCatalog::names() const {
    std::vector<std::string> out;
    out.reserve(passes_.size());
    for (const auto& p : passes_) out.push_back(p.name);
    return out;
}

std::string_view to_string(SequenceOrigin origin) {
    switch (origin) {
    case SequenceOrigin::random: return "random";
    case SequenceOrigin::model: return "model";
    case SequenceOrigin::standard_level: return "standard_level";
    case SequenceOrigin::manual: return "manual";
    }
    return "manual";
}

SequenceOrigin sequence_origin_from_string(std::string_view s) {
    if (s == "random") return SequenceOrigin::random;
    if (s == "model") return SequenceOrigin::model;
    if (s == "standard_level") return SequenceOrigin::standard_level;
    if (s == "manual") return SequenceOrigin::manual;
    throw ConfigError("unknown sequence origin: " + std::string(s));
}

std::vector<std::string> render_sequence(const PassCatalog& catalog, const PassSequence& seq) {
    std::vector<std::string> tokens;
    tokens.reserve(seq.items.size());
    for (std::size_t idx : seq.items) {
        if (idx >= catalog.size())
            throw ConfigError("sequence item " + std::to_string(idx) +
                              " outside catalog of " + std::to_string(catalog.size()));
        tokens.push_back(catalog.at(idx).name);
    }
    return tokens;
}

} // namespace phasex
