#pragma once

#include "phasex/arc4.hpp"
#include "phasex/pass_catalog.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace phasex {

/// A seed phase order labeled with the kernel it came from.
struct SeedSequence {
    std::string kernel;
    PassSequence sequence;
};

/// Weighted pass-transition graph over a catalog, with virtual START and
/// END nodes. Built from good seed sequences; sampled with edge-count
/// proportional random walks to generate new sequences that recombine the
/// training material.
///
/// Node ids are catalog indices; kStart/kEnd are virtual. Immutable after
/// build; sampling mutates only the caller-owned RNG.
class TransitionGraph {
public:
    static constexpr int kStart = -1;
    static constexpr int kEnd = -2;

    /// Counts START->p1, p_i->p_{i+1}, pn->END for every seed sequence.
    /// Throws ConfigError on an empty seed set or an empty seed sequence.
    static TransitionGraph build(const PassCatalog& catalog,
                                 const std::vector<SeedSequence>& seeds);

    /// Builds from every seed whose label differs from `excluded`.
    /// Requires `excluded` to be present and at least 2 distinct labels.
    static TransitionGraph leave_one_out(const PassCatalog& catalog,
                                         const std::vector<SeedSequence>& seeds,
                                         std::string_view excluded);

    /// Random walks from START, successors chosen with probability
    /// proportional to edge counts; a walk stops on END or at max_length.
    /// Truncated walks still count as valid sequences.
    std::vector<PassSequence> sample(std::size_t count, std::size_t max_length, Arc4& rng) const;

    std::uint64_t edge_count(int from, int to) const;
    std::size_t edge_kinds() const { return edges_.size(); }
    std::size_t node_count() const;

    /// True when the sequence is reconstructible as a START->...->END path
    /// through stored edges (the regeneration property for training seeds).
    bool can_walk(const PassSequence& seq) const;

    const std::vector<SeedSequence>& training_set() const { return training_; }
    const PassCatalog& catalog() const { return catalog_; }

    nlohmann::json to_json() const;
    static TransitionGraph from_json(const nlohmann::json& j);

private:
    TransitionGraph(PassCatalog catalog) : catalog_(std::move(catalog)) {}
    void add_sequence(const SeedSequence& seed);
    void finalize_adjacency();

    PassCatalog catalog_;
    // Ordered maps keep sampling iteration deterministic.
    std::map<std::pair<int, int>, std::uint64_t> edges_;
    std::map<int, std::vector<std::pair<int, std::uint64_t>>> adjacency_;
    std::map<int, std::uint64_t> out_totals_;
    std::vector<SeedSequence> training_;
};

} // namespace phasex
