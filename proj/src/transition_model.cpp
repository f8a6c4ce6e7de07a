#include "phasex/transition_model.hpp"

#include "phasex/errors.hpp"

#include <algorithm>
#include <set>

namespace phasex {

void TransitionGraph::add_sequence(const SeedSequence& seed) {
    if (seed.sequence.items.empty())
        throw ConfigError("seed sequence for \"" + seed.kernel + "\" is empty");
    int prev = kStart;
    for (std::size_t idx : seed.sequence.items) {
        if (idx >= catalog_.size())
            throw ConfigError("seed sequence for \"" + seed.kernel + "\" does not resolve in catalog");
        edges_[{prev, static_cast<int>(idx)}]++;
        prev = static_cast<int>(idx);
    }
    edges_[{prev, kEnd}]++;
    training_.push_back(seed);
}

void TransitionGraph::finalize_adjacency() {
    adjacency_.clear();
    out_totals_.clear();
    for (const auto& [edge, count] : edges_) {
        adjacency_[edge.first].emplace_back(edge.second, count);
        out_totals_[edge.first] += count;
    }
}

TransitionGraph TransitionGraph::build(const PassCatalog& catalog,
                                       const std::vector<SeedSequence>& seeds) {
    if (seeds.empty()) throw ConfigError("model build requires at least one seed sequence");
    TransitionGraph g(catalog);
    for (const auto& seed : seeds) g.add_sequence(seed);
    g.finalize_adjacency();
    return g;
}

TransitionGraph TransitionGraph::leave_one_out(const PassCatalog& catalog,
                                               const std::vector<SeedSequence>& seeds,
                                               std::string_view excluded) {
    std::set<std::string> labels;
    for (const auto& s : seeds) labels.insert(s.kernel);
    if (labels.size() < 2)
        throw ConfigError("leave-one-out requires at least 2 distinct kernel labels");
    if (!labels.count(std::string(excluded)))
        throw ConfigError("leave-one-out label not present: " + std::string(excluded));
    std::vector<SeedSequence> kept;
    for (const auto& s : seeds)
        if (s.kernel != excluded) kept.push_back(s);
    return build(catalog, kept);
}

std::vector<PassSequence> TransitionGraph::sample(std::size_t count,
                                                  std::size_t max_length,
                                                  Arc4& rng) const {
    if (edges_.empty()) throw ConfigError("cannot sample from an empty graph");
    if (max_length == 0) throw ConfigError("max_length must be positive");
    std::vector<PassSequence> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        PassSequence seq;
        seq.origin = SequenceOrigin::model;
        int node = kStart;
        while (seq.items.size() < max_length) {
            const auto& succ = adjacency_.at(node);
            const std::uint64_t total = out_totals_.at(node);
            std::uint64_t r = rng.next_below(static_cast<std::uint32_t>(total));
            int next = kEnd;
            for (const auto& [to, cnt] : succ) {
                if (r < cnt) {
                    next = to;
                    break;
                }
                r -= cnt;
            }
            if (next == kEnd) break;
            seq.items.push_back(static_cast<std::size_t>(next));
            node = next;
        }
        out.push_back(std::move(seq));
    }
    return out;
}

std::uint64_t TransitionGraph::edge_count(int from, int to) const {
    auto it = edges_.find({from, to});
    return it == edges_.end() ? 0 : it->second;
}

std::size_t TransitionGraph::node_count() const {
    std::set<int> nodes;
    for (const auto& [edge, count] : edges_) {
        (void)count;
        nodes.insert(edge.first);
        nodes.insert(edge.second);
    }
    return nodes.size();
}

bool TransitionGraph::can_walk(const PassSequence& seq) const {
    if (seq.items.empty()) return false;
    int prev = kStart;
    for (std::size_t idx : seq.items) {
        if (edge_count(prev, static_cast<int>(idx)) == 0) return false;
        prev = static_cast<int>(idx);
    }
    return edge_count(prev, kEnd) > 0;
}

namespace {

std::string node_name(const PassCatalog& cat, int node) {
    if (node == TransitionGraph::kStart) return "START";
    if (node == TransitionGraph::kEnd) return "END";
    return cat.at(static_cast<std::size_t>(node)).name;
}

int node_from_name(const PassCatalog& cat, const std::string& name) {
    if (name == "START") return TransitionGraph::kStart;
    if (name == "END") return TransitionGraph::kEnd;
    auto idx = cat.find(name);
    if (!idx) throw ConfigError("graph node not in catalog: " + name);
    return static_cast<int>(*idx);
}

} // namespace

nlohmann::json TransitionGraph::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["catalog"] = catalog_.names();
    j["source_label"] = catalog_.source_label();
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [edge, count] : edges_) {
        edges.push_back({node_name(catalog_, edge.first), node_name(catalog_, edge.second), count});
    }
    j["edges"] = std::move(edges);
    nlohmann::json training = nlohmann::json::array();
    for (const auto& seed : training_) {
        training.push_back({{"kernel", seed.kernel},
                            {"sequence", render_sequence(catalog_, seed.sequence)}});
    }
    j["training"] = std::move(training);
    return j;
}

TransitionGraph TransitionGraph::from_json(const nlohmann::json& j) {
    PassCatalog cat = PassCatalog::from_names(j.at("catalog").get<std::vector<std::string>>(),
                                              j.value("source_label", std::string("graph")));
    TransitionGraph g(cat);
    for (const auto& e : j.at("edges")) {
        int from = node_from_name(cat, e.at(0).get<std::string>());
        int to = node_from_name(cat, e.at(1).get<std::string>());
        g.edges_[{from, to}] = e.at(2).get<std::uint64_t>();
    }
    for (const auto& t : j.at("training")) {
        SeedSequence seed;
        seed.kernel = t.at("kernel").get<std::string>();
        seed.sequence.origin = SequenceOrigin::model;
        for (const auto& name : t.at("sequence")) {
            auto idx = cat.find(name.get<std::string>());
            if (!idx) throw ConfigError("training sequence pass not in catalog");
            seed.sequence.items.push_back(*idx);
        }
        g.training_.push_back(std::move(seed));
    }
    g.finalize_adjacency();
    return g;
}

} // namespace phasex
