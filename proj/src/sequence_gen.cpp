#include "phasex/sequence_gen.hpp"

#include "phasex/errors.hpp"

namespace phasex {

std::vector<PassSequence> generate_random(const PassCatalog& catalog,
                                          std::size_t count,
                                          std::size_t length,
                                          Arc4& rng) {
    if (catalog.size() == 0) throw ConfigError("cannot generate over an empty catalog");
    if (length == 0) throw ConfigError("sequence length must be positive");
    std::vector<PassSequence> out;
    out.reserve(count);
    const auto pool = static_cast<std::uint32_t>(catalog.size());
    for (std::size_t c = 0; c < count; ++c) {
        PassSequence seq;
        seq.origin = SequenceOrigin::random;
        seq.items.reserve(length);
        for (std::size_t p = 0; p < length; ++p) seq.items.push_back(rng.next_below(pool));
        out.push_back(std::move(seq));
    }
    return out;
}

} // namespace phasex
