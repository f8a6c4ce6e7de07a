#pragma once

#include "phasex/arc4.hpp"
#include "phasex/pass_catalog.hpp"

#include <cstddef>
#include <vector>

namespace phasex {

/// Uniform random phase orders: `count` sequences of exactly `length`
/// passes, each position drawn independently and uniformly from the
/// catalog. Duplicates across the batch are allowed. Deterministic for a
/// given (catalog, count, length, rng seed).
std::vector<PassSequence> generate_random(const PassCatalog& catalog,
                                          std::size_t count,
                                          std::size_t length,
                                          Arc4& rng);

} // namespace phasex
