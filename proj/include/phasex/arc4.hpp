#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace phasex {

/// ARC4-keystream pseudo-random number generator.
///
/// The exploration must be exactly replayable from a recorded seed string, so
/// every stochastic step in the framework draws from one of these instead of
/// the C++ standard engines (whose distributions are not bit-stable across
/// library implementations).
///
/// Integer draws consume 4 keystream bytes per candidate word (big-endian)
/// and use rejection sampling, so next_below(n) is exactly uniform over
/// [0, n) for every n.
class Arc4 {
public:
    /// Initializes via the standard ARC4 key schedule.
    /// Throws std::invalid_argument unless 1 <= key length <= 256.
    explicit Arc4(std::string_view key);

    std::uint8_t next_byte();

    /// 4 keystream bytes, big-endian.
    std::uint32_t next_word();

    /// Uniform draw in [0, n); n >= 1. Consumes at least one word, except
    /// n == 1 which returns 0 without touching the keystream.
    std::uint32_t next_below(std::uint32_t n);

    /// Internal permutation, exposed for invariant checks.
    const std::array<std::uint8_t, 256>& permutation() const { return s_; }

private:
    std::array<std::uint8_t, 256> s_{};
    std::uint8_t i_ = 0;
    std::uint8_t j_ = 0;
};

} // namespace phasex
