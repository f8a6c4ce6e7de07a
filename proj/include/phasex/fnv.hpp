#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace phasex {

/// 64-bit FNV-1a over a byte string. Used for content keys (journal record
/// names, fixture cost derivation), not for anything adversarial.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// fnv1a64 rendered as a fixed-width lowercase hex token.
std::string fnv1a64_hex(std::string_view data);

} // namespace phasex
