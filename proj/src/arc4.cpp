#include "phasex/arc4.hpp"

#include <stdexcept>
#include <utility>

namespace phasex {

Arc4::Arc4(std::string_view key) {
    if (key.empty()) throw std::invalid_argument("ARC4 key must not be empty");
    if (key.size() > 256) throw std::invalid_argument("ARC4 key longer than 256 bytes");
    for (int i = 0; i < 256; ++i) s_[static_cast<size_t>(i)] = static_cast<std::uint8_t>(i);
    std::uint8_t j = 0;
    for (int i = 0; i < 256; ++i) {
        j = static_cast<std::uint8_t>(j + s_[static_cast<size_t>(i)] +
                                      static_cast<std::uint8_t>(key[static_cast<size_t>(i) % key.size()]));
        std::swap(s_[static_cast<size_t>(i)], s_[j]);
    }
}

std::uint8_t Arc4::next_byte() {
    i_ = static_cast<std::uint8_t>(i_ + 1);
    j_ = static_cast<std::uint8_t>(j_ + s_[i_]);
    std::swap(s_[i_], s_[j_]);
    return s_[static_cast<std::uint8_t>(s_[i_] + s_[j_])];
}

std::uint32_t Arc4::next_word() {
    std::uint32_t w = 0;
    for (int k = 0; k < 4; ++k) w = (w << 8) | next_byte();
    return w;
}

std::uint32_t Arc4::next_below(std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("next_below(0)");
    if (n == 1) return 0;
    // Reject words from the incomplete top interval so every residue is
    // exactly equally likely.
    const std::uint64_t span = 1ull << 32;
    const std::uint64_t limit = span - span % n;
    for (;;) {
        std::uint64_t w = next_word();
        if (w < limit) return static_cast<std::uint32_t>(w % n);
    }
}

} // namespace phasex
