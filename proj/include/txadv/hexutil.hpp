#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "txadv/rng.hpp"

namespace txadv {

inline bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

inline std::string_view strip_0x(std::string_view s) {
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
    return s;
}

// Payload length in bytes; an odd trailing nibble counts as one byte.
inline std::uint64_t hex_byte_length(std::string_view hex) {
    const auto payload = strip_0x(hex);
    return (payload.size() + 1) / 2;
}

// Integer value of the first 8 hex characters after "0x"; 0 when the
// payload is shorter than 8 characters or malformed.
inline std::uint64_t hex_prefix_value(std::string_view hex) {
    const auto payload = strip_0x(hex);
    if (payload.size() < 8) return 0;
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        const char c = payload[i];
        std::uint64_t d = 0;
        if (c >= '0' && c <= '9') d = static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') d = static_cast<std::uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') d = static_cast<std::uint64_t>(c - 'A' + 10);
        else return 0;
        v = v * 16 + d;
    }
    return v;
}

inline std::string random_hex(Rng& rng, std::size_t n_chars) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + n_chars);
    for (std::size_t i = 0; i < n_chars; ++i) out.push_back(kDigits[rng.below(16)]);
    return out;
}

inline std::string random_hex_address(Rng& rng) { return random_hex(rng, 40); }

}  // namespace txadv
