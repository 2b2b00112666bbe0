#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mathgen {

// 64-bit FNV-1a. Stable across platforms and builds, which is what content
// ids, catalog checksums, and request fingerprints need. Not a cryptographic
// hash and not used as one.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_hex16(std::uint64_t value);

inline std::string content_hash(std::string_view bytes) { return to_hex16(fnv1a64(bytes)); }

}  // namespace mathgen
