#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace bookctl {

// FNV-1a, used for content hashes in file headers. Stable across platforms,
// unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64_mix(std::uint64_t h, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xffULL;
        h *= 1099511628211ULL;
    }
    return h;
}

struct IntVectorHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (int x : v) h = fnv1a64_mix(h, static_cast<std::uint64_t>(x));
        return static_cast<std::size_t>(h);
    }
};

}  // namespace bookctl
