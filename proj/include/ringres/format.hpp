#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace ringres {

// Shortest round-trip decimal form, locale-independent. Used for every
// number written to CSV or manifest files so that emitted artifacts are
// byte-stable across runs and platforms.
inline std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(long long v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(int v) { return fmt(static_cast<long long>(v)); }
inline std::string fmt(std::uint64_t v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// FNV-1a, used to fingerprint configurations.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace ringres
