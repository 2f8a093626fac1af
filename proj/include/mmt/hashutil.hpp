#ifndef MMT_HASHUTIL_HPP
#define MMT_HASHUTIL_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace mmt {

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// 128-bit content fingerprint as hex (two independent fnv streams).
/// Used as embedding-cache key and manifest input hash; not cryptographic.
inline std::string content_fingerprint(std::string_view data) {
    std::uint64_t a = fnv1a64(data);
    std::uint64_t b = fnv1a64(data, 0x84222325cbf29ce4ULL);
    char buf[33];
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[i] = digits[(a >> (60 - 4 * i)) & 0xF];
    for (int i = 0; i < 16; ++i) buf[16 + i] = digits[(b >> (60 - 4 * i)) & 0xF];
    buf[32] = '\0';
    return std::string(buf);
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[i] = digits[(v >> (60 - 4 * i)) & 0xF];
    buf[16] = '\0';
    return std::string(buf);
}

/// Parses exactly 16 lowercase/uppercase hex chars. Returns false on any
/// other input.
inline bool parse_hex64(std::string_view s, std::uint64_t& out) {
    if (s.size() != 16) return false;
    std::uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint64_t>(c - 'A' + 10);
        else return false;
    }
    out = v;
    return true;
}

}  // namespace mmt

#endif
