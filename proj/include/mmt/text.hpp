#ifndef MMT_TEXT_HPP
#define MMT_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace mmt {

/// Decodes one UTF-8 code point at byte offset i, advancing i.
/// Malformed bytes are consumed one at a time and returned as U+FFFD.
inline char32_t utf8_next(std::string_view s, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        ++i;
        return c;
    }
    int len = 0;
    char32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
        len = 2;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        len = 3;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        len = 4;
        cp = c & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

inline void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/// ASCII + Latin-1 case folding. Enough for the German-heavy corpora this
/// targets; code points outside Latin-1 pass through unchanged.
inline char32_t fold_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    return cp;
}

namespace detail {
// Word characters: ASCII alphanumerics plus any non-ASCII code point that
// is not obviously punctuation/whitespace. Full Unicode categories would
// need ICU; these ranges cover the typographic punctuation that actually
// shows up in social-media text (NBSP block, general punctuation, CJK
// punctuation, fullwidth forms).
inline bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp >= 0xA0 && cp <= 0xBF) return false;
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x206F) return false;
    if (cp >= 0x2E00 && cp <= 0x2E7F) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
    if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
    return true;
}
}  // namespace detail

/// Unicode-ish word tokenizer used for c-TF-IDF: lowercased word tokens of
/// at least min_len code points. No stopword list by default (multilingual
/// corpora); pass a set to filter.
inline std::vector<std::string> tokenize(std::string_view text, std::size_t min_len = 2,
                                         const std::unordered_set<std::string>* stopwords = nullptr) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t current_len = 0;
    std::size_t i = 0;
    auto flush = [&] {
        if (current_len >= min_len && (!stopwords || !stopwords->count(current))) {
            tokens.push_back(current);
        }
        current.clear();
        current_len = 0;
    };
    while (i < text.size()) {
        char32_t cp = utf8_next(text, i);
        if (detail::is_word_char(cp)) {
            utf8_append(current, fold_lower(cp));
            ++current_len;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && static_cast<unsigned char>(s[i]) <= ' ') ++i;
        std::size_t start = i;
        while (i < s.size() && static_cast<unsigned char>(s[i]) > ' ') ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char a = s[i], b = prefix[i];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a + 0x20);
        if (b >= 'A' && b <= 'Z') b = static_cast<char>(b + 0x20);
        if (a != b) return false;
    }
    return true;
}

}  // namespace mmt

#endif
