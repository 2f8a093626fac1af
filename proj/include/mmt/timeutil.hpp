#ifndef MMT_TIMEUTIL_HPP
#define MMT_TIMEUTIL_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace mmt {

namespace detail {
// Howard Hinnant's days-from-civil; valid far beyond any plausible corpus.
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}
}  // namespace detail

/// Parses ISO-8601 timestamps ("2023-10-07T12:34:56", optional "Z",
/// "+HH:MM"/"-HH:MM" offset, optional fractional seconds which are
/// truncated) into UTC epoch seconds. Returns false on malformed input.
inline bool parse_iso8601(std::string_view s, std::int64_t& epoch_out) {
    int y, mo, d, h = 0, mi = 0, se = 0;
    int n = 0;
    std::string str(s);
    if (std::sscanf(str.c_str(), "%d-%d-%d%n", &y, &mo, &d, &n) != 3) return false;
    std::size_t i = static_cast<std::size_t>(n);
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
    if (i < str.size() && (str[i] == 'T' || str[i] == 't' || str[i] == ' ')) {
        int n2 = 0;
        if (std::sscanf(str.c_str() + i + 1, "%d:%d:%d%n", &h, &mi, &se, &n2) != 3) return false;
        i += 1 + static_cast<std::size_t>(n2);
        if (h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 60) return false;
        if (i < str.size() && str[i] == '.') {
            ++i;
            while (i < str.size() && str[i] >= '0' && str[i] <= '9') ++i;
        }
    }
    std::int64_t offset = 0;
    if (i < str.size()) {
        char c = str[i];
        if (c == 'Z' || c == 'z') {
            ++i;
        } else if (c == '+' || c == '-') {
            int oh = 0, om = 0;
            if (std::sscanf(str.c_str() + i + 1, "%2d:%2d", &oh, &om) == 2) {
                i += 6;
            } else if (std::sscanf(str.c_str() + i + 1, "%2d%2d", &oh, &om) == 2) {
                i += 5;
            } else {
                return false;
            }
            offset = (c == '+' ? 1 : -1) * (oh * 3600 + om * 60);
        }
    }
    if (i != str.size()) return false;
    epoch_out = detail::days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se - offset;
    return true;
}

inline std::string format_iso8601(std::int64_t epoch) {
    std::int64_t days = epoch / 86400;
    std::int64_t rem = epoch % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y, m, d;
    detail::civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem % 3600) / 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

/// UTC calendar day index (days since epoch); the time-series bucket.
inline std::int64_t utc_day(std::int64_t epoch) {
    std::int64_t days = epoch / 86400;
    if (epoch % 86400 < 0) days -= 1;
    return days;
}

inline std::string format_day(std::int64_t day_index) {
    int y, m, d;
    detail::civil_from_days(day_index, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

}  // namespace mmt

#endif
