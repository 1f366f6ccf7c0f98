#include "itsminer/chrono_util.hpp"

#include <cctype>
#include <cstdio>

#include "itsminer/errors.hpp"

namespace itsminer {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
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

int parse_fixed_int(const std::string& s, std::size_t pos, std::size_t n) {
    if (pos + n > s.size()) throw ProtocolError("truncated timestamp: " + s);
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char c = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ProtocolError("malformed timestamp: " + s);
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace

UtcSeconds parse_iso8601(const std::string& text) {
    if (text.size() < 10) throw ProtocolError("malformed timestamp: " + text);

    int year = parse_fixed_int(text, 0, 4);
    if (text[4] != '-' || text[7] != '-')
        throw ProtocolError("malformed timestamp: " + text);
    int month = parse_fixed_int(text, 5, 2);
    int day = parse_fixed_int(text, 8, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31)
        throw ProtocolError("out-of-range date: " + text);

    int hour = 0, minute = 0, second = 0;
    std::size_t pos = 10;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
        ++pos;
        hour = parse_fixed_int(text, pos, 2);
        if (text[pos + 2] != ':') throw ProtocolError("malformed timestamp: " + text);
        minute = parse_fixed_int(text, pos + 3, 2);
        pos += 5;
        if (pos < text.size() && text[pos] == ':') {
            second = parse_fixed_int(text, pos + 1, 2);
            pos += 3;
        }
        if (hour > 23 || minute > 59 || second > 60)
            throw ProtocolError("out-of-range time: " + text);
        // truncate fractional seconds
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
    }

    std::int64_t offset_sec = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int sign = (c == '-') ? -1 : 1;
            ++pos;
            int oh = parse_fixed_int(text, pos, 2);
            pos += 2;
            if (pos < text.size() && text[pos] == ':') ++pos;
            int om = 0;
            if (pos + 2 <= text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                om = parse_fixed_int(text, pos, 2);
                pos += 2;
            }
            offset_sec = sign * (oh * 3600LL + om * 60LL);
        } else {
            throw ProtocolError("malformed timezone: " + text);
        }
    }
    if (pos != text.size()) throw ProtocolError("trailing characters in timestamp: " + text);

    std::int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second - offset_sec;
}

std::string format_iso8601(UtcSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::int64_t elapsed_days(UtcSeconds a, UtcSeconds b) {
    std::int64_t diff = b - a;
    // floor division toward negative infinity
    std::int64_t q = diff / 86400;
    if (diff % 86400 != 0 && diff < 0) --q;
    return q;
}

}  // namespace itsminer
