#include "facetnet/timestamp.hpp"

#include <cstdio>

namespace facetnet {

namespace {

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > text.size())
        return false;
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9')
            return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

bool expect(std::string_view text, std::size_t pos, char c) {
    return pos < text.size() && text[pos] == c;
}

} // namespace

std::optional<Instant> parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_digits(text, 0, 4, y) || !expect(text, 4, '-') || !read_digits(text, 5, 2, mo) ||
        !expect(text, 7, '-') || !read_digits(text, 8, 2, d))
        return std::nullopt;
    if (text.size() < 11 || (text[10] != 'T' && text[10] != 't' && text[10] != ' '))
        return std::nullopt;
    if (!read_digits(text, 11, 2, h) || !expect(text, 13, ':') || !read_digits(text, 14, 2, mi) ||
        !expect(text, 16, ':') || !read_digits(text, 17, 2, s))
        return std::nullopt;
    std::size_t pos = 19;
    if (expect(text, pos, '.')) {
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9')
            ++pos;
        if (pos == start)
            return std::nullopt;
    }
    int offset_minutes = 0;
    if (expect(text, pos, 'Z') || expect(text, pos, 'z')) {
        ++pos;
    } else if (expect(text, pos, '+') || expect(text, pos, '-')) {
        const int sign = text[pos] == '-' ? -1 : 1;
        int oh = 0, om = 0;
        if (!read_digits(text, pos + 1, 2, oh) || !expect(text, pos + 3, ':') ||
            !read_digits(text, pos + 4, 2, om) || oh > 23 || om > 59)
            return std::nullopt;
        offset_minutes = sign * (oh * 60 + om);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != text.size())
        return std::nullopt;

    const year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    // Leap seconds (ss = 60) are permitted by RFC3339 and folded into the next second.
    if (!date.ok() || h > 23 || mi > 59 || s > 60)
        return std::nullopt;
    const auto local = sys_days{date} + hours{h} + minutes{mi} + seconds{s};
    return time_point_cast<seconds>(local - minutes{offset_minutes});
}

std::string format_rfc3339(Instant instant) {
    using namespace std::chrono;
    const auto day_point = floor<days>(instant);
    const year_month_day date{day_point};
    const hh_mm_ss<seconds> tod{instant - day_point};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                  static_cast<long long>(tod.hours().count()), static_cast<long long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
    return buf;
}

std::string utc_month(Instant instant) {
    using namespace std::chrono;
    const year_month_day date{floor<days>(instant)};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(date.year()), static_cast<unsigned>(date.month()));
    return buf;
}

} // namespace facetnet
