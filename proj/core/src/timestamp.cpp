#include "htmlphish/timestamp.hpp"

#include <cstdio>

#include "htmlphish/error.hpp"

namespace htmlphish {
namespace {

int digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) throw Error("truncated timestamp");
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') throw Error("non-digit in timestamp");
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

void expect(std::string_view s, std::size_t pos, char a, char b = '\0') {
  if (pos >= s.size() || (s[pos] != a && (b == '\0' || s[pos] != b))) {
    throw Error("malformed timestamp");
  }
}

}  // namespace

Timestamp parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  try {
    const int y = digits(s, 0, 4);
    expect(s, 4, '-');
    const int mo = digits(s, 5, 2);
    expect(s, 7, '-');
    const int d = digits(s, 8, 2);
    expect(s, 10, 'T', 't');
    const int hh = digits(s, 11, 2);
    expect(s, 13, ':');
    const int mm = digits(s, 14, 2);
    expect(s, 16, ':');
    const int ss = digits(s, 17, 2);
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      const std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) throw Error("empty fraction");
    }
    int offset_minutes = 0;
    if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
      ++pos;
    } else {
      expect(s, pos, '+', '-');
      const int sign = s[pos] == '-' ? -1 : 1;
      const int oh = digits(s, pos + 1, 2);
      expect(s, pos + 3, ':');
      const int om = digits(s, pos + 4, 2);
      if (oh > 23 || om > 59) throw Error("offset out of range");
      offset_minutes = sign * (oh * 60 + om);
      pos += 6;
    }
    if (pos != s.size()) throw Error("trailing characters");

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
      throw Error("field out of range");
    }
    // Leap seconds collapse onto the following second.
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} -
           minutes{offset_minutes};
  } catch (const Error& e) {
    throw Error("invalid RFC 3339 timestamp '" + std::string(s) + "': " + e.what());
  }
}

std::string format_rfc3339(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss<seconds> tod{ts - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

}  // namespace htmlphish
