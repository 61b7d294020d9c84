#include "star/time.hpp"

#include <cstdio>
#include <string>

#include "star/error.hpp"

namespace star {

namespace {

using namespace std::chrono;

bool parse_parts(std::string_view text, Timestamp& out, bool& has_time) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const std::string str(text);
  int consumed = 0;
  has_time = false;
  if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &consumed) == 6) {
    has_time = true;
    std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
    if (!(rest.empty() || rest == "Z")) return false;
  } else if (std::sscanf(str.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) == 3) {
    if (static_cast<std::size_t>(consumed) != text.size()) return false;
  } else {
    return false;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return false;
  out = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return true;
}

}  // namespace

Timestamp parse_utc(std::string_view text) {
  Timestamp t;
  bool has_time = false;
  if (!parse_parts(text, t, has_time)) {
    fail(ErrorKind::parameter, "invalid UTC date-time '" + std::string(text) + "'");
  }
  return t;
}

std::string format_utc(Timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_date(Timestamp t) { return format_utc(t).substr(0, 10); }

DateWindow parse_window(std::string_view text, int window_days) {
  using namespace std::chrono;
  const auto end_of = [](std::string_view s) {
    Timestamp t;
    bool has_time = false;
    if (!parse_parts(s, t, has_time)) fail(ErrorKind::config, "invalid date in window '" + std::string(s) + "'");
    return has_time ? t : t + days{1} - seconds{1};
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    const Timestamp end = end_of(text);
    const Timestamp start = floor<days>(end) - days{window_days};
    return {start, end};
  }
  DateWindow w{parse_utc(text.substr(0, slash)), end_of(text.substr(slash + 1))};
  require(w.start <= w.end, ErrorKind::config, "window start is after its end: '" + std::string(text) + "'");
  return w;
}

}  // namespace star
