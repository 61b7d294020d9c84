#pragma once

#include <string>
#include <string_view>

#include "star/raster.hpp"

namespace star {

/// Parses "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS[Z]" as UTC.
Timestamp parse_utc(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(Timestamp t);

/// "YYYY-MM-DD".
std::string format_date(Timestamp t);

/// Inclusive [start, end] acquisition window.
struct DateWindow {
  Timestamp start{};
  Timestamp end{};

  bool contains(Timestamp t) const { return t >= start && t <= end; }
};

/// "START/END" (dates or date-times; a bare end date covers that whole day) or a single
/// date D meaning [D - window_days, end of D].
DateWindow parse_window(std::string_view text, int window_days);

}  // namespace star
