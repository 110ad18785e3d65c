#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace htmlphish {

using Timestamp = std::chrono::sys_seconds;

// Parses an RFC 3339 date-time ("2018-11-11T08:30:00Z", optional fractional
// seconds, "Z" or a numeric offset). Fractions are truncated to seconds.
// Throws htmlphish::Error on malformed input.
Timestamp parse_rfc3339(std::string_view text);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp ts);

}  // namespace htmlphish
