#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace facetnet {

using Instant = std::chrono::sys_seconds;

/// Parses an RFC3339 date-time ("2022-03-02T23:29:22+00:00", "...Z",
/// fractional seconds allowed and truncated). Returns nullopt on any
/// syntax or range error.
std::optional<Instant> parse_rfc3339(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_rfc3339(Instant instant);

/// Calendar month of the instant in UTC, "YYYY-MM".
std::string utc_month(Instant instant);

} // namespace facetnet
