#pragma once

#include <cstdint>
#include <string>

namespace itsminer {

/// Seconds since the Unix epoch, always UTC.
using UtcSeconds = std::int64_t;

/// Parses an ISO-8601 timestamp ("2020-01-31T10:00:00Z",
/// "2020-01-31T10:00:00.123+0200", "2020-01-31T10:00:00+02:00", or a bare
/// date "2020-01-31") and normalizes it to UTC. Fractional seconds are
/// truncated. Throws SchemaError-free ProtocolError on malformed input.
UtcSeconds parse_iso8601(const std::string& text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(UtcSeconds t);

/// Whole elapsed days between two instants: floor((b - a) / 86400 s).
/// May be negative when b < a.
std::int64_t elapsed_days(UtcSeconds a, UtcSeconds b);

}  // namespace itsminer
