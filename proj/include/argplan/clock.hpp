#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace argplan {

using Timestamp = std::chrono::sys_seconds;

/// Current time used for plan and chat timestamps. Honors SOURCE_DATE_EPOCH
/// (a fixed Unix time) so command sequences produce reproducible files.
Timestamp now();

/// RFC 3339 UTC with second precision, e.g. "2024-03-01T12:00:00Z".
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Pins now() for the lifetime of the object. Not reentrant across threads.
class ScopedFixedClock {
 public:
  explicit ScopedFixedClock(Timestamp fixed);
  ~ScopedFixedClock();
  ScopedFixedClock(const ScopedFixedClock&) = delete;
  ScopedFixedClock& operator=(const ScopedFixedClock&) = delete;

 private:
  std::optional<Timestamp> previous_;
};

}  // namespace argplan
