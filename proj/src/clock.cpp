#include "argplan/clock.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace argplan {
namespace {

std::mutex g_clock_mutex;
std::optional<Timestamp> g_fixed;

std::optional<Timestamp> epoch_from_env() {
  const char* raw = std::getenv("SOURCE_DATE_EPOCH");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  long long secs = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0') return std::nullopt;
  return Timestamp{std::chrono::seconds{secs}};
}

}  // namespace

Timestamp now() {
  {
    std::lock_guard lock(g_clock_mutex);
    if (g_fixed) return *g_fixed;
  }
  if (auto env = epoch_from_env()) return *env;
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  if (text.size() != 20) return std::nullopt;
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0, s = 0;
  char tail = 0;
  const std::string copy(text);
  if (std::sscanf(copy.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail) != 7 ||
      tail != 'Z') {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

ScopedFixedClock::ScopedFixedClock(Timestamp fixed) {
  std::lock_guard lock(g_clock_mutex);
  previous_ = g_fixed;
  g_fixed = fixed;
}

ScopedFixedClock::~ScopedFixedClock() {
  std::lock_guard lock(g_clock_mutex);
  g_fixed = previous_;
}

}  // namespace argplan
