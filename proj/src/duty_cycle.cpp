#include "ratbench/duty_cycle.hpp"

#include <algorithm>
#include <cmath>

#include "ratbench/error.hpp"

namespace ratbench {

namespace {

// Guards against 0.99/0.01 style representation error turning an exact
// integer into the next millisecond.
std::int64_t ceil_ms(double x) { return static_cast<std::int64_t>(std::ceil(x - 1e-6)); }

}  // namespace

std::int64_t on_air_ms_ceil(double on_air_ms) { return std::max<std::int64_t>(1, ceil_ms(on_air_ms)); }

DutyCycleLedger::DutyCycleLedger(double band_limit, std::int64_t window_ms)
    : band_limit_(band_limit), window_ms_(window_ms) {
  if (!(band_limit > 0.0 && band_limit <= 1.0))
    throw Error(ErrorCode::ConfigInvalid, "band limit must be in (0, 1]");
  if (window_ms <= 0) throw Error(ErrorCode::ConfigInvalid, "duty window must be positive");
}

void DutyCycleLedger::record(std::int64_t start_ms, std::int64_t on_air_ms) {
  if (on_air_ms <= 0) throw Error(ErrorCode::OutOfRange, "on-air time must be positive");
  if (!history_.empty() && start_ms < history_.back().end_ms())
    throw Error(ErrorCode::OutOfRange, "transmission overlaps or precedes the previous one");
  history_.push_back({start_ms, on_air_ms});
}

std::int64_t duty_next_allowed(const DutyCycleLedger& ledger, std::int64_t now_ms,
                               std::int64_t intended_on_air_ms) {
  if (intended_on_air_ms <= 0)
    throw Error(ErrorCode::OutOfRange, "intended on-air time must be positive");
  const auto& hist = ledger.history();
  if (hist.empty()) return now_ms;

  const double limit = ledger.band_limit();
  const auto window = ledger.window_ms();
  const auto dur = intended_on_air_ms;
  const TxInterval& last = hist.back();

  std::int64_t t = std::max(now_ms, last.end_ms());
  t = std::max(t, last.end_ms() + ceil_ms(last.on_air_ms * (1.0 / limit - 1.0)));

  const double budget = limit * static_cast<double>(window);
  if (static_cast<double>(dur) > budget) return t;

  // Exact-length window ending at the new packet's end: find the earliest
  // window start whose suffix of history fits into the remaining budget.
  const double room = budget - static_cast<double>(dur);
  double acc = 0.0;
  for (auto it = hist.rbegin(); it != hist.rend(); ++it) {
    if (acc + static_cast<double>(it->on_air_ms) <= room) {
      acc += static_cast<double>(it->on_air_ms);
      continue;
    }
    const double start = static_cast<double>(it->end_ms()) - (room - acc);
    t = std::max(t, ceil_ms(start + static_cast<double>(window - dur)));
    break;
  }

  // Longer windows anchored at each past start.
  double suffix = 0.0;
  for (auto it = hist.rbegin(); it != hist.rend(); ++it) {
    suffix += static_cast<double>(it->on_air_ms);
    const double needed = suffix + static_cast<double>(dur);
    if (needed <= budget) continue;
    t = std::max(t, ceil_ms(needed / limit - static_cast<double>(dur) +
                            static_cast<double>(it->start_ms)));
  }
  return t;
}

}  // namespace ratbench
