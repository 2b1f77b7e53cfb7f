#pragma once

#include <cstdint>
#include <vector>

namespace ratbench {

/// One past transmission, integer milliseconds on the simulation clock.
struct TxInterval {
  std::int64_t start_ms = 0;
  std::int64_t on_air_ms = 0;
  std::int64_t end_ms() const { return start_ms + on_air_ms; }
};

/// Regulatory transmit budget of one license-exempt radio. Owned by a single
/// node; entries are strictly ordered and non-overlapping.
class DutyCycleLedger {
 public:
  explicit DutyCycleLedger(double band_limit = 0.01, std::int64_t window_ms = 3'600'000);

  double band_limit() const { return band_limit_; }
  std::int64_t window_ms() const { return window_ms_; }
  const std::vector<TxInterval>& history() const { return history_; }

  /// Appends a transmission. Throws OutOfRange when it starts before the end
  /// of the previous one or has a non-positive duration.
  void record(std::int64_t start_ms, std::int64_t on_air_ms);

 private:
  double band_limit_;
  std::int64_t window_ms_;
  std::vector<TxInterval> history_;
};

/// Earliest start >= now for a transmission of `intended_on_air_ms`.
///
/// Two rules apply and the later bound wins:
///  * per-packet off-time: the previous packet of length T blocks the radio
///    for T·(1/limit − 1) after it ends;
///  * sliding window: every window of length >= window_ms that contains the
///    new packet stays within limit·length of on-air time.
/// A packet longer than limit·window_ms can never satisfy the window rule on
/// its own; only the off-time rule is applied to it.
std::int64_t duty_next_allowed(const DutyCycleLedger& ledger, std::int64_t now_ms,
                               std::int64_t intended_on_air_ms);

/// Airtime rounded up to whole milliseconds for ledger bookkeeping.
std::int64_t on_air_ms_ceil(double on_air_ms);

}  // namespace ratbench
