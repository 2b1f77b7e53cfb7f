#pragma once

// Independent reference computations the tests compare the library against.
// None of these call into ratbench; they restate each rule from its textbook
// definition in the most direct form available.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// SX1276 datasheet symbol count, evaluated in seconds and converted at the end.
inline double lora_toa_ms(int sf, int bw_hz, int cr, int preamble, bool explicit_header,
                          bool crc, bool ldro, int payload) {
  const double t_sym_s = std::pow(2.0, sf) / bw_hz;
  const int ih = explicit_header ? 0 : 1;
  const int de = ldro ? 1 : 0;
  const double num = 8.0 * payload - 4.0 * sf + 28 + 16 * (crc ? 1 : 0) - 20 * ih;
  const double den = 4.0 * (sf - 2 * de);
  const double extra = std::max(std::ceil(num / den) * (cr + 4), 0.0);
  const double n_payload = 8 + extra;
  const double t_preamble_s = (preamble + 4.25) * t_sym_s;
  return (t_preamble_s + n_payload * t_sym_s) * 1000.0;
}

// Bits on air of one Sigfox frame divided by the bit rate.
inline double sigfox_frame_ms(int payload, int overhead_bytes, int bitrate_bps) {
  const int bits = (payload + overhead_bytes) * 8;
  return 1000.0 * bits / bitrate_bps;
}

struct Interval {
  std::int64_t start;
  std::int64_t len;
};

// Worst on-air fraction over every window of length >= window_ms. The optimum
// of covered/length over such windows is attained either with both ends on
// interval boundaries, or at length exactly window_ms anchored at one
// boundary, so enumerating those candidates is exhaustive.
inline double worst_window_fraction(const std::vector<Interval>& iv, std::int64_t window_ms) {
  auto covered = [&](double a, double b) {
    double sum = 0.0;
    for (const auto& x : iv) {
      const double lo = std::max<double>(a, static_cast<double>(x.start));
      const double hi = std::min<double>(b, static_cast<double>(x.start + x.len));
      if (hi > lo) sum += hi - lo;
    }
    return sum;
  };
  const double w = static_cast<double>(window_ms);
  double worst = 0.0;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    const double s = static_cast<double>(iv[i].start);
    for (std::size_t j = i; j < iv.size(); ++j) {
      const double e = static_cast<double>(iv[j].start + iv[j].len);
      const double b1 = std::max(e, s + w);
      worst = std::max(worst, covered(s, b1) / (b1 - s));
      const double a2 = std::min(s, e - w);
      worst = std::max(worst, covered(a2, e) / (e - a2));
    }
  }
  return worst;
}

struct Rung {
  double energy;  // per attempt
  double p;       // per-attempt delivery probability
  int attempts;
  bool confirmed;
};

struct TreeResult {
  double energy = 0.0;
  double delivered = 0.0;
};

// Expectation over the full outcome tree: every attempt branches on success
// and failure; a confirmed success ends the ladder, an unconfirmed attempt
// never does.
inline TreeResult enumerate_ladder(const std::vector<Rung>& rungs) {
  TreeResult out;
  std::function<void(std::size_t, int, double, double, bool)> walk =
      [&](std::size_t rung, int attempt, double prob, double spent, bool got) {
        if (rung == rungs.size()) {
          out.energy += prob * spent;
          if (got) out.delivered += prob;
          return;
        }
        const auto& r = rungs[rung];
        if (attempt == r.attempts) {
          walk(rung + 1, 0, prob, spent, got);
          return;
        }
        const double e = spent + r.energy;
        if (r.p > 0.0) {
          if (r.confirmed) {
            out.energy += prob * r.p * e;
            out.delivered += prob * r.p;
          } else {
            walk(rung, attempt + 1, prob * r.p, e, true);
          }
        }
        if (r.p < 1.0) walk(rung, attempt + 1, prob * (1.0 - r.p), e, got);
      };
  walk(0, 0, 1.0, 0.0, false);
  return out;
}

// Order-statistic quantile with linear interpolation at (n - 1)·p, via
// selection rather than a full sort.
inline double quantile(std::vector<double> v, double p) {
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto j = static_cast<std::size_t>(h);
  const double g = h - static_cast<double>(j);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(j), v.end());
  const double lo = v[j];
  if (j + 1 >= v.size() || g == 0.0) return lo;
  const double hi = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(j) + 1, v.end());
  return lo + g * (hi - lo);
}

// Half-width of the 3-sigma normal-approximation binomial interval, in the
// same unit as p (fraction).
inline double binomial_3sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace oracle
