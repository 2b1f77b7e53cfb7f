#include "ratbench/calibration.hpp"

#include <algorithm>
#include <cmath>

namespace ratbench {

CalibrationFactor calibrate_scale(std::span<const EnergyPair> pairs, Technology tech) {
  if (pairs.size() < 2)
    throw Error(ErrorCode::TooFewSamples, "calibration needs at least 2 reference pairs");
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : pairs) {
    if (!(p.device_uwh > 0.0) || !(p.reference_uwh > 0.0))
      throw Error(ErrorCode::NonPositiveEnergy, "calibration energies must be > 0");
    num += p.device_uwh * p.reference_uwh;
    den += p.device_uwh * p.device_uwh;
  }
  return CalibrationFactor{num / den, static_cast<int>(pairs.size()), tech};
}

std::vector<double> calibrated_residuals_pct(std::span<const EnergyPair> pairs,
                                             const CalibrationFactor& factor) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs)
    out.push_back(100.0 * (factor.scale * p.device_uwh - p.reference_uwh) / p.reference_uwh);
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

BoxStats residual_box_stats(std::span<const double> residuals_pct) {
  if (residuals_pct.size() < 5)
    throw Error(ErrorCode::TooFewSamples, "box statistics need at least 5 samples");
  std::vector<double> v(residuals_pct.begin(), residuals_pct.end());
  std::sort(v.begin(), v.end());

  BoxStats s;
  s.lower_quartile = quantile_sorted(v, 0.25);
  s.median = quantile_sorted(v, 0.5);
  s.upper_quartile = quantile_sorted(v, 0.75);
  const double iqr = s.upper_quartile - s.lower_quartile;
  const double lo_fence = s.lower_quartile - 1.5 * iqr;
  const double hi_fence = s.upper_quartile + 1.5 * iqr;

  s.lower_whisker = s.lower_quartile;
  s.upper_whisker = s.upper_quartile;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      s.outliers.push_back(x);
      continue;
    }
    s.lower_whisker = std::min(s.lower_whisker, x);
    s.upper_whisker = std::max(s.upper_whisker, x);
  }
  return s;
}

}  // namespace ratbench
