#pragma once

// Coulomb-counter calibration against a reference power analyzer, and the
// box-plot summary of the residual error that remains afterwards.

#include <span>
#include <utility>
#include <vector>

#include "ratbench/core.hpp"

namespace ratbench {

struct CalibrationFactor {
  double scale = 1.0;
  int n_samples = 0;
  Technology technology = Technology::LoRaWAN;
};

struct EnergyPair {
  double device_uwh;
  double reference_uwh;
};

/// Least-squares gain through the origin: Σ(device·reference) / Σ(device²).
/// Throws TooFewSamples below two pairs, NonPositiveEnergy on any value <= 0.
CalibrationFactor calibrate_scale(std::span<const EnergyPair> pairs,
                                  Technology tech = Technology::LoRaWAN);

/// Percent error of each calibrated device reading against its reference.
std::vector<double> calibrated_residuals_pct(std::span<const EnergyPair> pairs,
                                             const CalibrationFactor& factor);

struct BoxStats {
  double median = 0.0;
  double lower_quartile = 0.0;
  double upper_quartile = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::vector<double> outliers;  // ascending
};

/// Quartiles by linear interpolation between order statistics (position
/// (n−1)·p); whiskers at the most extreme samples within 1.5·IQR of the
/// quartiles; everything beyond is an outlier. Needs at least 5 samples.
BoxStats residual_box_stats(std::span<const double> residuals_pct);

}  // namespace ratbench
