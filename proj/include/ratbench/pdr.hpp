#pragma once

// Packet delivery ratio lookups: per-bucket table by scenario, and the
// speed curve for 1-12 B payloads. Both are step functions over buckets.

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>

#include "json.hpp"
#include "ratbench/core.hpp"

namespace ratbench {

using PdrValue = std::variant<double, Sentinel>;

class PdrTable {
 public:
  /// Reference table as shipped; probabilities in [0, 1].
  static PdrTable reference();

  /// Stored value. Buckets the technology cannot carry are always
  /// Unsupported; missing cells read as Insufficient.
  PdrValue at(Technology tech, PayloadBucket bucket, Scenario scenario) const;
  /// Throws BadProbability outside [0, 1], InvalidScenario for indoor-mobile.
  void set(Technology tech, PayloadBucket bucket, Scenario scenario, PdrValue value);

 private:
  std::map<std::tuple<Technology, PayloadBucket, Scenario>, PdrValue> cells_;
};

class SpeedPdrCurve {
 public:
  static SpeedPdrCurve reference();

  double at(Technology tech, SpeedBucket bucket) const;
  void set(Technology tech, SpeedBucket bucket, double p);
  /// Mean over the three moving buckets.
  double mobile_mean(Technology tech) const;

 private:
  std::map<std::pair<Technology, SpeedBucket>, double> points_;
};

/// Throws OutOfRange unless 1 <= payload <= 1547. Payloads above the
/// technology's last fully covered bucket are Unsupported.
PdrValue pdr_lookup(const PdrTable& table, Technology tech, int payload_bytes, Scenario scenario);

/// Throws NegativeSpeed for speed < 0.
double pdr_at_speed(const SpeedPdrCurve& curve, Technology tech, double speed_kmh);

struct PdrModel {
  PdrTable table = PdrTable::reference();
  SpeedPdrCurve curve = SpeedPdrCurve::reference();
};

struct ResolvedPdr {
  double p = 0.0;
  /// Table cell the value was taken from.
  PayloadBucket source_bucket = PayloadBucket::B1_12;
  /// True when the payload's own cell held a sentinel and a lower bucket's
  /// value stood in.
  bool fallback = false;
  /// True when the speed curve shaped the value.
  bool speed_adjusted = false;
};

/// Delivery probability usable for simulation and policy decisions.
///   - nullopt when the payload exceeds the technology maximum, or no bucket
///     at or below the payload's holds a number.
///   - A sentinel cell falls back to the nearest lower bucket with a number.
///   - Mobile scenario with a known speed: 1-12 B payloads take the speed
///     curve value; larger payloads scale the table value by
///     curve(speed) / mobile_mean, clamped to [0, 1].
std::optional<ResolvedPdr> resolve_pdr(const PdrModel& model, Technology tech, int payload_bytes,
                                       Scenario scenario,
                                       std::optional<double> speed_kmh = std::nullopt);

/// {"table": {tech: {bucket: {scenario: p | "unsupported" | "insufficient"}}},
///  "speed_curve": {tech: {speed_bucket: p}}}
nlohmann::json to_json(const PdrModel& model);
/// Cells present in `j` override the reference defaults.
PdrModel pdr_model_from_json(const nlohmann::json& j);
PdrModel read_pdr_file(const std::string& path);

}  // namespace ratbench
