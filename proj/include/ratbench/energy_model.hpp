#pragma once

// Fitted per-packet energy model. One fit per (technology, scenario) holds a
// power profile plus, per payload bucket, a mixture over radio contexts
// (LoRa SF or NB-IoT CE level) standing in for the link conditions the node
// saw in that bucket. Bucket E_b is Σ energy / Σ bytes over uniformly
// distributed payloads of the bucket.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ratbench/core.hpp"
#include "ratbench/energy.hpp"
#include "ratbench/rng.hpp"

namespace ratbench {

/// Probability per context value. Weights are positive and sum to 1.
using ContextMixture = std::map<int, double>;

struct ScenarioFit {
  Technology technology = Technology::LoRaWAN;
  Scenario scenario;
  PowerProfile power;
  /// Multiplier applied to the prior p_tx table.
  double tx_scale = 1.0;
  /// NB-IoT only: airtime multiplier per CE level, {1, r, r²}.
  std::array<double, 3> ce_multiplier{1.0, 2.0, 4.0};
  std::array<ContextMixture, 4> mixture;
  std::array<std::optional<double>, 4> target_eb;
  std::array<std::optional<double>, 4> fitted_eb;
  /// RMS of ln(fitted) − ln(target) over the fitted buckets.
  double residual_rms = 0.0;
  bool underdetermined = false;
  std::vector<std::string> notes;
};

struct EnergyModel {
  RadioTimings timings;
  std::map<std::pair<Technology, Scenario>, ScenarioFit> fits;
  std::string fitted_at;

  /// Fit for the pair, or the unfitted prior (nominal context, default power)
  /// when the model has none.
  const ScenarioFit& fit(Technology tech, Scenario scenario) const;
  /// RMS over every fitted cell of every fit.
  double residual_rms() const;
};

/// Context used when nothing else is known: SF9 for LoRaWAN, CE0 for NB-IoT.
int nominal_context(Technology tech);

/// Unfitted prior for one pair.
ScenarioFit prior_fit(Technology tech, Scenario scenario);

/// Fits every (technology, scenario) with at least one numeric E_b target.
/// Throws Underdetermined when a technology present in `targets` has no
/// numeric E_b cell at all.
EnergyModel fit_power_profiles(const std::vector<AggregateCell>& targets,
                               const RadioTimings& timings = {});

/// Model fitted to the built-in reference table, computed once.
const EnergyModel& shipped_model();

/// Energy of one transaction in an explicit context (SF or CE level).
double packet_energy(const EnergyModel& model, Technology tech, Scenario scenario,
                     int payload_bytes, int context, bool confirmed = false,
                     std::optional<int> tx_power_dbm = std::nullopt);

/// Mixture used for a payload: the fit's bucket mixture.
const ContextMixture& context_mixture(const ScenarioFit& fit, int payload_bytes);

/// Expectation of packet_energy over the bucket's context mixture.
double expected_packet_energy(const EnergyModel& model, Technology tech, Scenario scenario,
                              int payload_bytes, bool confirmed = false);

/// Model E_b of a bucket: Σ expected energy / Σ bytes over the bucket's
/// payloads up to the technology maximum.
double bucket_eb(const EnergyModel& model, Technology tech, Scenario scenario,
                 PayloadBucket bucket);

/// Draws a context from the payload's bucket mixture.
std::pair<int, Xoshiro256> sample_context(const ScenarioFit& fit, int payload_bytes,
                                          Xoshiro256 rng);

nlohmann::json to_json(const EnergyModel& model);
EnergyModel energy_model_from_json(const nlohmann::json& j);
void write_model_file(const std::string& path, const EnergyModel& model);
EnergyModel read_model_file(const std::string& path);

nlohmann::json to_json(const RadioTimings& t);
RadioTimings radio_timings_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PowerProfile& p);
PowerProfile power_profile_from_json(const nlohmann::json& j);

}  // namespace ratbench
