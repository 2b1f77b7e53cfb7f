#pragma once

// Multi-RAT selection: per-message technology choice, fragmentation over
// small-payload radios, and confirmed-delivery ladders for critical data.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ratbench/duty_cycle.hpp"
#include "ratbench/models.hpp"

namespace ratbench {

struct MessageSpec {
  int payload_bytes = 1;
  bool critical = false;
  std::optional<std::int64_t> deadline_ms;

  /// Throws ConfigInvalid unless 1 <= payload <= 1547.
  void validate() const;
};

struct Context {
  Scenario scenario;
  /// Known node speed. Absent for a mobile node means the field mix of speeds.
  std::optional<double> speed_kmh;
  /// Link state overrides. When set, energy uses this SF / CE level directly
  /// instead of the fitted context mixture.
  std::optional<int> lorawan_sf;
  std::optional<int> nbiot_ce;
  /// Budgets of the license-exempt radios; missing entries start empty at 1%.
  std::map<Technology, DutyCycleLedger> duty;
  std::int64_t now_ms = 0;

  /// Throws InvalidScenario, NegativeSpeed, ConfigInvalid (static with a
  /// non-zero speed) or ParamOutOfRange (SF / CE outside their ranges).
  void validate() const;
};

enum class Objective : std::uint8_t { MinEnergyPerDeliveredByte, MinEnergyPerByte };

std::string_view to_string(Objective o);
Objective parse_objective(std::string_view name);

struct LadderRung {
  Technology tech = Technology::LoRaWAN;
  /// Transmissions on this rung, first try included.
  int attempts = 1;
  bool confirmed = true;
};

struct Policy {
  std::string name;
  Objective objective = Objective::MinEnergyPerDeliveredByte;
  double pdr_floor = 0.0;
  bool allow_fragmentation = false;
  std::vector<LadderRung> ladder;
  /// Retries beyond the first attempt allowed on any rung.
  int max_ladder_retries_per_rung = 3;
  /// Radios the node may use.
  std::vector<Technology> technologies{kAllTechnologies.begin(), kAllTechnologies.end()};

  void validate() const;
};

/// Per-message figures of one technology.
struct Cost {
  Technology tech = Technology::LoRaWAN;
  int fragments = 1;
  double energy_uwh = 0.0;
  /// Delivery probability of the whole message (all fragments).
  std::optional<double> pdr;
  double uwh_per_byte = 0.0;
  /// energy / (pdr · payload); nullopt when pdr is unavailable.
  std::optional<double> uwh_per_delivered_byte;
  /// A fragment's PDR came from a lower bucket because its own cell is a
  /// sentinel.
  bool pdr_fallback = false;

  bool available() const { return pdr.has_value(); }
};

/// Start and end of one transaction placed at or after `t`. Duty-limited
/// radios (LoRaWAN, Sigfox) are booked in `ledgers` with the profile's summed
/// airtime; NB-IoT is licensed and starts at `t`.
struct TxSlot {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};
TxSlot place_transaction(std::map<Technology, DutyCycleLedger>& ledgers, std::int64_t t,
                            Technology tech, const AirtimeProfile& profile);

/// Timeline of one transaction as simulated: pinned SF / CE from the
/// context, else the nominal one capped by the payload.
AirtimeProfile timeline_profile(Technology tech, int payload_bytes, bool confirmed,
                                const Context& ctx, const Models& models);

/// Energy of one attempt carrying `payload_bytes` on `tech`: bucket E_b ×
/// payload plus the acknowledgement receive window when confirmed, or the
/// direct transaction energy when the context pins an SF / CE level.
double attempt_energy(Technology tech, int payload_bytes, bool confirmed, const Context& ctx,
                      const Models& models);

/// Throws Unsupported when the payload exceeds the technology maximum and
/// fragmentation is off.
Cost expected_cost(Technology tech, const MessageSpec& msg, const Context& ctx,
                   const Models& models, bool allow_fragmentation = false,
                   bool confirmed = false);

/// Costs of every allowed technology that can carry the message.
std::vector<Cost> rank_technologies(const Policy& policy, const MessageSpec& msg,
                                    const Context& ctx, const Models& models);

/// Argmin of the objective over technologies meeting payload support and the
/// PDR floor; ties go to LoRaWAN, then Sigfox, then NB-IoT. Throws
/// NoFeasibleTechnology.
Technology select_rat(const Policy& policy, const MessageSpec& msg, const Context& ctx,
                      const Models& models = Models::shipped());

struct TxStep {
  Technology tech = Technology::LoRaWAN;
  int fragment_payload_bytes = 0;
  bool confirmed = false;
  int attempts = 1;
  /// Ladder rung this step belongs to (0 for direct plans).
  int rung = 0;
  /// Start of each attempt relative to plan start, assuming every earlier
  /// attempt failed.
  std::vector<std::int64_t> attempt_offsets_ms;
};

struct TxPlan {
  std::vector<TxStep> steps;
  double expected_energy_uwh = 0.0;
  double expected_delivery_probability = 0.0;
  /// Worst-case span from plan start to the end of the last attempt.
  std::int64_t duration_ms = 0;
  bool meets_deadline = true;
  std::vector<std::string> notes;
};

/// Payload split into ceil(payload / max) fragments, all but the last at
/// the maximum size, timed against the context's duty budget.
std::vector<int> fragment_sizes(int payload_bytes, Technology tech);
TxPlan fragmentation_plan(int payload_bytes, Technology tech, const Context& ctx = {},
                          const Models& models = Models::shipped());

/// Walks the ladder. A confirmed rung stops at the first acknowledged
/// attempt; an unconfirmed rung sends all of its attempts blindly and the
/// ladder always continues past it. Rungs that cannot carry the payload are
/// skipped. Throws NoFeasibleTechnology when no rung remains, ConfigInvalid
/// when the message is not critical or the ladder is empty.
TxPlan confirmed_ladder_plan(const Policy& policy, const MessageSpec& msg, const Context& ctx,
                             const Models& models = Models::shipped());

/// Ladder plan for critical messages, otherwise the fragmentation plan of
/// select_rat's choice.
TxPlan plan_message(const Policy& policy, const MessageSpec& msg, const Context& ctx,
                    const Models& models = Models::shipped());

/// {"name", "objective", "pdr_floor", "allow_fragmentation",
///  "max_ladder_retries_per_rung", "technologies": [...],
///  "ladder": [{"tech", "retries" | "attempts", "confirmed"}]}
nlohmann::json to_json(const Policy& p);
Policy policy_from_json(const nlohmann::json& j);
Policy read_policy_file(const std::string& path);

nlohmann::json to_json(const Context& c);
Context context_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TxPlan& plan);

}  // namespace ratbench
