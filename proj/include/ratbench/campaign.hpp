#pragma once

// Deterministic discrete-event engine. run_campaign replays the monitoring
// loop (one packet per radio, then a results report over NB-IoT) to produce
// measurement records; run_workload routes application messages through a
// policy and tallies energy and delivery.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ratbench/models.hpp"
#include "ratbench/policy.hpp"

namespace ratbench {

enum class PayloadRule : std::uint8_t { Uniform, BucketStratified };

struct PayloadSampling {
  PayloadRule rule = PayloadRule::Uniform;
  int min = 1;
  /// Defaults to the technology maximum.
  std::optional<int> max;
};

struct CampaignConfig {
  std::vector<Technology> technologies{kAllTechnologies.begin(), kAllTechnologies.end()};
  int cycles = 1;
  std::map<Technology, PayloadSampling> payload;
  /// Output power per radio; defaults to the campaign values (14/14/23 dBm).
  std::map<Technology, int> tx_power_dbm;
  Scenario scenario;
  /// Constant node speed. A mobile run without one draws each record's speed
  /// from `field_speed_range_kmh` and uses the scenario's field-mix PDR.
  std::optional<double> speed_kmh;
  std::pair<double, double> field_speed_range_kmh{1.0, 100.0};
  std::uint64_t seed = 0;
  /// Conformance mode pins Sigfox at 14 dBm and reports over NB-IoT.
  bool conformance = true;
  bool report = true;
  int report_ce_level = 0;
  std::int64_t start_epoch_ms = 1'609'459'200'000;
  std::int64_t cycle_gap_ms = 0;
  std::string record_id_prefix = "sim";

  /// Throws ConfigInvalid.
  void validate() const;
};

struct SimEvent {
  std::int64_t t_ms = 0;  // since simulation start
  std::string event_type;
  nlohmann::json details;
};

struct CampaignResult {
  std::vector<MeasurementRecord> records;
  std::vector<SimEvent> events;
  /// Report packets, kept out of every per-technology metric.
  double overhead_energy_uwh = 0.0;
};

CampaignResult run_campaign(const CampaignConfig& cfg, const Models& models = Models::shipped());

/// Config document keys mirror CampaignConfig. "model" and "pdr_table" are
/// accepted as file references for the caller to resolve; any other unknown
/// key throws UnknownField.
CampaignConfig campaign_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CampaignConfig& cfg);

nlohmann::json to_json(const SimEvent& e);
void write_event_log(std::ostream& out, const std::vector<SimEvent>& events);

struct WorkloadItem {
  std::string name;
  MessageSpec message;
  double rate_per_h = 1.0;
  double weight = 1.0;
};

struct WorkloadSpec {
  std::vector<WorkloadItem> items;
  double duration_h = 24.0;
  Context context;

  /// Throws ConfigInvalid: rates must be > 0 and weights sum to 1.
  void validate() const;
};

struct Totals {
  double energy_uwh = 0.0;
  std::int64_t bytes_sent = 0;
  std::int64_t bytes_delivered = 0;
  std::int64_t n_sent = 0;
  std::int64_t n_delivered = 0;

  /// µWh per sent byte; 0 without traffic.
  double eb() const;
  /// Delivered / sent transmissions; 0 without traffic.
  double pdr() const;
  Totals& operator+=(const Totals& o);
};

struct SimSummary {
  std::map<Technology, Totals> per_technology;
  Totals total;
  std::int64_t messages = 0;
  std::int64_t messages_delivered = 0;
  std::vector<SimEvent> events;
};

/// Messages arrive periodically per template. Each transmission's delivery is
/// drawn from a stream keyed by (message index, technology, attempt), so two
/// policies run on the same seed see common random numbers. Throws
/// NoFeasibleTechnology naming the offending template.
SimSummary run_workload(const WorkloadSpec& w, const Policy& policy, const Models& models,
                        std::uint64_t seed);

struct Comparison {
  SimSummary a;
  SimSummary b;
  /// energy(b) / energy(a).
  double savings_factor = 1.0;
};

Comparison compare_policies(const WorkloadSpec& w, const Policy& a, const Policy& b,
                            const Models& models, std::uint64_t seed);

WorkloadSpec workload_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WorkloadSpec& w);
nlohmann::json to_json(const SimSummary& s, bool include_events = false);

}  // namespace ratbench
