#pragma once

// Shared domain vocabulary: technologies, scenarios, buckets and the
// per-packet measurement record.
//
// Units are fixed across the project: energy in µWh, durations in
// milliseconds, power in milliwatts, speed in km/h.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ratbench/error.hpp"

namespace ratbench {

enum class Technology : std::uint8_t { LoRaWAN, Sigfox, NBIoT };

inline constexpr std::array<Technology, 3> kAllTechnologies{
    Technology::LoRaWAN, Technology::Sigfox, Technology::NBIoT};

std::string_view to_string(Technology tech);
Technology parse_technology(std::string_view name);

/// Largest application payload each radio accepts: 256 B LoRaWAN, 12 B Sigfox,
/// 1547 B NB-IoT.
int max_payload(Technology tech);

enum class Placement : std::uint8_t { Indoor, Outdoor };
enum class Mobility : std::uint8_t { Static, Mobile };

struct Scenario {
  Placement placement = Placement::Indoor;
  Mobility mobility = Mobility::Static;

  friend bool operator==(const Scenario&, const Scenario&) = default;
  friend auto operator<=>(const Scenario&, const Scenario&) = default;
};

/// The three scenarios with measured data. Indoor-mobile is never valid.
inline constexpr std::array<Scenario, 3> kScenarios{
    Scenario{Placement::Indoor, Mobility::Static},
    Scenario{Placement::Outdoor, Mobility::Static},
    Scenario{Placement::Outdoor, Mobility::Mobile}};

bool is_valid(Scenario s);
/// "static-indoor", "static-outdoor", "mobile-outdoor".
std::string to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

enum class SpeedBucket : std::uint8_t { Static, Lt10, B10To30, Gt30 };

inline constexpr std::array<SpeedBucket, 4> kSpeedBuckets{
    SpeedBucket::Static, SpeedBucket::Lt10, SpeedBucket::B10To30,
    SpeedBucket::Gt30};

/// 0 → Static, (0,10) → Lt10, [10,30] → B10To30, (30,∞) → Gt30.
SpeedBucket speed_bucket(double speed_kmh);
std::string_view to_string(SpeedBucket b);
SpeedBucket parse_speed_bucket(std::string_view name);

enum class PayloadBucket : std::uint8_t { B1_12, B12_51, B51_255, B255_1547 };

inline constexpr std::array<PayloadBucket, 4> kPayloadBuckets{
    PayloadBucket::B1_12, PayloadBucket::B12_51, PayloadBucket::B51_255,
    PayloadBucket::B255_1547};

/// Inclusive byte range covered by a bucket. A shared label boundary (12, 51,
/// 255) belongs to the lower bucket.
struct ByteRange {
  int lo;
  int hi;
};

ByteRange byte_range(PayloadBucket b);
PayloadBucket bucket_of(int payload_bytes);
std::string_view to_string(PayloadBucket b);
PayloadBucket parse_payload_bucket(std::string_view name);

/// A technology covers a bucket when the whole bucket fits under its maximum
/// payload. LoRaWAN stops at 51-255, Sigfox at 1-12.
bool bucket_supported(Technology tech, PayloadBucket b);

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct LoRaWanParams {
  int sf = 7;
  bool adr_enabled = true;
  friend bool operator==(const LoRaWanParams&, const LoRaWanParams&) = default;
};

struct SigfoxParams {
  std::optional<std::string> estimated_region;
  friend bool operator==(const SigfoxParams&, const SigfoxParams&) = default;
};

struct NbiotParams {
  int ce_level = 0;
  std::optional<double> rsrp_dbm;
  std::optional<double> sinr_db;
  std::optional<double> rsrq_db;
  std::optional<double> edrx_s;
  std::optional<double> psm_tau_s;
  friend bool operator==(const NbiotParams&, const NbiotParams&) = default;
};

using TechParams = std::variant<LoRaWanParams, SigfoxParams, NbiotParams>;

Technology technology_of(const TechParams& params);

struct MeasurementRecord {
  std::string record_id;
  Technology technology = Technology::LoRaWAN;
  std::int64_t timestamp_tx = 0;  // UTC ms
  std::optional<std::int64_t> timestamp_rx;
  int payload_bytes = 1;
  int tx_power_dbm = 14;
  double energy_uwh = 0.0;
  bool delivered = false;
  std::optional<double> rssi_dbm;
  std::optional<double> snr_db;
  std::optional<GeoPoint> position;
  double speed_kmh = 0.0;
  std::vector<GeoPoint> gateway_positions;
  Scenario scenario;
  TechParams tech_params = LoRaWanParams{};

  friend bool operator==(const MeasurementRecord&,
                         const MeasurementRecord&) = default;
};

struct ValidationError {
  ErrorCode code;
  std::string message;
};

/// Returns the first violated record invariant, or nullopt when the record is
/// well formed.
std::optional<ValidationError> validate_record(const MeasurementRecord& r);

/// Marks an aggregate or table cell that carries no number.
///   Unsupported: the technology cannot carry payloads of that bucket.
///   Insufficient: too few samples to report a value.
enum class Sentinel : std::uint8_t { Unsupported, Insufficient };

std::string_view to_string(Sentinel s);

struct AggregateCell {
  Technology technology = Technology::LoRaWAN;
  PayloadBucket bucket = PayloadBucket::B1_12;
  Scenario scenario;
  std::optional<double> pdr_pct;          // nullopt ⇒ sentinel
  std::optional<double> eb_uwh_per_byte;  // nullopt ⇒ sentinel
  Sentinel sentinel = Sentinel::Insufficient;
  std::int64_t n_sent = 0;
  std::int64_t n_received = 0;
  double energy_uwh_sum = 0.0;
  std::int64_t bytes_sum = 0;
};

inline constexpr int kDefaultMinSamples = 10;

// Unit conversions. mW·ms = µJ; 1 µWh = 3600 µJ.
constexpr double mw_ms_to_uwh(double mw_ms) { return mw_ms / 3600.0; }
constexpr double uwh_to_mw_ms(double uwh) { return uwh * 3600.0; }

}  // namespace ratbench
