#include "ratbench/core.hpp"

#include <string>

namespace ratbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PayloadExceedsMax: return "PayloadExceedsMax";
    case ErrorCode::PayloadTooSmall: return "PayloadTooSmall";
    case ErrorCode::NegativeEnergy: return "NegativeEnergy";
    case ErrorCode::NegativeSpeed: return "NegativeSpeed";
    case ErrorCode::RxWithoutDelivery: return "RxWithoutDelivery";
    case ErrorCode::TagMismatch: return "TagMismatch";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::LdroRequired: return "LdroRequired";
    case ErrorCode::BadCeLevel: return "BadCeLevel";
    case ErrorCode::UnknownTxPower: return "UnknownTxPower";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonPositiveEnergy: return "NonPositiveEnergy";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::NoFeasibleTechnology: return "NoFeasibleTechnology";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Technology tech) {
  switch (tech) {
    case Technology::LoRaWAN: return "LoRaWAN";
    case Technology::Sigfox: return "Sigfox";
    case Technology::NBIoT: return "NB-IoT";
  }
  return "?";
}

Technology parse_technology(std::string_view name) {
  if (name == "LoRaWAN" || name == "lorawan") return Technology::LoRaWAN;
  if (name == "Sigfox" || name == "sigfox") return Technology::Sigfox;
  if (name == "NB-IoT" || name == "NBIoT" || name == "nbiot" || name == "nb-iot")
    return Technology::NBIoT;
  throw Error(ErrorCode::ParseError,
              "unknown technology '" + std::string(name) + "'");
}

int max_payload(Technology tech) {
  switch (tech) {
    case Technology::LoRaWAN: return 256;
    case Technology::Sigfox: return 12;
    case Technology::NBIoT: return 1547;
  }
  return 0;
}

bool is_valid(Scenario s) {
  return !(s.placement == Placement::Indoor && s.mobility == Mobility::Mobile);
}

std::string to_string(Scenario s) {
  std::string out = s.mobility == Mobility::Static ? "static" : "mobile";
  out += s.placement == Placement::Indoor ? "-indoor" : "-outdoor";
  return out;
}

Scenario parse_scenario(std::string_view name) {
  if (name == "static-indoor") return {Placement::Indoor, Mobility::Static};
  if (name == "static-outdoor") return {Placement::Outdoor, Mobility::Static};
  if (name == "mobile-outdoor") return {Placement::Outdoor, Mobility::Mobile};
  if (name == "mobile-indoor")
    throw Error(ErrorCode::InvalidScenario, "indoor-mobile is not a valid scenario");
  throw Error(ErrorCode::ParseError, "unknown scenario '" + std::string(name) + "'");
}

SpeedBucket speed_bucket(double speed_kmh) {
  if (!(speed_kmh >= 0.0))
    throw Error(ErrorCode::NegativeSpeed, "speed must be non-negative");
  if (speed_kmh == 0.0) return SpeedBucket::Static;
  if (speed_kmh < 10.0) return SpeedBucket::Lt10;
  if (speed_kmh <= 30.0) return SpeedBucket::B10To30;
  return SpeedBucket::Gt30;
}

std::string_view to_string(SpeedBucket b) {
  switch (b) {
    case SpeedBucket::Static: return "static";
    case SpeedBucket::Lt10: return "lt10";
    case SpeedBucket::B10To30: return "10-30";
    case SpeedBucket::Gt30: return "gt30";
  }
  return "?";
}

SpeedBucket parse_speed_bucket(std::string_view name) {
  for (auto b : kSpeedBuckets)
    if (to_string(b) == name) return b;
  throw Error(ErrorCode::ParseError, "unknown speed bucket '" + std::string(name) + "'");
}

ByteRange byte_range(PayloadBucket b) {
  switch (b) {
    case PayloadBucket::B1_12: return {1, 12};
    case PayloadBucket::B12_51: return {13, 51};
    case PayloadBucket::B51_255: return {52, 255};
    case PayloadBucket::B255_1547: return {256, 1547};
  }
  return {0, 0};
}

PayloadBucket bucket_of(int payload_bytes) {
  if (payload_bytes < 1 || payload_bytes > 1547)
    throw Error(ErrorCode::OutOfRange,
                "payload " + std::to_string(payload_bytes) + " B outside [1, 1547]");
  if (payload_bytes <= 12) return PayloadBucket::B1_12;
  if (payload_bytes <= 51) return PayloadBucket::B12_51;
  if (payload_bytes <= 255) return PayloadBucket::B51_255;
  return PayloadBucket::B255_1547;
}

std::string_view to_string(PayloadBucket b) {
  switch (b) {
    case PayloadBucket::B1_12: return "1-12";
    case PayloadBucket::B12_51: return "12-51";
    case PayloadBucket::B51_255: return "51-255";
    case PayloadBucket::B255_1547: return "255-1547";
  }
  return "?";
}

PayloadBucket parse_payload_bucket(std::string_view name) {
  for (auto b : kPayloadBuckets)
    if (to_string(b) == name) return b;
  throw Error(ErrorCode::ParseError, "unknown payload bucket '" + std::string(name) + "'");
}

bool bucket_supported(Technology tech, PayloadBucket b) {
  return byte_range(b).hi <= max_payload(tech);
}

Technology technology_of(const TechParams& params) {
  switch (params.index()) {
    case 0: return Technology::LoRaWAN;
    case 1: return Technology::Sigfox;
    default: return Technology::NBIoT;
  }
}

std::optional<ValidationError> validate_record(const MeasurementRecord& r) {
  auto fail = [](ErrorCode c, std::string msg) {
    return std::optional<ValidationError>(ValidationError{c, std::move(msg)});
  };
  if (r.payload_bytes < 1) return fail(ErrorCode::PayloadTooSmall, "payload_bytes must be >= 1");
  if (r.payload_bytes > max_payload(r.technology))
    return fail(ErrorCode::PayloadExceedsMax,
                std::string(to_string(r.technology)) + " payload " +
                    std::to_string(r.payload_bytes) + " B exceeds max " +
                    std::to_string(max_payload(r.technology)) + " B");
  if (!(r.energy_uwh >= 0.0)) return fail(ErrorCode::NegativeEnergy, "energy_uwh must be >= 0");
  if (!r.delivered && r.timestamp_rx)
    return fail(ErrorCode::RxWithoutDelivery, "timestamp_rx present on undelivered packet");
  if (technology_of(r.tech_params) != r.technology)
    return fail(ErrorCode::TagMismatch, "tech_params type does not match technology");
  if (!(r.speed_kmh >= 0.0)) return fail(ErrorCode::NegativeSpeed, "speed_kmh must be >= 0");
  if (!is_valid(r.scenario))
    return fail(ErrorCode::InvalidScenario, "indoor-mobile is not a valid scenario");
  if (const auto* lora = std::get_if<LoRaWanParams>(&r.tech_params)) {
    if (lora->sf < 7 || lora->sf > 12)
      return fail(ErrorCode::ParamOutOfRange, "sf must be in [7, 12]");
  }
  if (const auto* nb = std::get_if<NbiotParams>(&r.tech_params)) {
    if (nb->ce_level < 0 || nb->ce_level > 2)
      return fail(ErrorCode::ParamOutOfRange, "ce_level must be 0, 1 or 2");
  }
  return std::nullopt;
}

std::string_view to_string(Sentinel s) {
  return s == Sentinel::Unsupported ? "unsupported" : "insufficient";
}

}  // namespace ratbench
