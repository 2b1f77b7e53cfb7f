#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratbench {

enum class ErrorCode {
  // record validation
  PayloadExceedsMax,
  PayloadTooSmall,
  NegativeEnergy,
  NegativeSpeed,
  RxWithoutDelivery,
  TagMismatch,
  ParamOutOfRange,
  InvalidScenario,
  // model / computation
  OutOfRange,
  LdroRequired,
  BadCeLevel,
  UnknownTxPower,
  Underdetermined,
  TooFewSamples,
  NonPositiveEnergy,
  BadProbability,
  NoFeasibleTechnology,
  Unsupported,
  ConfigInvalid,
  // ingest / service
  ParseError,
  ValidationError,
  UnknownField,
  NotFound,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as this exception type. The code is
/// stable and is what the HTTP layer serializes as {code, message}.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A record that failed validate_record. code() is ValidationError; detail()
/// names the violated constraint.
class RecordRejected : public Error {
 public:
  RecordRejected(ErrorCode detail, const std::string& message)
      : Error(ErrorCode::ValidationError, message), detail_(detail) {}

  ErrorCode detail() const noexcept { return detail_; }

 private:
  ErrorCode detail_;
};

}  // namespace ratbench
