#pragma once

// Measured campaign results shipped as model defaults: the per-bucket PDR and
// energy-per-byte table and the PDR-versus-speed curve for 1-12 B payloads.

#include <optional>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ratbench/core.hpp"

namespace ratbench {

using CellValue = std::variant<double, Sentinel>;

struct ReferenceCell {
  Technology technology;
  PayloadBucket bucket;
  Scenario scenario;
  CellValue pdr_pct;
  CellValue eb_uwh_per_byte;
};

/// All 36 (technology, bucket, scenario) cells, sentinels included.
const std::vector<ReferenceCell>& reference_table();

/// Reference cell lookup; throws NotFound for an invalid scenario.
const ReferenceCell& reference_cell(Technology tech, PayloadBucket bucket, Scenario scenario);

/// Reference PDR (in percent) per speed bucket for 1-12 B payloads.
double reference_speed_pdr_pct(Technology tech, SpeedBucket bucket);

/// Cells as AggregateCell values, the input format of the energy fit.
std::vector<AggregateCell> reference_targets();

/// {"cells": [{technology, bucket, scenario, pdr_pct, eb_uwh_per_byte}]}
/// with "unsupported" / "insufficient" strings in place of numbers.
nlohmann::json targets_to_json(const std::vector<AggregateCell>& cells);
std::vector<AggregateCell> targets_from_json(const nlohmann::json& j);

}  // namespace ratbench
