#pragma once

// Canonical record serialization: one JSON object per line, tech_params nested
// with a "type" tag. CSV export flattens the same fields.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ratbench/core.hpp"

namespace ratbench {

nlohmann::json to_json(const MeasurementRecord& r);
/// Throws Error(ParseError) on missing or mistyped fields. Does not validate
/// record invariants; call validate_record for that.
MeasurementRecord record_from_json(const nlohmann::json& j);

std::string to_json_line(const MeasurementRecord& r);
MeasurementRecord parse_json_line(std::string_view line);

void write_jsonl(std::ostream& out, const std::vector<MeasurementRecord>& records);
/// Blank lines are skipped; any malformed line throws with its line number.
std::vector<MeasurementRecord> read_jsonl(std::istream& in);
std::vector<MeasurementRecord> read_jsonl_file(const std::string& path);
void write_jsonl_file(const std::string& path, const std::vector<MeasurementRecord>& records);

std::string csv_header();
std::string to_csv_row(const MeasurementRecord& r);
void write_csv(std::ostream& out, const std::vector<MeasurementRecord>& records);

nlohmann::json to_json(Scenario s);
Scenario scenario_from_json(const nlohmann::json& j);

}  // namespace ratbench
