#include "ratbench/pdr.hpp"

#include <algorithm>
#include <fstream>

#include "ratbench/record_io.hpp"
#include "ratbench/reference_data.hpp"

namespace ratbench {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::BadProbability, "probability " + std::to_string(p) + " not in [0, 1]");
}

nlohmann::json value_json(const PdrValue& v) {
  if (const auto* p = std::get_if<double>(&v)) return *p;
  return std::string(to_string(std::get<Sentinel>(v)));
}

PdrValue value_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "unsupported") return Sentinel::Unsupported;
  if (s == "insufficient") return Sentinel::Insufficient;
  throw Error(ErrorCode::ParseError, "unknown PDR sentinel '" + s + "'");
}

}  // namespace

PdrTable PdrTable::reference() {
  PdrTable t;
  for (const auto& c : reference_table()) {
    if (const auto* pct = std::get_if<double>(&c.pdr_pct))
      t.set(c.technology, c.bucket, c.scenario, *pct / 100.0);
    else
      t.set(c.technology, c.bucket, c.scenario, std::get<Sentinel>(c.pdr_pct));
  }
  return t;
}

PdrValue PdrTable::at(Technology tech, PayloadBucket bucket, Scenario scenario) const {
  if (!bucket_supported(tech, bucket)) return Sentinel::Unsupported;
  const auto it = cells_.find({tech, bucket, scenario});
  return it == cells_.end() ? PdrValue{Sentinel::Insufficient} : it->second;
}

void PdrTable::set(Technology tech, PayloadBucket bucket, Scenario scenario, PdrValue value) {
  if (!is_valid(scenario))
    throw Error(ErrorCode::InvalidScenario, "invalid scenario " + to_string(scenario));
  if (const auto* p = std::get_if<double>(&value)) check_probability(*p);
  cells_[{tech, bucket, scenario}] = value;
}

SpeedPdrCurve SpeedPdrCurve::reference() {
  SpeedPdrCurve c;
  for (auto t : kAllTechnologies)
    for (auto b : kSpeedBuckets) c.set(t, b, reference_speed_pdr_pct(t, b) / 100.0);
  return c;
}

double SpeedPdrCurve::at(Technology tech, SpeedBucket bucket) const {
  const auto it = points_.find({tech, bucket});
  if (it == points_.end())
    throw Error(ErrorCode::NotFound, "no speed curve point for " + std::string(to_string(tech)));
  return it->second;
}

void SpeedPdrCurve::set(Technology tech, SpeedBucket bucket, double p) {
  check_probability(p);
  points_[{tech, bucket}] = p;
}

double SpeedPdrCurve::mobile_mean(Technology tech) const {
  return (at(tech, SpeedBucket::Lt10) + at(tech, SpeedBucket::B10To30) +
          at(tech, SpeedBucket::Gt30)) / 3.0;
}

PdrValue pdr_lookup(const PdrTable& table, Technology tech, int payload_bytes, Scenario scenario) {
  const auto bucket = bucket_of(payload_bytes);
  if (payload_bytes > max_payload(tech)) return Sentinel::Unsupported;
  return table.at(tech, bucket, scenario);
}

double pdr_at_speed(const SpeedPdrCurve& curve, Technology tech, double speed_kmh) {
  if (!(speed_kmh >= 0.0)) throw Error(ErrorCode::NegativeSpeed, "speed must be >= 0");
  return curve.at(tech, speed_bucket(speed_kmh));
}

std::optional<ResolvedPdr> resolve_pdr(const PdrModel& model, Technology tech, int payload_bytes,
                                       Scenario scenario, std::optional<double> speed_kmh) {
  const auto bucket = bucket_of(payload_bytes);
  if (payload_bytes > max_payload(tech)) return std::nullopt;
  if (!is_valid(scenario))
    throw Error(ErrorCode::InvalidScenario, "invalid scenario " + to_string(scenario));

  ResolvedPdr out;
  bool found = false;
  for (auto i = static_cast<int>(bucket); i >= 0 && !found; --i) {
    const auto b = static_cast<PayloadBucket>(i);
    const auto v = model.table.at(tech, b, scenario);
    if (const auto* p = std::get_if<double>(&v)) {
      out.p = *p;
      out.source_bucket = b;
      out.fallback = b != bucket;
      found = true;
    }
  }
  if (!found) return std::nullopt;

  if (scenario.mobility == Mobility::Mobile && speed_kmh) {
    const double curve = pdr_at_speed(model.curve, tech, *speed_kmh);
    if (bucket == PayloadBucket::B1_12) {
      out.p = curve;
      out.fallback = false;
      out.source_bucket = bucket;
    } else {
      const double mean = model.curve.mobile_mean(tech);
      out.p = mean > 0.0 ? std::clamp(out.p * curve / mean, 0.0, 1.0) : out.p;
    }
    out.speed_adjusted = true;
  }
  return out;
}

nlohmann::json to_json(const PdrModel& model) {
  nlohmann::json table = nlohmann::json::object();
  nlohmann::json curve = nlohmann::json::object();
  for (auto t : kAllTechnologies) {
    const std::string tech(to_string(t));
    for (auto b : kPayloadBuckets)
      for (auto s : kScenarios)
        table[tech][std::string(to_string(b))][to_string(s)] = value_json(model.table.at(t, b, s));
    for (auto sb : kSpeedBuckets) curve[tech][std::string(to_string(sb))] = model.curve.at(t, sb);
  }
  return {{"table", table}, {"speed_curve", curve}};
}

PdrModel pdr_model_from_json(const nlohmann::json& j) {
  PdrModel m;
  try {
    if (j.contains("table"))
      for (const auto& [tech, buckets] : j.at("table").items())
        for (const auto& [bucket, scenarios] : buckets.items())
          for (const auto& [scenario, v] : scenarios.items())
            m.table.set(parse_technology(tech), parse_payload_bucket(bucket),
                        parse_scenario(scenario), value_from_json(v));
    if (j.contains("speed_curve"))
      for (const auto& [tech, points] : j.at("speed_curve").items())
        for (const auto& [sb, v] : points.items())
          m.curve.set(parse_technology(tech), parse_speed_bucket(sb), v.get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("PDR file: ") + e.what());
  }
  return m;
}

PdrModel read_pdr_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return pdr_model_from_json(j);
}

}  // namespace ratbench
