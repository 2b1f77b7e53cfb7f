#include "ratbench/reference_data.hpp"

#include "ratbench/record_io.hpp"

namespace ratbench {

namespace {

constexpr Sentinel U = Sentinel::Unsupported;
constexpr Sentinel I = Sentinel::Insufficient;
constexpr Scenario kStaticIndoor{Placement::Indoor, Mobility::Static};
constexpr Scenario kStaticOutdoor{Placement::Outdoor, Mobility::Static};
constexpr Scenario kMobileOutdoor{Placement::Outdoor, Mobility::Mobile};

std::vector<ReferenceCell> build_table() {
  using T = Technology;
  using B = PayloadBucket;
  // Rows: bucket; per scenario NB-IoT, LoRaWAN, Sigfox as (PDR %, E_b µWh/B).
  struct Row {
    B bucket;
    Scenario scenario;
    CellValue nb_pdr, nb_eb, lora_pdr, lora_eb, sfx_pdr, sfx_eb;
  };
  const Row rows[] = {
      {B::B1_12, kStaticIndoor, 93.10, 60.52, 61.58, 8.03, 89.86, 45.58},
      {B::B12_51, kStaticIndoor, 98.53, 12.61, 71.90, 3.69, U, U},
      {B::B51_255, kStaticIndoor, 97.17, 5.98, 72.00, 0.33, U, U},
      {B::B255_1547, kStaticIndoor, 99.08, 1.03, U, U, U, U},
      {B::B1_12, kStaticOutdoor, 94.54, 44.36, 52.89, 11.65, 73.49, 47.03},
      {B::B12_51, kStaticOutdoor, 92.85, 18.65, 53.95, 6.56, U, U},
      {B::B51_255, kStaticOutdoor, 92.89, 3.95, I, I, U, U},
      {B::B255_1547, kStaticOutdoor, 90.63, 0.81, U, U, U, U},
      {B::B1_12, kMobileOutdoor, 88.89, 74.80, 62.09, 10.2, 42.98, 50.79},
      {B::B12_51, kMobileOutdoor, 81.98, 32.85, 58.46, 0.53, U, U},
      {B::B51_255, kMobileOutdoor, 84.78, 10.12, I, I, U, U},
      {B::B255_1547, kMobileOutdoor, 82.86, 0.89, U, U, U, U},
  };
  std::vector<ReferenceCell> out;
  for (const auto& r : rows) {
    out.push_back({T::NBIoT, r.bucket, r.scenario, r.nb_pdr, r.nb_eb});
    out.push_back({T::LoRaWAN, r.bucket, r.scenario, r.lora_pdr, r.lora_eb});
    out.push_back({T::Sigfox, r.bucket, r.scenario, r.sfx_pdr, r.sfx_eb});
  }
  return out;
}

nlohmann::json cell_value_json(const std::optional<double>& v, Sentinel s) {
  if (v) return *v;
  return std::string(to_string(s));
}

std::optional<double> cell_value_from_json(const nlohmann::json& j, Sentinel& sentinel) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "unsupported" || s == "-") sentinel = Sentinel::Unsupported;
  else if (s == "insufficient" || s == "/") sentinel = Sentinel::Insufficient;
  else throw Error(ErrorCode::ParseError, "unknown cell sentinel '" + s + "'");
  return std::nullopt;
}

}  // namespace

const std::vector<ReferenceCell>& reference_table() {
  static const std::vector<ReferenceCell> table = build_table();
  return table;
}

const ReferenceCell& reference_cell(Technology tech, PayloadBucket bucket, Scenario scenario) {
  for (const auto& c : reference_table())
    if (c.technology == tech && c.bucket == bucket && c.scenario == scenario) return c;
  throw Error(ErrorCode::NotFound, "no reference cell for scenario " + to_string(scenario));
}

double reference_speed_pdr_pct(Technology tech, SpeedBucket bucket) {
  static constexpr double nbiot[] = {88, 83, 86, 79};
  static constexpr double lorawan[] = {51, 51, 56, 43};
  static constexpr double sigfox[] = {78, 53, 34, 17};
  const auto i = static_cast<std::size_t>(bucket);
  switch (tech) {
    case Technology::NBIoT: return nbiot[i];
    case Technology::LoRaWAN: return lorawan[i];
    case Technology::Sigfox: return sigfox[i];
  }
  return 0.0;
}

std::vector<AggregateCell> reference_targets() {
  std::vector<AggregateCell> out;
  for (const auto& c : reference_table()) {
    AggregateCell a;
    a.technology = c.technology;
    a.bucket = c.bucket;
    a.scenario = c.scenario;
    if (const auto* p = std::get_if<double>(&c.pdr_pct)) a.pdr_pct = *p;
    else a.sentinel = std::get<Sentinel>(c.pdr_pct);
    if (const auto* e = std::get_if<double>(&c.eb_uwh_per_byte)) a.eb_uwh_per_byte = *e;
    out.push_back(a);
  }
  return out;
}

nlohmann::json targets_to_json(const std::vector<AggregateCell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    arr.push_back({{"technology", std::string(to_string(c.technology))},
                   {"bucket", std::string(to_string(c.bucket))},
                   {"scenario", to_string(c.scenario)},
                   {"pdr_pct", cell_value_json(c.pdr_pct, c.sentinel)},
                   {"eb_uwh_per_byte", cell_value_json(c.eb_uwh_per_byte, c.sentinel)}});
  }
  return nlohmann::json{{"cells", arr}};
}

std::vector<AggregateCell> targets_from_json(const nlohmann::json& j) {
  try {
    std::vector<AggregateCell> out;
    for (const auto& c : j.at("cells")) {
      AggregateCell a;
      a.technology = parse_technology(c.at("technology").get<std::string>());
      a.bucket = parse_payload_bucket(c.at("bucket").get<std::string>());
      a.scenario = scenario_from_json(c.at("scenario"));
      a.pdr_pct = cell_value_from_json(c.at("pdr_pct"), a.sentinel);
      a.eb_uwh_per_byte = cell_value_from_json(c.at("eb_uwh_per_byte"), a.sentinel);
      out.push_back(a);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace ratbench
