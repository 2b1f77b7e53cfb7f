#include "ratbench/record_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace ratbench {

using nlohmann::json;

namespace {

json geo_to_json(const GeoPoint& p) { return json{{"lat", p.lat}, {"lon", p.lon}}; }

GeoPoint geo_from_json(const json& j) {
  return GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()};
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

json tech_params_to_json(const TechParams& p) {
  json j;
  if (const auto* lora = std::get_if<LoRaWanParams>(&p)) {
    j["type"] = "LoRaWAN";
    j["sf"] = lora->sf;
    j["adr_enabled"] = lora->adr_enabled;
  } else if (const auto* sfx = std::get_if<SigfoxParams>(&p)) {
    j["type"] = "Sigfox";
    put_optional(j, "estimated_region", sfx->estimated_region);
  } else {
    const auto& nb = std::get<NbiotParams>(p);
    j["type"] = "NB-IoT";
    j["ce_level"] = nb.ce_level;
    put_optional(j, "rsrp_dbm", nb.rsrp_dbm);
    put_optional(j, "sinr_db", nb.sinr_db);
    put_optional(j, "rsrq_db", nb.rsrq_db);
    put_optional(j, "edrx_s", nb.edrx_s);
    put_optional(j, "psm_tau_s", nb.psm_tau_s);
  }
  return j;
}

TechParams tech_params_from_json(const json& j) {
  switch (parse_technology(j.at("type").get<std::string>())) {
    case Technology::LoRaWAN:
      return LoRaWanParams{j.at("sf").get<int>(), j.value("adr_enabled", true)};
    case Technology::Sigfox:
      return SigfoxParams{optional_field<std::string>(j, "estimated_region")};
    case Technology::NBIoT: {
      NbiotParams nb;
      nb.ce_level = j.at("ce_level").get<int>();
      nb.rsrp_dbm = optional_field<double>(j, "rsrp_dbm");
      nb.sinr_db = optional_field<double>(j, "sinr_db");
      nb.rsrq_db = optional_field<double>(j, "rsrq_db");
      nb.edrx_s = optional_field<double>(j, "edrx_s");
      nb.psm_tau_s = optional_field<double>(j, "psm_tau_s");
      return nb;
    }
  }
  return LoRaWanParams{};
}

}  // namespace

json to_json(Scenario s) {
  return json{{"placement", s.placement == Placement::Indoor ? "indoor" : "outdoor"},
              {"mobility", s.mobility == Mobility::Static ? "static" : "mobile"}};
}

Scenario scenario_from_json(const json& j) {
  if (j.is_string()) return parse_scenario(j.get<std::string>());
  Scenario s;
  const auto placement = j.at("placement").get<std::string>();
  const auto mobility = j.at("mobility").get<std::string>();
  if (placement == "indoor") s.placement = Placement::Indoor;
  else if (placement == "outdoor") s.placement = Placement::Outdoor;
  else throw Error(ErrorCode::ParseError, "unknown placement '" + placement + "'");
  if (mobility == "static") s.mobility = Mobility::Static;
  else if (mobility == "mobile") s.mobility = Mobility::Mobile;
  else throw Error(ErrorCode::ParseError, "unknown mobility '" + mobility + "'");
  return s;
}

json to_json(const MeasurementRecord& r) {
  json j;
  j["record_id"] = r.record_id;
  j["technology"] = std::string(to_string(r.technology));
  j["timestamp_tx"] = r.timestamp_tx;
  put_optional(j, "timestamp_rx", r.timestamp_rx);
  j["payload_bytes"] = r.payload_bytes;
  j["tx_power_dbm"] = r.tx_power_dbm;
  j["energy_uwh"] = r.energy_uwh;
  j["delivered"] = r.delivered;
  put_optional(j, "rssi_dbm", r.rssi_dbm);
  put_optional(j, "snr_db", r.snr_db);
  if (r.position) j["position"] = geo_to_json(*r.position);
  j["speed_kmh"] = r.speed_kmh;
  json gws = json::array();
  for (const auto& g : r.gateway_positions) gws.push_back(geo_to_json(g));
  j["gateway_positions"] = std::move(gws);
  j["scenario"] = to_json(r.scenario);
  j["tech_params"] = tech_params_to_json(r.tech_params);
  return j;
}

MeasurementRecord record_from_json(const json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "record must be a JSON object");
    MeasurementRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    if (r.record_id.empty()) throw Error(ErrorCode::ParseError, "record_id must not be empty");
    r.technology = parse_technology(j.at("technology").get<std::string>());
    r.timestamp_tx = j.at("timestamp_tx").get<std::int64_t>();
    r.timestamp_rx = optional_field<std::int64_t>(j, "timestamp_rx");
    r.payload_bytes = j.at("payload_bytes").get<int>();
    r.tx_power_dbm = j.at("tx_power_dbm").get<int>();
    r.energy_uwh = j.at("energy_uwh").get<double>();
    r.delivered = j.at("delivered").get<bool>();
    r.rssi_dbm = optional_field<double>(j, "rssi_dbm");
    r.snr_db = optional_field<double>(j, "snr_db");
    if (auto it = j.find("position"); it != j.end() && !it->is_null())
      r.position = geo_from_json(*it);
    r.speed_kmh = j.value("speed_kmh", 0.0);
    if (auto it = j.find("gateway_positions"); it != j.end() && !it->is_null())
      for (const auto& g : *it) r.gateway_positions.push_back(geo_from_json(g));
    r.scenario = scenario_from_json(j.at("scenario"));
    r.tech_params = tech_params_from_json(j.at("tech_params"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::string to_json_line(const MeasurementRecord& r) { return to_json(r).dump(); }

MeasurementRecord parse_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return record_from_json(j);
}

void write_jsonl(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<MeasurementRecord> read_jsonl(std::istream& in) {
  std::vector<MeasurementRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_json_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MeasurementRecord> read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_jsonl(in);
}

void write_jsonl_file(const std::string& path, const std::vector<MeasurementRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_jsonl(out, records);
}

std::string csv_header() {
  return "record_id,technology,timestamp_tx,timestamp_rx,payload_bytes,tx_power_dbm,"
         "energy_uwh,delivered,rssi_dbm,snr_db,lat,lon,speed_kmh,n_gateways,scenario,"
         "sf,adr_enabled,estimated_region,ce_level,rsrp_dbm,sinr_db,rsrq_db,edrx_s,psm_tau_s";
}

namespace {

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

template <typename T>
std::string csv_opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) return csv_number(*v);
  else return std::to_string(*v);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string to_csv_row(const MeasurementRecord& r) {
  std::ostringstream os;
  os << csv_quote(r.record_id) << ',' << to_string(r.technology) << ',' << r.timestamp_tx << ','
     << csv_opt(r.timestamp_rx) << ',' << r.payload_bytes << ',' << r.tx_power_dbm << ','
     << csv_number(r.energy_uwh) << ',' << (r.delivered ? "true" : "false") << ','
     << csv_opt(r.rssi_dbm) << ',' << csv_opt(r.snr_db) << ','
     << (r.position ? csv_number(r.position->lat) : "") << ','
     << (r.position ? csv_number(r.position->lon) : "") << ',' << csv_number(r.speed_kmh) << ','
     << r.gateway_positions.size() << ',' << to_string(r.scenario) << ',';
  if (const auto* lora = std::get_if<LoRaWanParams>(&r.tech_params))
    os << lora->sf << ',' << (lora->adr_enabled ? "true" : "false") << ",,,,,,,";
  else if (const auto* sfx = std::get_if<SigfoxParams>(&r.tech_params))
    os << ",," << csv_quote(sfx->estimated_region.value_or("")) << ",,,,,,";
  else {
    const auto& nb = std::get<NbiotParams>(r.tech_params);
    os << ",,," << nb.ce_level << ',' << csv_opt(nb.rsrp_dbm) << ',' << csv_opt(nb.sinr_db) << ','
       << csv_opt(nb.rsrq_db) << ',' << csv_opt(nb.edrx_s) << ',' << csv_opt(nb.psm_tau_s);
  }
  return os.str();
}

void write_csv(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  out << csv_header() << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

}  // namespace ratbench
