#include "ratbench/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "ratbench/record_io.hpp"

namespace ratbench {

namespace {

void check_range(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::OutOfRange, std::string(what) + " range has lo > hi");
}

void validate_or_throw(const MeasurementRecord& r) {
  if (auto err = validate_record(r))
    throw RecordRejected(err->code, std::string(to_string(err->code)) + ": " + err->message);
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void finish_cell(AggregateCell& c, const AggregateOptions& opts) {
  c.pdr_pct.reset();
  c.eb_uwh_per_byte.reset();
  c.sentinel = Sentinel::Insufficient;
  if (c.n_sent < opts.min_samples) return;
  c.pdr_pct = 100.0 * static_cast<double>(c.n_received) / static_cast<double>(c.n_sent);
  if (c.bytes_sum > 0) c.eb_uwh_per_byte = c.energy_uwh_sum / static_cast<double>(c.bytes_sum);
}

}  // namespace

void FilterExpr::validate() const {
  if (min_payload && max_payload) check_range(*min_payload <= *max_payload, "payload");
  if (min_speed && max_speed) check_range(*min_speed <= *max_speed, "speed");
  if (from_ms && to_ms) check_range(*from_ms <= *to_ms, "time");
}

bool FilterExpr::matches(const MeasurementRecord& r) const {
  if (technology && r.technology != *technology) return false;
  if (min_payload && r.payload_bytes < *min_payload) return false;
  if (max_payload && r.payload_bytes > *max_payload) return false;
  if (min_speed && r.speed_kmh < *min_speed) return false;
  if (max_speed && r.speed_kmh > *max_speed) return false;
  if (from_ms && r.timestamp_tx < *from_ms) return false;
  if (to_ms && r.timestamp_tx > *to_ms) return false;
  if (scenario && r.scenario != *scenario) return false;
  if (delivered && r.delivered != *delivered) return false;
  return true;
}

RecordStore::RecordStore(const std::string& path) {
  if (std::filesystem::exists(path)) {
    for (auto& r : read_jsonl_file(path)) {
      validate_or_throw(r);
      insert_locked(r);
    }
  }
  file_ = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*file_) throw Error(ErrorCode::Io, "cannot append to " + path);
}

IngestResult RecordStore::insert_locked(const MeasurementRecord& r) {
  if (by_id_.count(r.record_id)) return {r.record_id, false};
  if (file_) {
    *file_ << to_json_line(r) << '\n';
    file_->flush();
    if (!*file_) throw Error(ErrorCode::Io, "append failed");
  }
  by_id_.emplace(r.record_id, records_.size());
  by_technology_[static_cast<int>(r.technology)].push_back(records_.size());
  records_.push_back(r);
  return {r.record_id, true};
}

IngestResult RecordStore::ingest(const MeasurementRecord& r) {
  validate_or_throw(r);
  std::unique_lock lock(mu_);
  return insert_locked(r);
}

IngestResult RecordStore::ingest_line(std::string_view line) {
  return ingest(parse_json_line(line));
}

std::vector<IngestResult> RecordStore::ingest_batch(std::string_view body) {
  std::vector<MeasurementRecord> parsed;
  const auto whole = nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
  if (!whole.is_discarded() && whole.is_object()) {
    parsed.push_back(record_from_json(whole));
  } else if (!whole.is_discarded() && whole.is_array()) {
    for (const auto& j : whole) parsed.push_back(record_from_json(j));
  } else {
    std::istringstream in{std::string(body)};
    parsed = read_jsonl(in);
  }
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (auto err = validate_record(parsed[i]))
      throw RecordRejected(err->code, "record " + std::to_string(i + 1) + ": " +
                                          std::string(to_string(err->code)) + ": " +
                                          err->message);
  }
  std::vector<IngestResult> out;
  std::unique_lock lock(mu_);
  for (const auto& r : parsed) out.push_back(insert_locked(r));
  return out;
}

std::size_t RecordStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::optional<MeasurementRecord> RecordStore::find(const std::string& record_id) const {
  std::shared_lock lock(mu_);
  const auto it = by_id_.find(record_id);
  if (it == by_id_.end()) return std::nullopt;
  return records_[it->second];
}

std::vector<MeasurementRecord> RecordStore::query(const FilterExpr& filter) const {
  filter.validate();
  std::shared_lock lock(mu_);
  std::vector<MeasurementRecord> out;
  if (filter.technology) {
    const auto it = by_technology_.find(static_cast<int>(*filter.technology));
    if (it == by_technology_.end()) return out;
    for (auto i : it->second)
      if (filter.matches(records_[i])) out.push_back(records_[i]);
    return out;
  }
  for (const auto& r : records_)
    if (filter.matches(r)) out.push_back(r);
  return out;
}

void RecordStore::dump(std::ostream& out) const {
  std::shared_lock lock(mu_);
  write_jsonl(out, records_);
}

std::vector<AggregateCell> aggregate_table(const std::vector<MeasurementRecord>& records,
                                           const FilterExpr& filter,
                                           const AggregateOptions& opts) {
  filter.validate();
  std::map<std::tuple<Scenario, PayloadBucket, Technology>, AggregateCell> cells;
  for (const auto& r : records) {
    if (!filter.matches(r)) continue;
    const auto bucket = bucket_of(r.payload_bytes);
    auto& c = cells[{r.scenario, bucket, r.technology}];
    c.technology = r.technology;
    c.bucket = bucket;
    c.scenario = r.scenario;
    c.n_sent += 1;
    if (r.delivered) c.n_received += 1;
    if (!opts.delivered_only || r.delivered) {
      c.energy_uwh_sum += r.energy_uwh;
      c.bytes_sum += r.payload_bytes;
    }
  }
  std::vector<AggregateCell> out;
  for (auto& [key, c] : cells) {
    finish_cell(c, opts);
    out.push_back(c);
  }
  return out;
}

std::vector<AggregateCell> aggregate_table(const RecordStore& store, const FilterExpr& filter,
                                           const AggregateOptions& opts) {
  return aggregate_table(store.query(filter), {}, opts);
}

AggregateCell merge_cells(const AggregateCell& a, const AggregateCell& b,
                          const AggregateOptions& opts) {
  if (a.technology != b.technology || a.bucket != b.bucket || a.scenario != b.scenario)
    throw Error(ErrorCode::ConfigInvalid, "merging cells of different keys");
  AggregateCell c = a;
  c.n_sent += b.n_sent;
  c.n_received += b.n_received;
  c.energy_uwh_sum += b.energy_uwh_sum;
  c.bytes_sum += b.bytes_sum;
  finish_cell(c, opts);
  return c;
}

std::vector<SpeedPoint> speed_series(const std::vector<MeasurementRecord>& records,
                                     Technology tech, PayloadBucket bucket) {
  std::array<std::int64_t, 4> sent{};
  std::array<std::int64_t, 4> received{};
  for (const auto& r : records) {
    if (r.technology != tech || bucket_of(r.payload_bytes) != bucket) continue;
    const auto i = static_cast<std::size_t>(speed_bucket(r.speed_kmh));
    sent[i] += 1;
    if (r.delivered) received[i] += 1;
  }
  std::vector<SpeedPoint> out;
  for (auto b : kSpeedBuckets) {
    const auto i = static_cast<std::size_t>(b);
    if (sent[i] == 0) continue;
    out.push_back({b, 100.0 * static_cast<double>(received[i]) / static_cast<double>(sent[i]),
                   sent[i]});
  }
  return out;
}

const std::vector<std::string>& series_fields() {
  static const std::vector<std::string> fields{
      "timestamp_tx", "timestamp_rx", "payload_bytes", "tx_power_dbm", "energy_uwh",
      "energy_per_byte", "delivered", "rssi_dbm", "snr_db", "lat", "lon", "speed_kmh",
      "sf", "ce_level", "gateway_count"};
  return fields;
}

namespace {

std::optional<double> project(const MeasurementRecord& r, const std::string& f) {
  if (f == "timestamp_tx") return static_cast<double>(r.timestamp_tx);
  if (f == "timestamp_rx")
    return r.timestamp_rx ? std::optional<double>(static_cast<double>(*r.timestamp_rx))
                          : std::nullopt;
  if (f == "payload_bytes") return r.payload_bytes;
  if (f == "tx_power_dbm") return r.tx_power_dbm;
  if (f == "energy_uwh") return r.energy_uwh;
  if (f == "energy_per_byte") return r.energy_uwh / r.payload_bytes;
  if (f == "delivered") return r.delivered ? 1.0 : 0.0;
  if (f == "rssi_dbm") return r.rssi_dbm;
  if (f == "snr_db") return r.snr_db;
  if (f == "lat") return r.position ? std::optional<double>(r.position->lat) : std::nullopt;
  if (f == "lon") return r.position ? std::optional<double>(r.position->lon) : std::nullopt;
  if (f == "speed_kmh") return r.speed_kmh;
  if (f == "sf") {
    if (const auto* p = std::get_if<LoRaWanParams>(&r.tech_params)) return p->sf;
    return std::nullopt;
  }
  if (f == "ce_level") {
    if (const auto* p = std::get_if<NbiotParams>(&r.tech_params)) return p->ce_level;
    return std::nullopt;
  }
  if (f == "gateway_count") return static_cast<double>(r.gateway_positions.size());
  return std::nullopt;
}

}  // namespace

Series export_series(const std::vector<MeasurementRecord>& records, const std::string& x_field,
                     const std::string& y_field, const FilterExpr& filter) {
  const auto& fields = series_fields();
  for (const auto* f : {&x_field, &y_field})
    if (std::find(fields.begin(), fields.end(), *f) == fields.end())
      throw Error(ErrorCode::UnknownField, "unknown series field '" + *f + "'");
  filter.validate();
  Series s{x_field, y_field, {}, 0};
  for (const auto& r : records) {
    if (!filter.matches(r)) continue;
    const auto x = project(r, x_field);
    const auto y = project(r, y_field);
    if (x && y) s.points.emplace_back(*x, *y);
    else ++s.skipped;
  }
  std::stable_sort(s.points.begin(), s.points.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return s;
}

nlohmann::json to_json(const AggregateCell& c) {
  auto value = [&](const std::optional<double>& v) -> nlohmann::json {
    if (v) return *v;
    return std::string(to_string(c.sentinel));
  };
  return {{"technology", std::string(to_string(c.technology))},
          {"bucket", std::string(to_string(c.bucket))},
          {"scenario", to_string(c.scenario)},
          {"pdr_pct", value(c.pdr_pct)},
          {"eb_uwh_per_byte", value(c.eb_uwh_per_byte)},
          {"n_sent", c.n_sent},
          {"n_received", c.n_received},
          {"energy_uwh_sum", c.energy_uwh_sum},
          {"bytes_sum", c.bytes_sum}};
}

nlohmann::json to_json(const SpeedPoint& p) {
  return {{"speed_bucket", std::string(to_string(p.bucket))},
          {"pdr_pct", p.pdr_pct},
          {"n_sent", p.n_sent}};
}

nlohmann::json to_json(const Series& s) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [x, y] : s.points) pts.push_back({x, y});
  return {{"x_field", s.x_field},
          {"y_field", s.y_field},
          {"points", pts},
          {"count", s.points.size()},
          {"skipped", s.skipped}};
}

std::string cells_to_csv(const std::vector<AggregateCell>& cells) {
  std::ostringstream out;
  out << "scenario,bucket,technology,n_sent,n_received,pdr_pct,eb_uwh_per_byte\n";
  for (const auto& c : cells) {
    const std::string sentinel(to_string(c.sentinel));
    out << to_string(c.scenario) << ',' << to_string(c.bucket) << ',' << to_string(c.technology)
        << ',' << c.n_sent << ',' << c.n_received << ','
        << (c.pdr_pct ? format_fixed(*c.pdr_pct, 2) : sentinel) << ','
        << (c.eb_uwh_per_byte ? format_fixed(*c.eb_uwh_per_byte, 3) : sentinel) << '\n';
  }
  return out.str();
}

std::string cells_to_markdown(const std::vector<AggregateCell>& cells) {
  std::ostringstream out;
  out << "| Scenario | Payload (B) | Technology | Sent | PDR (%) | E_b (µWh/B) |\n"
      << "|---|---|---|---:|---:|---:|\n";
  for (const auto& c : cells) {
    const std::string sentinel(to_string(c.sentinel));
    out << "| " << to_string(c.scenario) << " | " << to_string(c.bucket) << " | "
        << to_string(c.technology) << " | " << c.n_sent << " | "
        << (c.pdr_pct ? format_fixed(*c.pdr_pct, 2) : sentinel) << " | "
        << (c.eb_uwh_per_byte ? format_fixed(*c.eb_uwh_per_byte, 2) : sentinel) << " |\n";
  }
  return out.str();
}

}  // namespace ratbench
