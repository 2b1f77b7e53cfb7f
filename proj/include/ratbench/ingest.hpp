#pragma once

// Record store and the queries behind the report, the HTTP service and the
// dashboard: filters, bucket aggregates, speed series and plot projections.

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ratbench/core.hpp"

namespace ratbench {

/// Conjunction of optional constraints; ranges are inclusive.
struct FilterExpr {
  std::optional<Technology> technology;
  std::optional<int> min_payload;
  std::optional<int> max_payload;
  std::optional<double> min_speed;
  std::optional<double> max_speed;
  std::optional<std::int64_t> from_ms;  // timestamp_tx
  std::optional<std::int64_t> to_ms;
  std::optional<Scenario> scenario;
  std::optional<bool> delivered;

  /// Throws OutOfRange when a range has lo > hi.
  void validate() const;
  bool matches(const MeasurementRecord& r) const;
};

struct IngestResult {
  std::string record_id;
  /// False when the id was already present (idempotent duplicate).
  bool inserted = false;
};

/// Append-only, keyed by record_id. With a backing file every accepted record
/// is appended as one JSON line before it becomes visible, so reloading the
/// file reproduces the store. Writers are serialized; readers share a lock
/// and never observe a partially appended record.
class RecordStore {
 public:
  RecordStore() = default;
  /// Loads `path` if it exists and appends to it from then on.
  explicit RecordStore(const std::string& path);

  RecordStore(const RecordStore&) = delete;
  RecordStore& operator=(const RecordStore&) = delete;

  /// Throws RecordRejected when validation fails.
  IngestResult ingest(const MeasurementRecord& r);
  /// Throws ParseError or RecordRejected.
  IngestResult ingest_line(std::string_view line);
  /// One JSON object, a JSON array of objects, or JSON Lines. Every record is
  /// parsed and validated before any is appended.
  std::vector<IngestResult> ingest_batch(std::string_view body);

  std::size_t size() const;
  std::optional<MeasurementRecord> find(const std::string& record_id) const;
  /// Matching records in insertion order.
  std::vector<MeasurementRecord> query(const FilterExpr& filter = {}) const;
  void dump(std::ostream& out) const;

 private:
  IngestResult insert_locked(const MeasurementRecord& r);

  mutable std::shared_mutex mu_;
  std::vector<MeasurementRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<int, std::vector<std::size_t>> by_technology_;
  std::unique_ptr<std::ofstream> file_;
};

struct AggregateOptions {
  int min_samples = kDefaultMinSamples;
  /// E_b over delivered packets only instead of all sent packets.
  bool delivered_only = false;
};

/// One cell per (technology, bucket, scenario) with at least one record, in
/// scenario, bucket, technology order. Cells under min_samples carry the
/// Insufficient sentinel.
std::vector<AggregateCell> aggregate_table(const std::vector<MeasurementRecord>& records,
                                           const FilterExpr& filter = {},
                                           const AggregateOptions& opts = {});
std::vector<AggregateCell> aggregate_table(const RecordStore& store,
                                           const FilterExpr& filter = {},
                                           const AggregateOptions& opts = {});

/// Adds the additive counters of `b` into `a` and recomputes the ratios.
AggregateCell merge_cells(const AggregateCell& a, const AggregateCell& b,
                          const AggregateOptions& opts = {});

struct SpeedPoint {
  SpeedBucket bucket = SpeedBucket::Static;
  double pdr_pct = 0.0;
  std::int64_t n_sent = 0;
};

/// PDR per speed bucket over the technology's records in `bucket`, static
/// first; buckets without records are omitted.
std::vector<SpeedPoint> speed_series(const std::vector<MeasurementRecord>& records,
                                     Technology tech,
                                     PayloadBucket bucket = PayloadBucket::B1_12);

/// Fields export_series can project to numbers.
const std::vector<std::string>& series_fields();

struct Series {
  std::string x_field;
  std::string y_field;
  std::vector<std::pair<double, double>> points;
  /// Matching records lacking either field.
  std::size_t skipped = 0;
};

/// Filtered projection sorted stably by x. Throws UnknownField.
Series export_series(const std::vector<MeasurementRecord>& records, const std::string& x_field,
                     const std::string& y_field, const FilterExpr& filter = {});

nlohmann::json to_json(const AggregateCell& c);
nlohmann::json to_json(const SpeedPoint& p);
nlohmann::json to_json(const Series& s);

/// Table rendering of aggregate cells.
std::string cells_to_csv(const std::vector<AggregateCell>& cells);
std::string cells_to_markdown(const std::vector<AggregateCell>& cells);

}  // namespace ratbench
