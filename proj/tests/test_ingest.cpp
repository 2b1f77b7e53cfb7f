#include <atomic>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "oracles.hpp"
#include "ratbench/campaign.hpp"
#include "ratbench/ingest.hpp"
#include "ratbench/record_io.hpp"
#include "ratbench/rng.hpp"
#include "support.hpp"

using namespace ratbench;
using support::kMobileOutdoor;
using support::kStaticIndoor;
using support::kStaticOutdoor;
using support::record;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ratbench-test-ingest";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p.string();
}

const AggregateCell* find_cell(const std::vector<AggregateCell>& cells, Technology t,
                               PayloadBucket b, Scenario s) {
  for (const auto& c : cells)
    if (c.technology == t && c.bucket == b && c.scenario == s) return &c;
  return nullptr;
}

std::vector<MeasurementRecord> random_records(std::uint64_t seed, int n, const std::string& tag) {
  Xoshiro256 rng(seed);
  std::vector<MeasurementRecord> out;
  for (int i = 0; i < n; ++i) {
    const auto tech = kAllTechnologies[static_cast<std::size_t>(rng.uniform_int(0, 2))];
    const auto scen = kScenarios[static_cast<std::size_t>(rng.uniform_int(0, 2))];
    const int payload = static_cast<int>(rng.uniform_int(1, max_payload(tech)));
    const double speed = scen.mobility == Mobility::Mobile ? rng.uniform() * 80.0 : 0.0;
    auto r = record(tag + std::to_string(i), tech, payload, 1.0 + rng.uniform() * 500.0,
                    rng.uniform() < 0.75, scen, speed);
    r.timestamp_tx += i * 1000;
    if (r.delivered) r.timestamp_rx = r.timestamp_tx + 700;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("ingest examples") {
  RecordStore store;
  const auto a = store.ingest(record("r1", Technology::LoRaWAN, 10, 3.0, true));
  CHECK(a.record_id == "r1");
  CHECK(a.inserted);
  const auto again = store.ingest(record("r1", Technology::LoRaWAN, 10, 3.0, true));
  CHECK_FALSE(again.inserted);
  CHECK(store.size() == 1);

  try {
    store.ingest(record("r2", Technology::Sigfox, 13, 1.0, true));
    FAIL("expected a rejection");
  } catch (const RecordRejected& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(e.detail() == ErrorCode::PayloadExceedsMax);
  }
  CHECK(store.size() == 1);
  CHECK_FALSE(store.find("r2"));
  CHECK(store.find("r1")->payload_bytes == 10);
}

TEST_CASE("ingest_line and ingest_batch") {
  RecordStore store;
  const auto line = to_json_line(record("x", Technology::NBIoT, 100, 50.0, true));
  CHECK(store.ingest_line(line).inserted);
  try {
    store.ingest_line("{not json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }

  std::string jsonl_body;
  for (int i = 0; i < 3; ++i)
    jsonl_body += to_json_line(record("b" + std::to_string(i), Technology::LoRaWAN, 5, 1.0, true)) +
                  "\n";
  CHECK(store.ingest_batch(jsonl_body).size() == 3);

  nlohmann::json arr = nlohmann::json::array();
  arr.push_back(to_json(record("c0", Technology::Sigfox, 12, 1.0, false)));
  arr.push_back(to_json(record("x", Technology::NBIoT, 100, 50.0, true)));
  const auto res = store.ingest_batch(arr.dump());
  REQUIRE(res.size() == 2);
  CHECK(res[0].inserted);
  CHECK_FALSE(res[1].inserted);

  const auto single = store.ingest_batch(to_json(record("d", Technology::NBIoT, 9, 1.0, true)).dump());
  CHECK(single.size() == 1);

  // One bad record rejects the whole batch.
  const auto before = store.size();
  nlohmann::json mixed = nlohmann::json::array();
  mixed.push_back(to_json(record("e0", Technology::LoRaWAN, 5, 1.0, true)));
  mixed.push_back(to_json(record("e1", Technology::Sigfox, 40, 1.0, true)));
  CHECK_THROWS_AS(store.ingest_batch(mixed.dump()), RecordRejected);
  CHECK(store.size() == before);
}

TEST_CASE("filters") {
  RecordStore store;
  for (const auto& r : random_records(3, 400, "f")) store.ingest(r);
  FilterExpr f;
  f.technology = Technology::NBIoT;
  f.min_payload = 100;
  f.max_payload = 800;
  f.delivered = true;
  const auto got = store.query(f);
  CHECK_FALSE(got.empty());
  std::size_t expected = 0;
  for (const auto& r : store.query())
    if (r.technology == Technology::NBIoT && r.payload_bytes >= 100 && r.payload_bytes <= 800 &&
        r.delivered)
      ++expected;
  CHECK(got.size() == expected);
  for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].timestamp_tx < got[i].timestamp_tx);

  FilterExpr bad;
  bad.min_speed = 10;
  bad.max_speed = 5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("aggregate examples") {
  CHECK(aggregate_table(std::vector<MeasurementRecord>{}).empty());

  std::vector<MeasurementRecord> two{record("a", Technology::NBIoT, 8, 60.0, true, kStaticIndoor),
                                     record("b", Technology::NBIoT, 8, 62.0, true, kStaticIndoor)};
  const auto cells = aggregate_table(two);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].sentinel == Sentinel::Insufficient);
  CHECK_FALSE(cells[0].pdr_pct);
  CHECK(cells[0].n_sent == 2);

  AggregateOptions loose;
  loose.min_samples = 2;
  const auto ok = aggregate_table(two, {}, loose);
  CHECK(*ok[0].pdr_pct == 100.0);
  CHECK(*ok[0].eb_uwh_per_byte == doctest::Approx(122.0 / 16.0));
}

TEST_CASE("E_b counts every sent packet unless delivered-only is asked for") {
  std::vector<MeasurementRecord> rs;
  for (int i = 0; i < 10; ++i)
    rs.push_back(record("d" + std::to_string(i), Technology::LoRaWAN, 10, i < 5 ? 10.0 : 30.0,
                        i < 5, kStaticOutdoor));
  const auto all = aggregate_table(rs);
  CHECK(*all[0].eb_uwh_per_byte == doctest::Approx(2.0));
  CHECK(*all[0].pdr_pct == 50.0);
  AggregateOptions d;
  d.delivered_only = true;
  d.min_samples = 5;
  CHECK(*aggregate_table(rs, {}, d)[0].eb_uwh_per_byte == doctest::Approx(1.0));
}

TEST_CASE("simulated NB-IoT 1-12 B static-indoor cell") {
  CampaignConfig cfg;
  cfg.technologies = {Technology::NBIoT};
  cfg.cycles = 3000;
  cfg.scenario = kStaticIndoor;
  cfg.seed = 21;
  cfg.payload[Technology::NBIoT] = {PayloadRule::Uniform, 1, 12};
  RecordStore store;
  for (const auto& r : run_campaign(cfg).records) store.ingest(r);
  const auto cells = aggregate_table(store);
  const auto* c = find_cell(cells, Technology::NBIoT, PayloadBucket::B1_12, kStaticIndoor);
  REQUIRE(c);
  CHECK(std::abs(*c->pdr_pct / 100.0 - 0.9310) <= oracle::binomial_3sigma(0.9310, 3000));
  CHECK(std::abs(*c->eb_uwh_per_byte / 60.52 - 1.0) < 0.10);
}

TEST_CASE("aggregation is additive over disjoint stores") {
  const auto a = random_records(5, 600, "a");
  const auto b = random_records(6, 600, "b");
  auto both = a;
  both.insert(both.end(), b.begin(), b.end());
  AggregateOptions opts;
  opts.min_samples = 1;
  const auto ca = aggregate_table(a, {}, opts);
  const auto cb = aggregate_table(b, {}, opts);
  const auto cab = aggregate_table(both, {}, opts);
  for (const auto& c : cab) {
    const auto* x = find_cell(ca, c.technology, c.bucket, c.scenario);
    const auto* y = find_cell(cb, c.technology, c.bucket, c.scenario);
    AggregateCell m;
    if (x && y) m = merge_cells(*x, *y, opts);
    else m = x ? *x : *y;
    CHECK(m.n_sent == c.n_sent);
    CHECK(m.n_received == c.n_received);
    CHECK(m.bytes_sum == c.bytes_sum);
    CHECK(m.energy_uwh_sum == doctest::Approx(c.energy_uwh_sum));
    CHECK(*m.pdr_pct == doctest::Approx(*c.pdr_pct));
  }
  CHECK_THROWS_AS(merge_cells(cab[0], cab[1]), Error);
}

TEST_CASE("speed_series") {
  CHECK(speed_series({}, Technology::Sigfox).empty());

  std::vector<MeasurementRecord> still;
  for (int i = 0; i < 20; ++i)
    still.push_back(record("s" + std::to_string(i), Technology::LoRaWAN, 8, 1.0, i % 2 == 0,
                           kStaticIndoor));
  const auto s = speed_series(still, Technology::LoRaWAN);
  REQUIRE(s.size() == 1);
  CHECK(s[0].bucket == SpeedBucket::Static);
  CHECK(s[0].pdr_pct == 50.0);

  std::vector<MeasurementRecord> all;
  for (double v : {0.0, 5.0, 20.0, 50.0}) {
    CampaignConfig cfg;
    cfg.technologies = {Technology::Sigfox};
    cfg.cycles = 2000;
    cfg.seed = 31;
    cfg.scenario = v == 0.0 ? kStaticOutdoor : kMobileOutdoor;
    if (v > 0.0) cfg.speed_kmh = v;
    cfg.record_id_prefix = "v" + std::to_string(static_cast<int>(v));
    const auto r = run_campaign(cfg).records;
    all.insert(all.end(), r.begin(), r.end());
  }
  const auto curve = speed_series(all, Technology::Sigfox);
  REQUIRE(curve.size() == 4);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].pdr_pct < curve[i - 1].pdr_pct);
}

TEST_CASE("export_series") {
  const auto rs = random_records(8, 500, "x");
  CHECK_THROWS_AS(export_series(rs, "foo", "energy_uwh"), Error);
  try {
    export_series(rs, "payload_bytes", "foo");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownField);
  }

  const auto s = export_series(rs, "payload_bytes", "energy_uwh");
  CHECK(s.points.size() == rs.size());
  for (std::size_t i = 1; i < s.points.size(); ++i)
    CHECK(s.points[i - 1].first <= s.points[i].first);

  FilterExpr nb;
  nb.technology = Technology::NBIoT;
  const auto rssi = export_series(rs, "payload_bytes", "rssi_dbm", nb);
  CHECK(rssi.points.size() + rssi.skipped == static_cast<std::size_t>(std::count_if(
                                                 rs.begin(), rs.end(), [](const auto& r) {
                                                   return r.technology == Technology::NBIoT;
                                                 })));

  // Simulated NB-IoT energy trends upward with payload.
  CampaignConfig cfg;
  cfg.technologies = {Technology::NBIoT};
  cfg.cycles = 1500;
  cfg.scenario = kStaticOutdoor;
  cfg.seed = 2;
  const auto sim = export_series(run_campaign(cfg).records, "payload_bytes", "energy_uwh");
  const std::size_t third = sim.points.size() / 3;
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < third; ++i) {
    lo += sim.points[i].second;
    hi += sim.points[sim.points.size() - 1 - i].second;
  }
  CHECK(hi > lo);
}

TEST_CASE("the backing file reproduces the store") {
  const auto path = temp_path("store.jsonl");
  const auto rs = random_records(12, 300, "p");
  std::vector<AggregateCell> before;
  std::string dumped;
  {
    RecordStore store(path);
    for (const auto& r : rs) store.ingest(r);
    for (const auto& r : rs) CHECK_FALSE(store.ingest(r).inserted);
    before = aggregate_table(store);
    std::ostringstream out;
    store.dump(out);
    dumped = out.str();
  }
  RecordStore reloaded(path);
  CHECK(reloaded.size() == rs.size());
  std::ostringstream out;
  reloaded.dump(out);
  CHECK(out.str() == dumped);
  const auto after = aggregate_table(reloaded);
  REQUIRE(after.size() == before.size());
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(after[i].n_sent == before[i].n_sent);
    CHECK(after[i].pdr_pct == before[i].pdr_pct);
    CHECK(after[i].eb_uwh_per_byte == before[i].eb_uwh_per_byte);
  }
  std::filesystem::remove(path);
}

TEST_CASE("concurrent writers and readers") {
  RecordStore store;
  const int writers = 4;
  const int per_writer = 250;
  std::atomic<bool> done{false};
  std::atomic<int> bad_reads{0};
  std::vector<std::thread> threads;
  for (int w = 0; w < writers; ++w)
    threads.emplace_back([&, w] {
      // Each writer also replays half of its neighbour's ids.
      const auto own = random_records(100 + w, per_writer, "w" + std::to_string(w) + "-");
      const auto other =
          random_records(100 + (w + 1) % writers, per_writer / 2,
                         "w" + std::to_string((w + 1) % writers) + "-");
      for (int i = 0; i < per_writer; ++i) {
        store.ingest(own[static_cast<std::size_t>(i)]);
        if (i < per_writer / 2) store.ingest(other[static_cast<std::size_t>(i)]);
      }
    });
  std::thread reader([&] {
    while (!done) {
      const auto rs = store.query();
      for (const auto& r : rs)
        if (validate_record(r)) ++bad_reads;
      const auto cells = aggregate_table(rs);
      std::int64_t n = 0;
      for (const auto& c : cells) n += c.n_sent;
      if (n != static_cast<std::int64_t>(rs.size())) ++bad_reads;
    }
  });
  for (auto& t : threads) t.join();
  done = true;
  reader.join();
  CHECK(bad_reads == 0);
  CHECK(store.size() == static_cast<std::size_t>(writers * per_writer));
}

TEST_CASE("table rendering") {
  AggregateOptions opts;
  opts.min_samples = 1;
  const auto cells = aggregate_table(random_records(4, 200, "t"), {}, opts);
  const auto csv = cells_to_csv(cells);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(cells.size() + 1));
  const auto md = cells_to_markdown(cells);
  CHECK(md.find("|") != std::string::npos);
  const auto j = to_json(cells[0]);
  CHECK(j.contains("technology"));
  CHECK(j.contains("pdr_pct"));
}
