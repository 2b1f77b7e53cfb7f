// Acceptance suite: one PASS/FAIL line per headline criterion. The campaign
// criteria drive the real executable end to end; the rest run the library
// against the independent oracles in oracles.hpp.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "ratbench/airtime.hpp"
#include "ratbench/calibration.hpp"
#include "ratbench/campaign.hpp"
#include "ratbench/duty_cycle.hpp"
#include "ratbench/ingest.hpp"
#include "ratbench/record_io.hpp"
#include "ratbench/reference_data.hpp"
#include "ratbench/rng.hpp"

namespace fs = std::filesystem;
using namespace ratbench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Paths {
  std::string cli;
  fs::path data;
  fs::path work;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI with stdout and stderr captured to files under the work dir.
void run_cli(const Paths& p, const std::string& args, const std::string& tag) {
  const auto out = p.work / (tag + ".stdout");
  const auto err = p.work / (tag + ".stderr");
  const std::string cmd =
      quote(p.cli) + " " + args + " > " + quote(out.string()) + " 2> " + quote(err.string());
  if (std::system(cmd.c_str()) != 0) {
    std::ifstream e(err);
    std::stringstream ss;
    ss << e.rdbuf();
    throw std::runtime_error(tag + " failed: " + ss.str());
  }
}

nlohmann::json load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Outcome table_regression(const Paths& p) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = (p.work / "model.json").string();
  run_cli(p, "fit --targets " + quote((p.data / "table1.json").string()) + " --out " + quote(model),
          "fit");
  std::string inputs;
  for (const char* s : {"static-indoor", "static-outdoor", "mobile-outdoor"}) {
    const auto cfg = p.data / "configs" / (std::string("campaign-") + s + ".json");
    const auto out = (p.work / (std::string(s) + ".jsonl")).string();
    run_cli(p, "simulate --config " + quote(cfg.string()) + " --model " + quote(model) +
                   " --out " + quote(out),
            std::string("simulate-") + s);
    inputs += " --in " + quote(out);
  }
  const auto report = (p.work / "table.json").string();
  run_cli(p, "report" + inputs + " --format json --out " + quote(report), "report");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto cells = load(report);
  int checked = 0;
  std::vector<std::string> misses;
  for (const auto& ref : targets_from_json(load(p.data / "table1.json"))) {
    if (!ref.pdr_pct && !ref.eb_uwh_per_byte) continue;
    const std::string key = std::string(to_string(ref.technology)) + " " +
                            std::string(to_string(ref.bucket)) + " " + to_string(ref.scenario);
    const nlohmann::json* got = nullptr;
    for (const auto& c : cells)
      if (c.at("technology") == to_string(ref.technology) &&
          c.at("bucket") == to_string(ref.bucket) && c.at("scenario") == to_string(ref.scenario))
        got = &c;
    if (!got) {
      misses.push_back(key + " missing");
      continue;
    }
    const auto n = got->at("n_sent").get<double>();
    if (ref.pdr_pct) {
      ++checked;
      const double want = *ref.pdr_pct / 100.0;
      const auto& v = got->at("pdr_pct");
      if (!v.is_number() ||
          std::abs(v.get<double>() / 100.0 - want) > oracle::binomial_3sigma(want, n))
        misses.push_back(key + " PDR " + v.dump() + " vs " + fmt(*ref.pdr_pct, 2));
    }
    if (ref.eb_uwh_per_byte) {
      ++checked;
      const auto& v = got->at("eb_uwh_per_byte");
      if (!v.is_number() || std::abs(v.get<double>() / *ref.eb_uwh_per_byte - 1.0) > 0.10)
        misses.push_back(key + " E_b " + v.dump() + " vs " + fmt(*ref.eb_uwh_per_byte, 2));
    }
  }
  std::string detail = std::to_string(checked) + " values checked, runtime " + fmt(secs, 1) + " s";
  for (const auto& m : misses) detail += "; " + m;
  return {misses.empty() && checked > 0 && secs < 60.0, detail};
}

Outcome factor_four(const Paths& p) {
  run_cli(p,
          "compare --workload " + quote((p.data / "workloads/alive-8b.json").string()) +
              " --policy-a " + quote((p.data / "policies/multi-rat.json").string()) +
              " --policy-b " + quote((p.data / "policies/nbiot-only.json").string()) +
              " --seed 7919 --model " + quote((p.work / "model.json").string()),
          "compare");
  const auto j = load(p.work / "compare.stdout");
  const double f = j.at("savings_factor").get<double>();
  return {f >= 4.0, "savings factor " + fmt(f, 2)};
}

Outcome mobility_sweep(const Paths& p) {
  struct Point {
    double speed;
    SpeedBucket bucket;
  };
  const std::vector<Point> sweep{{0.0, SpeedBucket::Static},
                                 {5.0, SpeedBucket::Lt10},
                                 {20.0, SpeedBucket::B10To30},
                                 {50.0, SpeedBucket::Gt30}};
  const std::map<std::string, std::vector<double>> expected{{"Sigfox", {78, 53, 34, 17}},
                                                            {"NB-IoT", {88, 83, 86, 79}},
                                                            {"LoRaWAN", {51, 51, 56, 43}}};
  std::string inputs;
  for (const auto& pt : sweep) {
    const auto tag = "sweep-" + std::to_string(static_cast<int>(pt.speed));
    const nlohmann::json cfg{{"scenario", "mobile-outdoor"},
                             {"speed_kmh", pt.speed},
                             {"cycles", 5000},
                             {"seed", 7919},
                             {"payload", {{"*", {{"rule", "uniform"}, {"min", 1}, {"max", 12}}}}},
                             {"record_id_prefix", tag}};
    const auto cfg_path = p.work / (tag + ".json");
    std::ofstream(cfg_path) << cfg.dump(2);
    const auto out = (p.work / (tag + ".jsonl")).string();
    run_cli(p, "simulate --config " + quote(cfg_path.string()) + " --out " + quote(out), tag);
    inputs += " --in " + quote(out);
  }
  const auto report = (p.work / "speed.json").string();
  run_cli(p, "report" + inputs + " --group speed --format json --out " + quote(report),
          "report-speed");
  const auto j = load(report);

  std::vector<std::string> misses;
  std::map<std::string, double> spread;
  std::vector<double> sigfox;
  for (const auto& [tech, want] : expected) {
    const auto& series = j.at(tech);
    if (series.size() != sweep.size()) {
      misses.push_back(tech + " has " + std::to_string(series.size()) + " speed buckets");
      continue;
    }
    double lo = 100.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const auto& pt = series[i];
      if (pt.at("speed_bucket") != to_string(sweep[i].bucket))
        misses.push_back(tech + " bucket order");
      const double got = pt.at("pdr_pct").get<double>();
      const double n = pt.at("n_sent").get<double>();
      if (std::abs(got - want[i]) / 100.0 > oracle::binomial_3sigma(want[i] / 100.0, n))
        misses.push_back(tech + " " + std::string(to_string(sweep[i].bucket)) + " " + fmt(got, 1) +
                         " vs " + fmt(want[i], 0));
      lo = std::min(lo, got);
      hi = std::max(hi, got);
      if (tech == "Sigfox") sigfox.push_back(got);
    }
    spread[tech] = hi - lo;
  }
  for (std::size_t i = 1; i < sigfox.size(); ++i)
    if (!(sigfox[i] < sigfox[i - 1])) misses.push_back("Sigfox not strictly decreasing");
  if (!(spread["NB-IoT"] < spread["Sigfox"] && spread["LoRaWAN"] < spread["Sigfox"]))
    misses.push_back("spread ordering");
  std::string detail = "spreads Sigfox " + fmt(spread["Sigfox"], 1) + ", NB-IoT " +
                       fmt(spread["NB-IoT"], 1) + ", LoRaWAN " + fmt(spread["LoRaWAN"], 1);
  for (const auto& m : misses) detail += "; " + m;
  return {misses.empty(), detail};
}

Outcome airtime_oracle(const Paths&) {
  int cases = 0;
  double worst = 0.0;
  for (int sf = 7; sf <= 12; ++sf)
    for (int bw : {125000, 250000, 500000})
      for (int payload : {1, 5, 12, 13, 33, 51, 52, 100, 128, 200, 255, 256}) {
        auto lp = LoRaParams::uplink(sf, bw);
        const double ours = lora_time_on_air(lp, payload).total_on_air_ms();
        const double ref = oracle::lora_toa_ms(sf, bw, lp.coding_rate_index, lp.preamble_symbols,
                                               lp.explicit_header, lp.crc_on,
                                               lora_ldro_required(sf, bw), payload);
        worst = std::max(worst, std::abs(ours - ref) / ref);
        ++cases;
      }
  bool sigfox_exact = true;
  const SigfoxFrameParams d;
  for (int n = 1; n <= 12; ++n)
    for (const auto& ph : sigfox_airtime(d, n).phases)
      if (ph.state == RadioState::Tx && ph.duration_ms != oracle::sigfox_frame_ms(n, 14, 100))
        sigfox_exact = false;
  return {cases >= 200 && worst < 1e-3 && sigfox_exact,
          std::to_string(cases) + " LoRa cases, worst relative error " + std::to_string(worst) +
              ", Sigfox " + (sigfox_exact ? "exact" : "mismatch")};
}

Outcome duty_property(const Paths&) {
  Xoshiro256 rng(7919);
  int violations = 0;
  for (int s = 0; s < 1000; ++s) {
    DutyCycleLedger ledger;
    std::vector<oracle::Interval> iv;
    std::int64_t now = 0;
    const int n = static_cast<int>(rng.uniform_int(2, 60));
    for (int k = 0; k < n; ++k) {
      const auto len = rng.uniform_int(1, 6240);
      const auto t = duty_next_allowed(ledger, now, len);
      ledger.record(t, len);
      iv.push_back({t, len});
      now = t + len + (rng.uniform() < 0.5 ? 0 : rng.uniform_int(0, 900000));
    }
    if (oracle::worst_window_fraction(iv, ledger.window_ms()) > 0.01 + 1e-12) ++violations;
  }
  return {violations == 0, "1000 schedules, " + std::to_string(violations) + " violations"};
}

Outcome calibration(const Paths& p) {
  Xoshiro256 rng(7919);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double truth = 0.9 + 0.2 * rng.uniform();
    std::vector<EnergyPair> pairs;
    for (int i = 0; i < 120; ++i) {
      const double device = 20.0 + rng.uniform() * 900.0;
      pairs.push_back({device, truth * device * (1.0 + 0.01 * rng.normal())});
    }
    worst = std::max(worst, std::abs(calibrate_scale(pairs).scale / truth - 1.0));
  }
  struct Published {
    const char* slug;
    double median, q1, q3, lo_w, hi_w;
    std::vector<double> outliers;
  };
  const std::vector<Published> published{
      {"lorawan", 0.24, -1.12, 0.93, -3.91, 3.64, {-4.49, -4.25, 4.45}},
      {"sigfox", -0.08, -0.6, 0.84, -2.42, 2.46, {-3.43, -3.06}},
      {"nbiot", 0.06, -1.43, 1.54, -5.17, 3.41, {}},
  };
  std::vector<std::string> misses;
  for (const auto& pub : published) {
    const auto v = load(p.data / "fixtures" / (std::string("residuals_") + pub.slug + ".json"))
                       .at("residuals_pct")
                       .get<std::vector<double>>();
    const auto s = residual_box_stats(v);
    if (s.median != pub.median || s.lower_quartile != pub.q1 || s.upper_quartile != pub.q3 ||
        s.lower_whisker != pub.lo_w || s.upper_whisker != pub.hi_w || s.outliers != pub.outliers)
      misses.push_back(pub.slug);
  }
  std::string detail = "worst scale error " + fmt(100.0 * worst, 3) + "%";
  detail += misses.empty() ? ", fixtures exact" : ", fixture mismatch:";
  for (const auto& m : misses) detail += " " + m;
  return {worst <= 0.01 && misses.empty(), detail};
}

Outcome ladder_oracle(const Paths&) {
  const auto& models = Models::shipped();
  int ladders = 0;
  double worst = 0.0;
  for (auto scen : kScenarios)
    for (int payload : {8, 40}) {
      Context ctx;
      ctx.scenario = scen;
      MessageSpec msg;
      msg.payload_bytes = payload;
      msg.critical = true;
      std::function<void(std::vector<LadderRung>, int)> grow = [&](std::vector<LadderRung> lad,
                                                                   int used) {
        if (!lad.empty()) {
          std::vector<oracle::Rung> rungs;
          for (const auto& r : lad) {
            if (payload > max_payload(r.tech)) continue;
            const auto c = expected_cost(r.tech, msg, ctx, models, false, r.confirmed);
            rungs.push_back({c.energy_uwh, *c.pdr, r.attempts, r.confirmed});
          }
          if (!rungs.empty()) {
            Policy pol;
            pol.ladder = lad;
            const auto plan = confirmed_ladder_plan(pol, msg, ctx, models);
            const auto ref = oracle::enumerate_ladder(rungs);
            worst = std::max({worst, std::abs(plan.expected_energy_uwh - ref.energy),
                              std::abs(plan.expected_delivery_probability - ref.delivered)});
            ++ladders;
          }
        }
        for (auto t : kAllTechnologies)
          for (int a = 1; used + a <= 4; ++a)
            for (bool confirmed : {true, false}) {
              auto next = lad;
              next.push_back({t, a, confirmed});
              grow(next, used + a);
            }
      };
      grow({}, 0);
    }

  Context indoor;
  indoor.scenario = Scenario{Placement::Indoor, Mobility::Static};
  MessageSpec alive;
  alive.payload_bytes = 8;
  alive.critical = true;
  Policy pol;
  pol.ladder = {{Technology::LoRaWAN, 2, true}, {Technology::NBIoT, 1, true}};
  const double ladder = confirmed_ladder_plan(pol, alive, indoor, models).expected_energy_uwh;
  alive.critical = false;
  const double direct = expected_cost(Technology::NBIoT, alive, indoor, models).energy_uwh;
  return {worst <= 1e-9 && ladder < direct,
          std::to_string(ladders) + " ladders, worst deviation " + std::to_string(worst) +
              "; ladder " + fmt(ladder, 2) + " uWh vs direct NB-IoT " + fmt(direct, 2) + " uWh"};
}

Outcome determinism(const Paths& p) {
  const auto cfg = (p.data / "configs/campaign-mobile-outdoor.json").string();
  const auto a = (p.work / "det-a.jsonl").string();
  const auto b = (p.work / "det-b.jsonl").string();
  run_cli(p, "simulate --config " + quote(cfg) + " --cycles 1000 --out " + quote(a), "det-a");
  run_cli(p, "simulate --config " + quote(cfg) + " --cycles 1000 --out " + quote(b), "det-b");
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto text = slurp(a);
  const bool identical = !text.empty() && text == slurp(b);

  const auto store_path = p.work / "store.jsonl";
  fs::remove(store_path);
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<AggregateCell> before;
  {
    RecordStore store(store_path.string());
    store.ingest_batch(text);
    first = store.size();
    store.ingest_batch(text);
    second = store.size();
    before = aggregate_table(store);
  }
  RecordStore reloaded(store_path.string());
  const auto after = aggregate_table(reloaded);
  bool same = after.size() == before.size();
  for (std::size_t i = 0; same && i < after.size(); ++i)
    same = to_json(after[i]) == to_json(before[i]);
  return {identical && first == second && first > 0 && same,
          std::string("streams ") + (identical ? "identical" : "differ") + ", store " +
              std::to_string(first) + " then " + std::to_string(second) + ", reload " +
              (same ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ratbench acceptance suite"};
  Paths paths;
  std::string data;
  std::string work;
  app.add_option("--cli", paths.cli, "ratbench executable")->required();
  app.add_option("--data", data, "shipped data directory")->required();
  app.add_option("--work", work, "scratch directory")->required();
  CLI11_PARSE(app, argc, argv);
  paths.data = data;
  paths.work = work;
  fs::create_directories(paths.work);

  const std::vector<std::pair<std::string, std::function<Outcome(const Paths&)>>> criteria{
      {"table-regression", table_regression}, {"factor-four", factor_four},
      {"mobility-sweep", mobility_sweep},     {"airtime-oracle", airtime_oracle},
      {"duty-cycle-property", duty_property}, {"calibration", calibration},
      {"ladder-oracle", ladder_oracle},       {"determinism-idempotency", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check(paths);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
