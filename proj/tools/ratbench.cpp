// Command-line front end: simulate, fit, report, compare, serve.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ratbench/campaign.hpp"
#include "ratbench/energy_model.hpp"
#include "ratbench/ingest.hpp"
#include "ratbench/pdr.hpp"
#include "ratbench/record_io.hpp"
#include "ratbench/reference_data.hpp"
#include "ratbench/service.hpp"

namespace fs = std::filesystem;
using namespace ratbench;

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

// File references inside a document are relative to the document.
std::string resolve(const std::string& ref, const std::string& doc_path) {
  const fs::path p(ref);
  if (p.is_absolute()) return ref;
  return (fs::path(doc_path).parent_path() / p).string();
}

// Output goes to `path`, or stdout for "" and "-".
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write(out);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

Models load_models(const std::string& model_path, const std::string& pdr_path) {
  EnergyModel energy = model_path.empty() ? shipped_model() : read_model_file(model_path);
  PdrModel pdr = pdr_path.empty() ? PdrModel{} : read_pdr_file(pdr_path);
  return Models(std::move(energy), std::move(pdr));
}

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> cycles;
  std::string out;
  std::string model;
  std::string pdr;
  std::string events;
};

int run_simulate(const SimulateArgs& a) {
  const auto doc = read_json_file(a.config);
  auto cfg = campaign_config_from_json(doc);
  if (a.seed) cfg.seed = *a.seed;
  if (a.cycles) cfg.cycles = *a.cycles;
  std::string model = a.model;
  std::string pdr = a.pdr;
  if (model.empty() && doc.contains("model")) model = resolve(doc.at("model"), a.config);
  if (pdr.empty() && doc.contains("pdr_table")) pdr = resolve(doc.at("pdr_table"), a.config);
  const auto result = run_campaign(cfg, load_models(model, pdr));
  with_output(a.out, [&](std::ostream& o) { write_jsonl(o, result.records); });
  if (!a.events.empty())
    with_output(a.events, [&](std::ostream& o) { write_event_log(o, result.events); });
  std::cerr << "simulate: " << result.records.size() << " records, report overhead "
            << result.overhead_energy_uwh << " uWh\n";
  return 0;
}

int run_fit(const std::string& targets_path, const std::string& out) {
  const auto targets =
      targets_path.empty() ? reference_targets() : targets_from_json(read_json_file(targets_path));
  const auto model = fit_power_profiles(targets);
  with_output(out, [&](std::ostream& o) { o << to_json(model).dump(2) << '\n'; });
  std::cerr << "fit: residual RMS " << model.residual_rms() << " (log E_b)\n";
  for (const auto& [key, fit] : model.fits)
    for (const auto& note : fit.notes)
      std::cerr << "  " << to_string(key.first) << ' ' << to_string(key.second) << ": " << note
                << '\n';
  return 0;
}

struct ReportArgs {
  std::vector<std::string> in;
  bool delivered_only = false;
  std::string format = "md";
  std::string group = "table";
  int min_samples = kDefaultMinSamples;
  std::string out;
};

int run_report(const ReportArgs& a) {
  RecordStore store;
  for (const auto& path : a.in) {
    for (const auto& r : read_jsonl_file(path)) store.ingest(r);
  }
  const auto records = store.query();
  if (a.group == "speed") {
    nlohmann::json j = nlohmann::json::object();
    for (auto t : kAllTechnologies) {
      nlohmann::json s = nlohmann::json::array();
      for (const auto& p : speed_series(records, t)) s.push_back(to_json(p));
      j[std::string(to_string(t))] = s;
    }
    with_output(a.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    return 0;
  }
  const auto cells = aggregate_table(records, {}, {a.min_samples, a.delivered_only});
  with_output(a.out, [&](std::ostream& o) {
    if (a.format == "csv") {
      o << cells_to_csv(cells);
    } else if (a.format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& c : cells) j.push_back(to_json(c));
      o << j.dump(2) << '\n';
    } else {
      o << cells_to_markdown(cells);
    }
  });
  return 0;
}

struct CompareArgs {
  std::string workload;
  std::string policy_a;
  std::string policy_b;
  std::uint64_t seed = 0;
  std::string model;
  bool events = false;
};

int run_compare(const CompareArgs& a) {
  const auto w = workload_from_json(read_json_file(a.workload));
  const auto pa = read_policy_file(a.policy_a);
  const auto pb = read_policy_file(a.policy_b);
  const auto models = load_models(a.model, "");
  const auto c = compare_policies(w, pa, pb, models, a.seed);
  const nlohmann::json j{{"summary_a", to_json(c.a, a.events)},
                         {"summary_b", to_json(c.b, a.events)},
                         {"savings_factor", c.savings_factor},
                         {"seed", a.seed}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ratbench: multi-RAT LPWAN energy and delivery bench"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a measurement campaign");
  simulate->add_option("--config", sim.config, "Campaign config (JSON)")->required();
  simulate->add_option("--seed", sim.seed, "Master seed, overrides the config");
  simulate->add_option("--cycles", sim.cycles, "Cycle count, overrides the config");
  simulate->add_option("--out", sim.out, "Records (JSON Lines); stdout when omitted");
  simulate->add_option("--model", sim.model, "Energy model file; default the shipped fit");
  simulate->add_option("--pdr", sim.pdr, "PDR table file; default the reference table");
  simulate->add_option("--events", sim.events, "Event log (JSON Lines)");

  std::string targets;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "Fit power profiles to per-bucket targets");
  fit->add_option("--targets", targets, "Targets (JSON); default the built-in table");
  fit->add_option("--out", fit_out, "Model file; stdout when omitted");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Aggregate records per technology and bucket");
  report->add_option("--in", rep.in, "Records (JSON Lines), repeatable")->required();
  report->add_flag("--delivered-only", rep.delivered_only, "E_b over delivered packets only");
  report->add_option("--format", rep.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "md"}));
  report->add_option("--group", rep.group, "table or speed")
      ->check(CLI::IsMember({"table", "speed"}));
  report->add_option("--min-samples", rep.min_samples, "Cells below this are insufficient")
      ->check(CLI::PositiveNumber);
  report->add_option("--out", rep.out, "Output file; stdout when omitted");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Compare two policies on a workload");
  compare->add_option("--workload", cmp.workload, "Workload (JSON)")->required();
  compare->add_option("--policy-a", cmp.policy_a, "Baseline policy (JSON)")->required();
  compare->add_option("--policy-b", cmp.policy_b, "Alternative policy (JSON)")->required();
  compare->add_option("--seed", cmp.seed, "Seed shared by both runs");
  compare->add_option("--model", cmp.model, "Energy model file; default the shipped fit");
  compare->add_flag("--events", cmp.events, "Include per-transmission events");

  std::string addr = "127.0.0.1:8080";
  std::string data_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  serve_cmd->add_option("--addr", addr, "host:port to bind");
  serve_cmd->add_option("--data", data_dir, "Directory holding records.jsonl")->required();
  std::string serve_model;
  serve_cmd->add_option("--model", serve_model, "Energy model file; default the shipped fit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(sim);
    if (*fit) return run_fit(targets, fit_out);
    if (*report) return run_report(rep);
    if (*compare) return run_compare(cmp);
    if (*serve_cmd) {
      const auto models = load_models(serve_model, "");
      std::cerr << "serving on " << addr << ", data in " << data_dir << '\n';
      serve(addr, data_dir, models);
      return 0;
    }
  } catch (const RecordRejected& e) {
    std::cerr << "error: " << to_string(e.code()) << " (" << to_string(e.detail())
              << "): " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
