#include "ratbench/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include "ratbench/record_io.hpp"
#include "ratbench/rng.hpp"

namespace ratbench {

namespace {

std::string tech_slug(Technology t) {
  switch (t) {
    case Technology::LoRaWAN: return "lorawan";
    case Technology::Sigfox: return "sigfox";
    case Technology::NBIoT: return "nbiot";
  }
  return "?";
}

std::string record_id(const CampaignConfig& cfg, int cycle, Technology tech) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "-%016llx-%06d-", static_cast<unsigned long long>(cfg.seed),
                cycle);
  return cfg.record_id_prefix + buf + tech_slug(tech);
}

PayloadSampling sampling_for(const CampaignConfig& cfg, Technology tech) {
  const auto it = cfg.payload.find(tech);
  return it == cfg.payload.end() ? PayloadSampling{} : it->second;
}

int payload_hi(const PayloadSampling& ps, Technology tech) {
  return ps.max.value_or(max_payload(tech));
}

// Buckets a stratified draw may land in.
std::vector<PayloadBucket> eligible_buckets(const PayloadSampling& ps, Technology tech,
                                            const PdrTable& table, Scenario scenario) {
  std::vector<PayloadBucket> out;
  for (auto b : kPayloadBuckets) {
    const auto r = byte_range(b);
    if (std::max(ps.min, r.lo) > std::min(payload_hi(ps, tech), r.hi)) continue;
    const auto v = table.at(tech, b, scenario);
    if (const auto* s = std::get_if<Sentinel>(&v); s && *s == Sentinel::Unsupported) continue;
    out.push_back(b);
  }
  return out;
}

int sample_payload(const PayloadSampling& ps, Technology tech,
                   const std::vector<PayloadBucket>& buckets, Xoshiro256& rng) {
  const int hi = payload_hi(ps, tech);
  if (ps.rule == PayloadRule::Uniform) return static_cast<int>(rng.uniform_int(ps.min, hi));
  const auto b = buckets[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(buckets.size()) - 1))];
  const auto r = byte_range(b);
  return static_cast<int>(rng.uniform_int(std::max(ps.min, r.lo), std::min(hi, r.hi)));
}

TechParams tech_params_for(Technology tech, int context) {
  switch (tech) {
    case Technology::LoRaWAN: return LoRaWanParams{context, true};
    case Technology::Sigfox: return SigfoxParams{};
    case Technology::NBIoT: {
      NbiotParams p;
      p.ce_level = context;
      return p;
    }
  }
  return LoRaWanParams{};
}

// Offset of the end of the last tx phase from the start of the profile.
double last_tx_end_ms(const AirtimeProfile& p) {
  double t = 0.0;
  double end = 0.0;
  for (const auto& ph : p.phases) {
    t += ph.duration_ms;
    if (ph.state == RadioState::Tx) end = t;
  }
  return end;
}

int tx_power_for(const CampaignConfig& cfg, Technology tech) {
  const auto it = cfg.tx_power_dbm.find(tech);
  return it == cfg.tx_power_dbm.end() ? default_tx_power_dbm(tech) : it->second;
}

const std::set<std::string>& campaign_keys() {
  static const std::set<std::string> keys{
      "technologies", "cycles",          "payload",        "tx_power_dbm",
      "sigfox_tx_power_dbm", "scenario", "speed_kmh",      "field_speed_range_kmh",
      "seed",         "conformance",     "report",         "report_channel",
      "report_ce_level", "start_epoch_ms", "cycle_gap_ms", "record_id_prefix",
      "model",        "pdr_table"};
  return keys;
}

PayloadRule parse_payload_rule(const std::string& s) {
  if (s == "uniform") return PayloadRule::Uniform;
  if (s == "bucket_stratified") return PayloadRule::BucketStratified;
  throw Error(ErrorCode::ConfigInvalid, "unknown payload rule '" + s + "'");
}

PayloadSampling payload_sampling_from_json(const nlohmann::json& j) {
  PayloadSampling ps;
  if (j.contains("rule")) ps.rule = parse_payload_rule(j.at("rule").get<std::string>());
  ps.min = j.value("min", 1);
  if (j.contains("max") && !j.at("max").is_null()) ps.max = j.at("max").get<int>();
  return ps;
}

}  // namespace

void CampaignConfig::validate() const {
  if (cycles < 1) throw Error(ErrorCode::ConfigInvalid, "cycles must be >= 1");
  if (technologies.empty()) throw Error(ErrorCode::ConfigInvalid, "no technology enabled");
  if (!is_valid(scenario))
    throw Error(ErrorCode::ConfigInvalid, "invalid scenario " + to_string(scenario));
  if (speed_kmh && !(*speed_kmh >= 0.0))
    throw Error(ErrorCode::ConfigInvalid, "speed must be >= 0");
  if (speed_kmh && *speed_kmh > 0.0 && scenario.mobility == Mobility::Static)
    throw Error(ErrorCode::ConfigInvalid, "static scenario with non-zero speed");
  if (!(field_speed_range_kmh.first >= 0.0 &&
        field_speed_range_kmh.first <= field_speed_range_kmh.second))
    throw Error(ErrorCode::ConfigInvalid, "field speed range must satisfy 0 <= lo <= hi");
  for (const auto& [tech, ps] : payload) {
    if (ps.min < 1 || payload_hi(ps, tech) > max_payload(tech) || ps.min > payload_hi(ps, tech))
      throw Error(ErrorCode::ConfigInvalid, "payload range for " + std::string(to_string(tech)) +
                                                " must satisfy 1 <= min <= max <= " +
                                                std::to_string(max_payload(tech)));
  }
  if (conformance && tx_power_for(*this, Technology::Sigfox) != 14)
    throw Error(ErrorCode::ConfigInvalid, "conformance mode fixes Sigfox at 14 dBm");
  if (report_ce_level < 0 || report_ce_level > 2)
    throw Error(ErrorCode::ConfigInvalid, "report CE level must be 0, 1 or 2");
  if (cycle_gap_ms < 0) throw Error(ErrorCode::ConfigInvalid, "cycle gap must be >= 0");
  std::set<Technology> seen(technologies.begin(), technologies.end());
  if (seen.size() != technologies.size())
    throw Error(ErrorCode::ConfigInvalid, "technology listed twice");
}

CampaignResult run_campaign(const CampaignConfig& cfg, const Models& models) {
  cfg.validate();
  const auto& energy = models.energy();
  std::vector<Technology> techs;
  for (auto t : kAllTechnologies)
    if (std::find(cfg.technologies.begin(), cfg.technologies.end(), t) != cfg.technologies.end())
      techs.push_back(t);

  struct TechSetup {
    Technology tech;
    PayloadSampling sampling;
    std::vector<PayloadBucket> buckets;
    int dbm;
    const ScenarioFit* fit;
    RadioTimings timings;
  };
  std::vector<TechSetup> setups;
  for (auto tech : techs) {
    TechSetup s{tech, sampling_for(cfg, tech), {}, tx_power_for(cfg, tech),
                &energy.fit(tech, cfg.scenario), energy.timings};
    s.timings.nbiot.ce_multiplier = s.fit->ce_multiplier;
    s.buckets = eligible_buckets(s.sampling, tech, models.pdr().table, cfg.scenario);
    if (s.sampling.rule == PayloadRule::BucketStratified && s.buckets.empty())
      throw Error(ErrorCode::ConfigInvalid,
                  "no supported bucket in the payload range of " + std::string(to_string(tech)));
    s.fit->power.tx_power_mw(s.dbm);  // rejects an unknown output power up front
    setups.push_back(std::move(s));
  }
  const auto& report_fit = energy.fit(Technology::NBIoT, cfg.scenario);
  RadioTimings report_timings = energy.timings;
  report_timings.nbiot.ce_multiplier = report_fit.ce_multiplier;
  const int report_dbm = tx_power_for(cfg, Technology::NBIoT);

  const bool mobile = cfg.scenario.mobility == Mobility::Mobile;
  const std::optional<double> pdr_speed = mobile ? cfg.speed_kmh : std::nullopt;

  CampaignResult out;
  out.records.reserve(static_cast<std::size_t>(cfg.cycles) * setups.size());
  std::map<Technology, DutyCycleLedger> ledgers;
  std::int64_t t = 0;

  for (int cycle = 0; cycle < cfg.cycles; ++cycle) {
    const std::size_t first_record = out.records.size();
    for (const auto& s : setups) {
      Xoshiro256 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(cycle),
                                 static_cast<std::uint64_t>(s.tech)));
      const int payload = sample_payload(s.sampling, s.tech, s.buckets, rng);
      int context = 0;
      std::tie(context, rng) = sample_context(*s.fit, payload, rng);
      double speed = 0.0;
      if (mobile) {
        if (cfg.speed_kmh) speed = *cfg.speed_kmh;
        else
          speed = cfg.field_speed_range_kmh.first +
                  (cfg.field_speed_range_kmh.second - cfg.field_speed_range_kmh.first) *
                      rng.uniform();
      }
      const auto pdr = resolve_pdr(models.pdr(), s.tech, payload, cfg.scenario, pdr_speed);
      if (!pdr)
        throw Error(ErrorCode::ConfigInvalid, "no PDR for " + std::string(to_string(s.tech)) +
                                                  " at " + std::to_string(payload) + " B");
      bool delivered = false;
      std::tie(delivered, rng) = sample_delivery(rng, pdr->p);

      const auto profile = transaction_profile(s.timings, s.tech, payload, context, false);
      const double e = transaction_energy(profile, s.fit->power, s.dbm);
      const auto slot = place_transaction(ledgers, t, s.tech, profile);
      if (slot.start_ms > t)
        out.events.push_back({t, "duty_wait",
                              {{"technology", std::string(to_string(s.tech))},
                               {"wait_ms", slot.start_ms - t}}});

      MeasurementRecord r;
      r.record_id = record_id(cfg, cycle, s.tech);
      r.technology = s.tech;
      r.timestamp_tx = cfg.start_epoch_ms + slot.start_ms;
      if (delivered)
        r.timestamp_rx = r.timestamp_tx + on_air_ms_ceil(last_tx_end_ms(profile));
      r.payload_bytes = payload;
      r.tx_power_dbm = s.dbm;
      r.energy_uwh = e;
      r.delivered = delivered;
      r.speed_kmh = speed;
      r.scenario = cfg.scenario;
      r.tech_params = tech_params_for(s.tech, context);
      out.events.push_back({slot.start_ms, "tx",
                            {{"record_id", r.record_id},
                             {"technology", std::string(to_string(s.tech))},
                             {"payload_bytes", payload},
                             {"context", context},
                             {"energy_uwh", e},
                             {"on_air_ms", profile.total_on_air_ms()},
                             {"delivered", delivered}}});
      out.records.push_back(std::move(r));
      t = slot.end_ms;
    }

    if (cfg.report) {
      std::size_t bytes = 0;
      for (std::size_t i = first_record; i < out.records.size(); ++i)
        bytes += to_json_line(out.records[i]).size() + 1;
      const int size = static_cast<int>(
          std::min<std::size_t>(bytes, static_cast<std::size_t>(max_payload(Technology::NBIoT))));
      const auto profile =
          transaction_profile(report_timings, Technology::NBIoT, size, cfg.report_ce_level, false);
      const double e = transaction_energy(profile, report_fit.power, report_dbm);
      const auto slot = place_transaction(ledgers, t, Technology::NBIoT, profile);
      out.overhead_energy_uwh += e;
      out.events.push_back({slot.start_ms, "report",
                            {{"cycle", cycle},
                             {"technology", "NB-IoT"},
                             {"payload_bytes", size},
                             {"energy_uwh", e},
                             {"category", "overhead"}}});
      t = slot.end_ms;
    }
    t += cfg.cycle_gap_ms;
  }
  return out;
}

CampaignConfig campaign_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "campaign config must be an object");
  for (const auto& [k, v] : j.items())
    if (!campaign_keys().count(k))
      throw Error(ErrorCode::UnknownField, "unknown campaign config key '" + k + "'");
  try {
    CampaignConfig c;
    if (j.contains("technologies")) {
      c.technologies.clear();
      for (const auto& t : j.at("technologies"))
        c.technologies.push_back(parse_technology(t.get<std::string>()));
    }
    c.cycles = j.value("cycles", 1);
    if (j.contains("payload"))
      for (const auto& [k, v] : j.at("payload").items()) {
        const auto ps = payload_sampling_from_json(v);
        if (k == "*")
          for (auto t : kAllTechnologies) c.payload.try_emplace(t, ps);
        else
          c.payload[parse_technology(k)] = ps;
      }
    if (j.contains("tx_power_dbm"))
      for (const auto& [k, v] : j.at("tx_power_dbm").items())
        c.tx_power_dbm[parse_technology(k)] = v.get<int>();
    if (j.contains("sigfox_tx_power_dbm"))
      c.tx_power_dbm[Technology::Sigfox] = j.at("sigfox_tx_power_dbm").get<int>();
    if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"));
    if (j.contains("speed_kmh") && !j.at("speed_kmh").is_null())
      c.speed_kmh = j.at("speed_kmh").get<double>();
    if (j.contains("field_speed_range_kmh")) {
      const auto& r = j.at("field_speed_range_kmh");
      c.field_speed_range_kmh = {r.at(0).get<double>(), r.at(1).get<double>()};
    }
    c.seed = j.value("seed", std::uint64_t{0});
    c.conformance = j.value("conformance", true);
    c.report = j.value("report", true);
    if (j.contains("report_channel") && j.at("report_channel").get<std::string>() != "NB-IoT")
      throw Error(ErrorCode::ConfigInvalid, "the report channel is NB-IoT");
    c.report_ce_level = j.value("report_ce_level", 0);
    c.start_epoch_ms = j.value("start_epoch_ms", c.start_epoch_ms);
    c.cycle_gap_ms = j.value("cycle_gap_ms", std::int64_t{0});
    c.record_id_prefix = j.value("record_id_prefix", c.record_id_prefix);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("campaign config: ") + e.what());
  }
}

nlohmann::json to_json(const CampaignConfig& c) {
  nlohmann::json techs = nlohmann::json::array();
  for (auto t : c.technologies) techs.push_back(std::string(to_string(t)));
  nlohmann::json payload = nlohmann::json::object();
  for (const auto& [t, ps] : c.payload) {
    nlohmann::json p = {{"rule", ps.rule == PayloadRule::Uniform ? "uniform" : "bucket_stratified"},
                        {"min", ps.min}};
    if (ps.max) p["max"] = *ps.max;
    payload[std::string(to_string(t))] = p;
  }
  nlohmann::json power = nlohmann::json::object();
  for (const auto& [t, dbm] : c.tx_power_dbm) power[std::string(to_string(t))] = dbm;
  nlohmann::json j = {{"technologies", techs},
                      {"cycles", c.cycles},
                      {"payload", payload},
                      {"tx_power_dbm", power},
                      {"scenario", to_string(c.scenario)},
                      {"field_speed_range_kmh",
                       {c.field_speed_range_kmh.first, c.field_speed_range_kmh.second}},
                      {"seed", c.seed},
                      {"conformance", c.conformance},
                      {"report", c.report},
                      {"report_channel", "NB-IoT"},
                      {"report_ce_level", c.report_ce_level},
                      {"start_epoch_ms", c.start_epoch_ms},
                      {"cycle_gap_ms", c.cycle_gap_ms},
                      {"record_id_prefix", c.record_id_prefix}};
  if (c.speed_kmh) j["speed_kmh"] = *c.speed_kmh;
  return j;
}

nlohmann::json to_json(const SimEvent& e) {
  return {{"t_ms", e.t_ms}, {"event_type", e.event_type}, {"details", e.details}};
}

void write_event_log(std::ostream& out, const std::vector<SimEvent>& events) {
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

// ---------------------------------------------------------------- workloads

void WorkloadSpec::validate() const {
  if (!(duration_h >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "duration must be >= 0");
  double weights = 0.0;
  for (const auto& it : items) {
    if (!(it.rate_per_h > 0.0))
      throw Error(ErrorCode::ConfigInvalid, "template '" + it.name + "' needs a rate > 0");
    if (!(it.weight >= 0.0))
      throw Error(ErrorCode::ConfigInvalid, "template '" + it.name + "' has a negative weight");
    it.message.validate();
    weights += it.weight;
  }
  if (!items.empty() && std::abs(weights - 1.0) > 1e-6)
    throw Error(ErrorCode::ConfigInvalid, "template weights must sum to 1");
  context.validate();
}

double Totals::eb() const {
  return bytes_sent > 0 ? energy_uwh / static_cast<double>(bytes_sent) : 0.0;
}

double Totals::pdr() const {
  return n_sent > 0 ? static_cast<double>(n_delivered) / static_cast<double>(n_sent) : 0.0;
}

Totals& Totals::operator+=(const Totals& o) {
  energy_uwh += o.energy_uwh;
  bytes_sent += o.bytes_sent;
  bytes_delivered += o.bytes_delivered;
  n_sent += o.n_sent;
  n_delivered += o.n_delivered;
  return *this;
}

SimSummary run_workload(const WorkloadSpec& w, const Policy& policy, const Models& models,
                        std::uint64_t seed) {
  w.validate();
  policy.validate();

  struct Arrival {
    std::int64_t t;
    std::size_t item;
  };
  std::vector<Arrival> arrivals;
  const double duration_ms = w.duration_h * 3'600'000.0;
  for (std::size_t i = 0; i < w.items.size(); ++i) {
    const double period = 3'600'000.0 / w.items[i].rate_per_h;
    for (std::int64_t k = 0; static_cast<double>(k) * period < duration_ms; ++k)
      arrivals.push_back({std::llround(static_cast<double>(k) * period), i});
  }
  std::stable_sort(arrivals.begin(), arrivals.end(),
                   [](const Arrival& a, const Arrival& b) { return a.t < b.t; });

  SimSummary sum;
  std::map<Technology, DutyCycleLedger> ledgers;
  std::int64_t t_free = w.context.now_ms;
  Context ctx = w.context;
  ctx.duty.clear();

  for (std::size_t j = 0; j < arrivals.size(); ++j) {
    const auto& item = w.items[arrivals[j].item];
    const auto& msg = item.message;
    ctx.now_ms = std::max(w.context.now_ms + arrivals[j].t, t_free);
    const std::int64_t arrival_ms = w.context.now_ms + arrivals[j].t;

    // Rungs as (tech, attempts, confirmed); a direct send is one unconfirmed rung.
    struct Rung {
      Technology tech;
      int attempts;
      bool confirmed;
    };
    std::vector<Rung> rungs;
    try {
      if (msg.critical) {
        const auto plan = confirmed_ladder_plan(policy, msg, ctx, models);
        int last = -1;
        for (const auto& s : plan.steps)
          if (s.rung != last) {
            rungs.push_back({s.tech, s.attempts, s.confirmed});
            last = s.rung;
          }
      } else {
        rungs.push_back({select_rat(policy, msg, ctx, models), 1, false});
      }
    } catch (const Error& e) {
      throw Error(e.code(), "template '" + item.name + "': " + e.what());
    }

    bool delivered = false;
    std::map<Technology, std::uint64_t> attempt_no;
    std::int64_t t = ctx.now_ms;
    for (const auto& rung : rungs) {
      bool acked = false;
      for (int a = 0; a < rung.attempts && !acked; ++a) {
        const auto attempt = attempt_no[rung.tech]++;
        bool all = true;
        const auto sizes = fragment_sizes(msg.payload_bytes, rung.tech);
        for (std::size_t f = 0; f < sizes.size(); ++f) {
          const int n = sizes[f];
          const double e = attempt_energy(rung.tech, n, rung.confirmed, ctx, models);
          const auto slot = place_transaction(
              ledgers, t, rung.tech, timeline_profile(rung.tech, n, rung.confirmed, ctx, models));
          t = slot.end_ms;
          const auto pdr = resolve_pdr(models.pdr(), rung.tech, n, ctx.scenario,
                                       ctx.scenario.mobility == Mobility::Mobile
                                           ? ctx.speed_kmh
                                           : std::nullopt);
          Xoshiro256 rng(derive_seed(derive_seed(seed, j, static_cast<std::uint64_t>(rung.tech)),
                                     attempt, f));
          const bool ok = pdr && sample_delivery(rng, pdr->p).first;
          all = all && ok;

          auto& tot = sum.per_technology[rung.tech];
          tot.energy_uwh += e;
          tot.n_sent += 1;
          tot.bytes_sent += n;
          if (ok) {
            tot.n_delivered += 1;
            tot.bytes_delivered += n;
          }
          sum.events.push_back({slot.start_ms - w.context.now_ms, "tx",
                                {{"message", j},
                                 {"template", item.name},
                                 {"technology", std::string(to_string(rung.tech))},
                                 {"payload_bytes", n},
                                 {"attempt", attempt},
                                 {"confirmed", rung.confirmed},
                                 {"energy_uwh", e},
                                 {"delivered", ok}}});
        }
        delivered = delivered || all;
        acked = rung.confirmed && all;
      }
      if (acked) break;
    }
    t_free = t;
    sum.messages += 1;
    if (delivered) sum.messages_delivered += 1;
    sum.events.push_back({arrival_ms - w.context.now_ms, "message",
                          {{"message", j},
                           {"template", item.name},
                           {"payload_bytes", msg.payload_bytes},
                           {"delivered", delivered},
                           {"done_ms", t - w.context.now_ms}}});
  }
  for (const auto& [tech, tot] : sum.per_technology) sum.total += tot;
  return sum;
}

Comparison compare_policies(const WorkloadSpec& w, const Policy& a, const Policy& b,
                            const Models& models, std::uint64_t seed) {
  Comparison c;
  c.a = run_workload(w, a, models, seed);
  c.b = run_workload(w, b, models, seed);
  const double ea = c.a.total.energy_uwh;
  const double eb = c.b.total.energy_uwh;
  if (ea == eb) c.savings_factor = 1.0;
  else if (ea == 0.0) c.savings_factor = std::numeric_limits<double>::infinity();
  else c.savings_factor = eb / ea;
  return c;
}

WorkloadSpec workload_from_json(const nlohmann::json& j) {
  try {
    WorkloadSpec w;
    w.duration_h = j.value("duration_h", 24.0);
    if (j.contains("context")) w.context = context_from_json(j.at("context"));
    const auto& list = j.contains("messages") ? j.at("messages") : j.at("templates");
    for (const auto& m : list) {
      WorkloadItem it;
      it.name = m.value("name", "template-" + std::to_string(w.items.size()));
      it.message.payload_bytes = m.at("payload_bytes").get<int>();
      it.message.critical = m.value("critical", false);
      if (m.contains("deadline_ms") && !m.at("deadline_ms").is_null())
        it.message.deadline_ms = m.at("deadline_ms").get<std::int64_t>();
      it.rate_per_h = m.at("rate_per_h").get<double>();
      it.weight = m.value("weight", 1.0);
      w.items.push_back(it);
    }
    w.validate();
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("workload: ") + e.what());
  }
}

nlohmann::json to_json(const WorkloadSpec& w) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : w.items) {
    nlohmann::json m = {{"name", it.name},
                        {"payload_bytes", it.message.payload_bytes},
                        {"critical", it.message.critical},
                        {"rate_per_h", it.rate_per_h},
                        {"weight", it.weight}};
    if (it.message.deadline_ms) m["deadline_ms"] = *it.message.deadline_ms;
    items.push_back(m);
  }
  return {{"duration_h", w.duration_h}, {"context", to_json(w.context)}, {"messages", items}};
}

nlohmann::json to_json(const SimSummary& s, bool include_events) {
  auto totals = [](const Totals& t) {
    return nlohmann::json{{"energy_uwh", t.energy_uwh},
                          {"bytes_sent", t.bytes_sent},
                          {"bytes_delivered", t.bytes_delivered},
                          {"n_sent", t.n_sent},
                          {"n_delivered", t.n_delivered},
                          {"eb_uwh_per_byte", t.eb()},
                          {"pdr", t.pdr()}};
  };
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [tech, t] : s.per_technology) per[std::string(to_string(tech))] = totals(t);
  nlohmann::json j = {{"per_technology", per},
                      {"total", totals(s.total)},
                      {"messages", s.messages},
                      {"messages_delivered", s.messages_delivered}};
  if (include_events) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : s.events) ev.push_back(to_json(e));
    j["events"] = ev;
  }
  return j;
}

}  // namespace ratbench
