#include "ratbench/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "ratbench/record_io.hpp"

namespace ratbench {

namespace {

bool duty_limited(Technology tech) { return tech != Technology::NBIoT; }

double ack_rx_ms(const RadioTimings& t, Technology tech) {
  switch (tech) {
    case Technology::LoRaWAN: return t.lora_ack_rx_ms;
    case Technology::Sigfox: return t.sigfox_ack_rx_ms;
    case Technology::NBIoT: return t.nbiot_ack_rx_ms;
  }
  return 0.0;
}

std::optional<int> pinned_context(Technology tech, const Context& ctx) {
  if (tech == Technology::LoRaWAN) return ctx.lorawan_sf;
  if (tech == Technology::NBIoT) return ctx.nbiot_ce;
  return std::nullopt;
}

// Context that shapes the timeline: the pinned one, else the nominal one
// limited to what the payload allows.
int timing_context(Technology tech, int payload_bytes, const Context& ctx) {
  if (auto c = pinned_context(tech, ctx)) return *c;
  if (tech == Technology::LoRaWAN)
    return std::min(nominal_context(tech), lora_max_sf_for_payload(payload_bytes));
  return nominal_context(tech);
}

std::optional<double> speed_for(const Context& ctx) {
  return ctx.scenario.mobility == Mobility::Mobile ? ctx.speed_kmh : std::nullopt;
}

struct Scheduler {
  const Context& ctx;
  const Models& models;
  std::map<Technology, DutyCycleLedger> ledgers;
  std::int64_t t;

  Scheduler(const Context& c, const Models& m) : ctx(c), models(m), ledgers(c.duty), t(c.now_ms) {}

  // Places one transaction no earlier than the end of the previous one and
  // returns its start.
  std::int64_t place(Technology tech, int payload_bytes, bool confirmed) {
    const auto p = place_transaction(
        ledgers, t, tech, timeline_profile(tech, payload_bytes, confirmed, ctx, models));
    t = p.end_ms;
    return p.start_ms;
  }
};

void check_deadline(const MessageSpec& msg, TxPlan& plan) {
  if (msg.deadline_ms && plan.duration_ms > *msg.deadline_ms) {
    plan.meets_deadline = false;
    plan.notes.push_back("worst-case duration " + std::to_string(plan.duration_ms) +
                         " ms exceeds the deadline");
  }
}

}  // namespace

void MessageSpec::validate() const {
  if (payload_bytes < 1 || payload_bytes > max_payload(Technology::NBIoT))
    throw Error(ErrorCode::ConfigInvalid, "message payload must be in [1, 1547]");
  if (deadline_ms && *deadline_ms < 0)
    throw Error(ErrorCode::ConfigInvalid, "deadline must be >= 0");
}

void Context::validate() const {
  if (!is_valid(scenario))
    throw Error(ErrorCode::InvalidScenario, "invalid scenario " + to_string(scenario));
  if (speed_kmh && !(*speed_kmh >= 0.0))
    throw Error(ErrorCode::NegativeSpeed, "speed must be >= 0");
  if (speed_kmh && *speed_kmh > 0.0 && scenario.mobility == Mobility::Static)
    throw Error(ErrorCode::ConfigInvalid, "static scenario with non-zero speed");
  if (lorawan_sf && (*lorawan_sf < 7 || *lorawan_sf > 12))
    throw Error(ErrorCode::ParamOutOfRange, "sf must be in [7, 12]");
  if (nbiot_ce && (*nbiot_ce < 0 || *nbiot_ce > 2))
    throw Error(ErrorCode::ParamOutOfRange, "CE level must be 0, 1 or 2");
}

std::string_view to_string(Objective o) {
  return o == Objective::MinEnergyPerByte ? "min_energy_per_byte"
                                          : "min_energy_per_delivered_byte";
}

Objective parse_objective(std::string_view name) {
  if (name == "min_energy_per_byte") return Objective::MinEnergyPerByte;
  if (name == "min_energy_per_delivered_byte") return Objective::MinEnergyPerDeliveredByte;
  throw Error(ErrorCode::ParseError, "unknown objective '" + std::string(name) + "'");
}

void Policy::validate() const {
  if (!(pdr_floor >= 0.0 && pdr_floor <= 1.0))
    throw Error(ErrorCode::BadProbability, "pdr_floor must be in [0, 1]");
  if (max_ladder_retries_per_rung < 0)
    throw Error(ErrorCode::ConfigInvalid, "max_ladder_retries_per_rung must be >= 0");
  if (technologies.empty())
    throw Error(ErrorCode::ConfigInvalid, "policy allows no technology");
  for (const auto& r : ladder)
    if (r.attempts < 1) throw Error(ErrorCode::ConfigInvalid, "ladder rung needs >= 1 attempt");
}

TxSlot place_transaction(std::map<Technology, DutyCycleLedger>& ledgers, std::int64_t t,
                            Technology tech, const AirtimeProfile& profile) {
  TxSlot p{t, t};
  if (duty_limited(tech)) {
    auto& ledger = ledgers.try_emplace(tech).first->second;
    // Repeated frames are booked as one interval of their summed airtime.
    const auto on_air = on_air_ms_ceil(profile.total_on_air_ms());
    p.start_ms = duty_next_allowed(ledger, t, on_air);
    ledger.record(p.start_ms, on_air);
  }
  p.end_ms = p.start_ms + on_air_ms_ceil(profile.total_ms());
  return p;
}

AirtimeProfile timeline_profile(Technology tech, int payload_bytes, bool confirmed,
                                const Context& ctx, const Models& models) {
  RadioTimings timings = models.energy().timings;
  timings.nbiot.ce_multiplier = models.energy().fit(tech, ctx.scenario).ce_multiplier;
  return transaction_profile(timings, tech, payload_bytes,
                             timing_context(tech, payload_bytes, ctx), confirmed);
}

double attempt_energy(Technology tech, int payload_bytes, bool confirmed, const Context& ctx,
                      const Models& models) {
  if (auto c = pinned_context(tech, ctx))
    return packet_energy(models.energy(), tech, ctx.scenario, payload_bytes, *c, confirmed);
  double e = models.eb(tech, ctx.scenario, bucket_of(payload_bytes)) * payload_bytes;
  if (confirmed) {
    const auto& fit = models.energy().fit(tech, ctx.scenario);
    e += mw_ms_to_uwh(fit.power.p_rx_mw * ack_rx_ms(models.energy().timings, tech));
  }
  return e;
}

std::vector<int> fragment_sizes(int payload_bytes, Technology tech) {
  if (payload_bytes < 1) throw Error(ErrorCode::PayloadTooSmall, "payload must be >= 1 B");
  const int max = max_payload(tech);
  std::vector<int> out(static_cast<std::size_t>((payload_bytes + max - 1) / max), max);
  out.back() = payload_bytes - max * (static_cast<int>(out.size()) - 1);
  return out;
}

Cost expected_cost(Technology tech, const MessageSpec& msg, const Context& ctx,
                   const Models& models, bool allow_fragmentation, bool confirmed) {
  msg.validate();
  if (msg.payload_bytes > max_payload(tech) && !allow_fragmentation)
    throw Error(ErrorCode::Unsupported, std::string(to_string(tech)) + " cannot carry " +
                                            std::to_string(msg.payload_bytes) + " B");
  Cost c;
  c.tech = tech;
  const auto sizes = fragment_sizes(msg.payload_bytes, tech);
  c.fragments = static_cast<int>(sizes.size());
  double p = 1.0;
  bool available = true;
  for (int n : sizes) {
    c.energy_uwh += attempt_energy(tech, n, confirmed, ctx, models);
    if (const auto r = resolve_pdr(models.pdr(), tech, n, ctx.scenario, speed_for(ctx))) {
      p *= r->p;
      c.pdr_fallback = c.pdr_fallback || r->fallback;
    } else {
      available = false;
    }
  }
  c.uwh_per_byte = c.energy_uwh / msg.payload_bytes;
  if (available) {
    c.pdr = p;
    c.uwh_per_delivered_byte = p > 0.0 ? c.energy_uwh / (p * msg.payload_bytes)
                                       : std::numeric_limits<double>::infinity();
  }
  return c;
}

std::vector<Cost> rank_technologies(const Policy& policy, const MessageSpec& msg,
                                    const Context& ctx, const Models& models) {
  std::vector<Cost> out;
  for (auto tech : kAllTechnologies) {
    if (std::find(policy.technologies.begin(), policy.technologies.end(), tech) ==
        policy.technologies.end())
      continue;
    if (msg.payload_bytes > max_payload(tech) && !policy.allow_fragmentation) continue;
    out.push_back(expected_cost(tech, msg, ctx, models, policy.allow_fragmentation));
  }
  return out;
}

Technology select_rat(const Policy& policy, const MessageSpec& msg, const Context& ctx,
                      const Models& models) {
  policy.validate();
  ctx.validate();
  std::optional<Technology> best;
  double best_value = 0.0;
  for (const auto& c : rank_technologies(policy, msg, ctx, models)) {
    if (!c.available() || *c.pdr < policy.pdr_floor) continue;
    const double v = policy.objective == Objective::MinEnergyPerByte ? c.uwh_per_byte
                                                                     : *c.uwh_per_delivered_byte;
    // Candidates arrive in tie-break order, so only a strict improvement wins.
    if (!best || v < best_value * (1.0 - 1e-12)) {
      best = c.tech;
      best_value = v;
    }
  }
  if (!best)
    throw Error(ErrorCode::NoFeasibleTechnology,
                "no technology carries " + std::to_string(msg.payload_bytes) + " B in " +
                    to_string(ctx.scenario) + " at PDR >= " + std::to_string(policy.pdr_floor));
  return *best;
}

TxPlan fragmentation_plan(int payload_bytes, Technology tech, const Context& ctx,
                          const Models& models) {
  TxPlan plan;
  Scheduler sched(ctx, models);
  double p = 1.0;
  for (int n : fragment_sizes(payload_bytes, tech)) {
    TxStep step;
    step.tech = tech;
    step.fragment_payload_bytes = n;
    step.attempt_offsets_ms = {sched.place(tech, n, false) - ctx.now_ms};
    plan.steps.push_back(step);
    plan.expected_energy_uwh += attempt_energy(tech, n, false, ctx, models);
    if (const auto r = resolve_pdr(models.pdr(), tech, n, ctx.scenario, speed_for(ctx))) {
      p *= r->p;
      if (r->fallback)
        plan.notes.push_back("PDR of a " + std::to_string(n) + " B fragment taken from bucket " +
                             std::string(to_string(r->source_bucket)));
    } else {
      p = 0.0;
      plan.notes.push_back("no PDR available for a " + std::to_string(n) + " B fragment");
    }
  }
  plan.expected_delivery_probability = p;
  plan.duration_ms = sched.t - ctx.now_ms;
  return plan;
}

TxPlan confirmed_ladder_plan(const Policy& policy, const MessageSpec& msg, const Context& ctx,
                             const Models& models) {
  policy.validate();
  ctx.validate();
  msg.validate();
  if (!msg.critical)
    throw Error(ErrorCode::ConfigInvalid, "ladder plans are for critical messages");
  if (policy.ladder.empty()) throw Error(ErrorCode::ConfigInvalid, "policy ladder is empty");

  struct Rung {
    LadderRung spec;
    int index;
    std::vector<int> sizes;
    double energy;
    double p;
  };
  std::vector<Rung> rungs;
  TxPlan plan;
  for (std::size_t i = 0; i < policy.ladder.size(); ++i) {
    const auto& r = policy.ladder[i];
    const std::string label = "rung " + std::to_string(i) + " (" + std::string(to_string(r.tech)) + ")";
    if (msg.payload_bytes > max_payload(r.tech) && !policy.allow_fragmentation) {
      plan.notes.push_back(label + " skipped: payload exceeds the technology maximum");
      continue;
    }
    const auto cost = expected_cost(r.tech, msg, ctx, models, policy.allow_fragmentation,
                                    r.confirmed);
    if (!cost.available()) {
      plan.notes.push_back(label + " skipped: no PDR available");
      continue;
    }
    if (cost.pdr_fallback) plan.notes.push_back(label + " uses a fallback PDR cell");
    LadderRung spec = r;
    spec.attempts = std::min(r.attempts, 1 + policy.max_ladder_retries_per_rung);
    rungs.push_back({spec, static_cast<int>(i), fragment_sizes(msg.payload_bytes, r.tech),
                     cost.energy_uwh, *cost.pdr});
  }
  if (rungs.empty())
    throw Error(ErrorCode::NoFeasibleTechnology,
                "no ladder rung carries " + std::to_string(msg.payload_bytes) + " B");

  // reach: probability that the ladder gets to this rung.
  double reach = 1.0;
  double all_fail = 1.0;
  Scheduler sched(ctx, models);
  for (const auto& r : rungs) {
    const int m = r.spec.attempts;
    const double q = 1.0 - r.p;
    const double fail_all = std::pow(q, m);
    const double expected_attempts =
        r.spec.confirmed ? (r.p > 0.0 ? (1.0 - fail_all) / r.p : m) : m;
    plan.expected_energy_uwh += reach * r.energy * expected_attempts;
    all_fail *= fail_all;
    if (r.spec.confirmed) reach *= fail_all;

    std::vector<TxStep> steps;
    for (int n : r.sizes) {
      TxStep s;
      s.tech = r.spec.tech;
      s.fragment_payload_bytes = n;
      s.confirmed = r.spec.confirmed;
      s.attempts = m;
      s.rung = r.index;
      steps.push_back(s);
    }
    for (int a = 0; a < m; ++a)
      for (auto& s : steps)
        s.attempt_offsets_ms.push_back(sched.place(s.tech, s.fragment_payload_bytes, s.confirmed) -
                                       ctx.now_ms);
    plan.steps.insert(plan.steps.end(), steps.begin(), steps.end());
  }
  plan.expected_delivery_probability = 1.0 - all_fail;
  plan.duration_ms = sched.t - ctx.now_ms;
  check_deadline(msg, plan);
  return plan;
}

TxPlan plan_message(const Policy& policy, const MessageSpec& msg, const Context& ctx,
                    const Models& models) {
  if (msg.critical) return confirmed_ladder_plan(policy, msg, ctx, models);
  auto plan = fragmentation_plan(msg.payload_bytes, select_rat(policy, msg, ctx, models), ctx,
                                 models);
  check_deadline(msg, plan);
  return plan;
}

nlohmann::json to_json(const Policy& p) {
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& r : p.ladder)
    ladder.push_back({{"tech", std::string(to_string(r.tech))},
                      {"retries", r.attempts - 1},
                      {"confirmed", r.confirmed}});
  nlohmann::json techs = nlohmann::json::array();
  for (auto t : p.technologies) techs.push_back(std::string(to_string(t)));
  return {{"name", p.name},
          {"objective", std::string(to_string(p.objective))},
          {"pdr_floor", p.pdr_floor},
          {"allow_fragmentation", p.allow_fragmentation},
          {"max_ladder_retries_per_rung", p.max_ladder_retries_per_rung},
          {"technologies", techs},
          {"ladder", ladder}};
}

Policy policy_from_json(const nlohmann::json& j) {
  try {
    Policy p;
    p.name = j.value("name", std::string{});
    if (j.contains("objective")) p.objective = parse_objective(j.at("objective").get<std::string>());
    p.pdr_floor = j.value("pdr_floor", 0.0);
    p.allow_fragmentation = j.value("allow_fragmentation", false);
    p.max_ladder_retries_per_rung = j.value("max_ladder_retries_per_rung", 3);
    if (j.contains("technologies")) {
      p.technologies.clear();
      for (const auto& t : j.at("technologies"))
        p.technologies.push_back(parse_technology(t.get<std::string>()));
    }
    if (j.contains("ladder"))
      for (const auto& r : j.at("ladder")) {
        LadderRung rung;
        rung.tech = parse_technology(
            (r.contains("tech") ? r.at("tech") : r.at("technology")).get<std::string>());
        if (r.contains("attempts")) rung.attempts = r.at("attempts").get<int>();
        else rung.attempts = 1 + r.value("retries", 0);
        rung.confirmed = r.value("confirmed", true);
        p.ladder.push_back(rung);
      }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("policy: ") + e.what());
  }
}

Policy read_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return policy_from_json(j);
}

nlohmann::json to_json(const Context& c) {
  nlohmann::json j = {{"scenario", to_string(c.scenario)}};
  if (c.speed_kmh) j["speed_kmh"] = *c.speed_kmh;
  if (c.lorawan_sf) j["lorawan_sf"] = *c.lorawan_sf;
  if (c.nbiot_ce) j["nbiot_ce"] = *c.nbiot_ce;
  if (c.now_ms) j["now_ms"] = c.now_ms;
  return j;
}

Context context_from_json(const nlohmann::json& j) {
  try {
    Context c;
    if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"));
    if (j.contains("speed_kmh") && !j.at("speed_kmh").is_null())
      c.speed_kmh = j.at("speed_kmh").get<double>();
    if (j.contains("lorawan_sf") && !j.at("lorawan_sf").is_null())
      c.lorawan_sf = j.at("lorawan_sf").get<int>();
    if (j.contains("nbiot_ce") && !j.at("nbiot_ce").is_null())
      c.nbiot_ce = j.at("nbiot_ce").get<int>();
    c.now_ms = j.value("now_ms", std::int64_t{0});
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("context: ") + e.what());
  }
}

nlohmann::json to_json(const TxPlan& plan) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : plan.steps)
    steps.push_back({{"tech", std::string(to_string(s.tech))},
                     {"fragment_payload_bytes", s.fragment_payload_bytes},
                     {"confirmed", s.confirmed},
                     {"attempts", s.attempts},
                     {"rung", s.rung},
                     {"attempt_offsets_ms", s.attempt_offsets_ms}});
  return {{"steps", steps},
          {"expected_energy_uwh", plan.expected_energy_uwh},
          {"expected_delivery_probability", plan.expected_delivery_probability},
          {"duration_ms", plan.duration_ms},
          {"meets_deadline", plan.meets_deadline},
          {"notes", plan.notes}};
}

}  // namespace ratbench
