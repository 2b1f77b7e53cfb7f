#include "ratbench/energy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "ratbench/record_io.hpp"
#include "ratbench/reference_data.hpp"

namespace ratbench {

namespace {

constexpr double kScaleMin = 1.0 / 8.0;
constexpr double kScaleMax = 8.0;
constexpr double kRatioMin = 1.0;
constexpr double kRatioMax = 16.0;

std::vector<int> contexts_for(Technology tech, PayloadBucket bucket) {
  switch (tech) {
    case Technology::LoRaWAN: {
      const int hi = std::min(byte_range(bucket).hi, max_payload(tech));
      std::vector<int> sfs;
      for (int sf = 7; sf <= lora_max_sf_for_payload(hi); ++sf) sfs.push_back(sf);
      return sfs;
    }
    case Technology::Sigfox: return {0};
    case Technology::NBIoT: return {0, 1, 2};
  }
  return {0};
}

ContextMixture clamp_mixture(const ContextMixture& m, Technology tech, PayloadBucket bucket) {
  const auto allowed = contexts_for(tech, bucket);
  ContextMixture out;
  for (const auto& [c, w] : m) out[std::clamp(c, allowed.front(), allowed.back())] += w;
  return out;
}

// Bucket E_b as a function of (overhead a, tx scale s, CE ratio r):
//   E_b(c) = a·k + s·g[c]·r^c + h[c]   (the r^c factor only for NB-IoT)
struct BucketCoeffs {
  PayloadBucket bucket;
  double target;
  double k;
  std::vector<int> contexts;
  std::vector<double> g;
  std::vector<double> h;
};

BucketCoeffs bucket_coeffs(Technology tech, PayloadBucket bucket, double target,
                           const RadioTimings& base_timings, const PowerProfile& prior,
                           int dbm) {
  RadioTimings timings = base_timings;
  timings.nbiot.ce_multiplier = {1.0, 1.0, 1.0};
  BucketCoeffs bc{bucket, target, 0.0, contexts_for(tech, bucket), {}, {}};
  const int lo = byte_range(bucket).lo;
  const int hi = std::min(byte_range(bucket).hi, max_payload(tech));
  double bytes = 0.0;
  for (int n = lo; n <= hi; ++n) bytes += n;
  bc.k = (hi - lo + 1) / bytes;
  for (int c : bc.contexts) {
    double tx = 0.0;
    double rest = 0.0;
    for (int n = lo; n <= hi; ++n) {
      const auto prof = transaction_profile(timings, tech, n, c, false);
      for (const auto& ph : prof.phases) {
        const double e = prior.state_power_mw(ph.state, dbm) * ph.duration_ms;
        (ph.state == RadioState::Tx ? tx : rest) += e;
      }
    }
    bc.g.push_back(mw_ms_to_uwh(tx) / bytes);
    bc.h.push_back(mw_ms_to_uwh(rest) / bytes);
  }
  return bc;
}

std::vector<double> context_values(Technology tech, const BucketCoeffs& bc, double a, double s,
                                   double r) {
  std::vector<double> v;
  for (std::size_t i = 0; i < bc.contexts.size(); ++i) {
    const double m = tech == Technology::NBIoT ? std::pow(r, bc.contexts[i]) : 1.0;
    v.push_back(a * bc.k + s * bc.g[i] * m + bc.h[i]);
  }
  return v;
}

double log_violation(double lo, double hi, double target) {
  return std::max({0.0, std::log(lo) - std::log(target), std::log(target) - std::log(hi)});
}

struct Candidate {
  double j = std::numeric_limits<double>::infinity();
  double prior = std::numeric_limits<double>::infinity();
  double a = 0.0;
  double s = 1.0;
  double r = 2.0;

  bool better_than(const Candidate& o) const {
    constexpr double eps = 1e-12;
    if (j < o.j - eps) return true;
    if (j > o.j + eps) return false;
    return prior < o.prior;
  }
};

double total_violation(Technology tech, const std::vector<BucketCoeffs>& cells, double a,
                       double s, double r) {
  double j = 0.0;
  for (const auto& bc : cells) {
    const auto v = context_values(tech, bc, a, s, r);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double d = log_violation(*lo, *hi, bc.target);
    j += d * d;
  }
  return j;
}

// With `feasible_only`, an infeasible (s, r) is returned with j = ∞ instead of
// running the overhead scan.
Candidate evaluate(Technology tech, const std::vector<BucketCoeffs>& cells, double s, double r,
                   double r_prior, bool feasible_only) {
  Candidate c;
  c.s = s;
  c.r = r;
  c.prior = std::pow(std::log(s), 2) + std::pow(std::log(r / r_prior), 2);
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double a_max = 0.0;
  for (const auto& bc : cells) {
    const auto v = context_values(tech, bc, 0.0, s, r);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    lower = std::max(lower, (bc.target - *hi) / bc.k);
    upper = std::min(upper, (bc.target - *lo) / bc.k);
    a_max = std::max(a_max, bc.target / bc.k);
  }
  if (lower <= upper) {
    c.j = 0.0;
    c.a = 0.5 * (lower + upper);
    return c;
  }
  if (feasible_only) return c;
  // Infeasible: scan the overhead, then refine around the best sample.
  constexpr int kSteps = 400;
  double best_a = 0.0;
  double best_j = total_violation(tech, cells, 0.0, s, r);
  for (int i = 1; i <= kSteps; ++i) {
    const double a = a_max * i / kSteps;
    const double j = total_violation(tech, cells, a, s, r);
    if (j < best_j) best_j = j, best_a = a;
  }
  double lo = std::max(0.0, best_a - a_max / kSteps);
  double hi = best_a + a_max / kSteps;
  for (int it = 0; it < 60; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (total_violation(tech, cells, m1, s, r) <= total_violation(tech, cells, m2, s, r)) hi = m2;
    else lo = m1;
  }
  const double a = 0.5 * (lo + hi);
  const double j = total_violation(tech, cells, a, s, r);
  c.a = j < best_j ? a : best_a;
  c.j = std::min(j, best_j);
  return c;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
  return out;
}

Candidate search(Technology tech, const std::vector<BucketCoeffs>& cells, bool fit_ratio,
                 double r_prior) {
  const auto s_grid = log_grid(kScaleMin, kScaleMax, 121);
  const auto r_grid = fit_ratio ? log_grid(kRatioMin, kRatioMax, 61) : std::vector<double>{r_prior};
  Candidate best;
  for (bool feasible_only : {true, false}) {
    for (double r : r_grid)
      for (double s : s_grid) {
        const auto c = evaluate(tech, cells, s, r, r_prior, feasible_only);
        if (c.better_than(best)) best = c;
      }
    if (best.j == 0.0) break;
  }
  const bool feasible = best.j == 0.0;
  // Local refinement on a finer grid spanning one coarse step either side.
  const double s_step = std::log(kScaleMax / kScaleMin) / 120.0;
  const double r_step = std::log(kRatioMax / kRatioMin) / 60.0;
  const Candidate coarse = best;
  for (int i = -20; i <= 20; ++i) {
    const double s = std::clamp(coarse.s * std::exp(s_step * i / 20.0), kScaleMin, kScaleMax);
    for (int k = fit_ratio ? -20 : 0; k <= (fit_ratio ? 20 : 0); ++k) {
      const double r =
          fit_ratio ? std::clamp(coarse.r * std::exp(r_step * k / 20.0), kRatioMin, kRatioMax)
                    : coarse.r;
      const auto c = evaluate(tech, cells, s, r, r_prior, feasible);
      if (c.better_than(best)) best = c;
    }
  }
  return best;
}

// Weights over two energy-adjacent contexts that reproduce `target`, or the
// nearest pure context when the target lies outside the reachable range.
ContextMixture bracket_mixture(const std::vector<int>& contexts, const std::vector<double>& v,
                               double target) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return v[x] < v[y]; });
  if (target <= v[order.front()]) return {{contexts[order.front()], 1.0}};
  if (target >= v[order.back()]) return {{contexts[order.back()], 1.0}};
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double lo = v[order[i]];
    const double hi = v[order[i + 1]];
    if (target <= hi) {
      const double w = hi > lo ? (target - lo) / (hi - lo) : 0.0;
      ContextMixture m;
      if (w < 1.0) m[contexts[order[i]]] += 1.0 - w;
      if (w > 0.0) m[contexts[order[i + 1]]] += w;
      return m;
    }
  }
  return {{contexts[order.back()], 1.0}};
}

ScenarioFit fit_one(Technology tech, Scenario scenario, std::array<std::optional<double>, 4> targets,
                    const RadioTimings& timings) {
  ScenarioFit fit = prior_fit(tech, scenario);
  fit.target_eb = targets;
  const PowerProfile prior = default_power_profile(tech);
  const int dbm = default_tx_power_dbm(tech);
  const double r_prior = timings.nbiot.ce_multiplier[1];

  std::vector<BucketCoeffs> cells;
  for (auto b : kPayloadBuckets)
    if (const auto& t = targets[static_cast<std::size_t>(b)])
      cells.push_back(bucket_coeffs(tech, b, *t, timings, prior, dbm));

  const int free_params = tech == Technology::NBIoT ? 3 : 2;
  const int n_cells = static_cast<int>(cells.size());
  Candidate chosen;
  std::array<ContextMixture, 4> fitted_mix;
  std::array<bool, 4> has_mix{};

  if (n_cells < 2) {
    // One equation: overhead only, nominal context, prior tx scale and CE ratio.
    fit.underdetermined = true;
    fit.notes.push_back(std::string(to_string(ErrorCode::Underdetermined)) +
                        ": 1 target cell for " + std::to_string(free_params) +
                        " parameters; fitted fixed_overhead only");
    const auto& bc = cells.front();
    const int nominal = std::clamp(nominal_context(tech), bc.contexts.front(), bc.contexts.back());
    const auto idx = static_cast<std::size_t>(
        std::find(bc.contexts.begin(), bc.contexts.end(), nominal) - bc.contexts.begin());
    const double base = context_values(tech, bc, 0.0, 1.0, r_prior)[idx];
    chosen.s = 1.0;
    chosen.r = r_prior;
    chosen.a = std::max(0.0, (bc.target - base) / bc.k);
    if (bc.target < base)
      fit.notes.push_back("target below the zero-overhead energy; overhead clamped at 0");
    const auto i = static_cast<std::size_t>(bc.bucket);
    fitted_mix[i] = {{nominal, 1.0}};
    has_mix[i] = true;
  } else {
    const bool fit_ratio = tech == Technology::NBIoT && n_cells >= free_params;
    if (tech == Technology::NBIoT && !fit_ratio) {
      fit.underdetermined = true;
      fit.notes.push_back(std::string(to_string(ErrorCode::Underdetermined)) +
                          ": 2 target cells for 3 parameters; CE ratio fixed at prior");
    }
    chosen = search(tech, cells, fit_ratio, r_prior);
    if (chosen.j > 0.0)
      fit.notes.push_back("targets not jointly reachable; log-space violation " +
                          std::to_string(chosen.j));
    for (const auto& bc : cells) {
      const auto i = static_cast<std::size_t>(bc.bucket);
      fitted_mix[i] =
          bracket_mixture(bc.contexts, context_values(tech, bc, chosen.a, chosen.s, chosen.r),
                          bc.target);
      has_mix[i] = true;
    }
  }

  fit.power = prior.with_tx_scale(chosen.s);
  fit.power.fixed_overhead_uwh = chosen.a;
  fit.tx_scale = chosen.s;
  if (tech == Technology::NBIoT) fit.ce_multiplier = {1.0, chosen.r, chosen.r * chosen.r};

  // Buckets without a target inherit the nearest lower fitted mixture.
  for (std::size_t i = 0; i < 4; ++i) {
    if (has_mix[i]) {
      fit.mixture[i] = fitted_mix[i];
      continue;
    }
    std::optional<std::size_t> src;
    for (std::size_t j = i; j-- > 0;)
      if (has_mix[j]) { src = j; break; }
    if (!src)
      for (std::size_t j = i + 1; j < 4; ++j)
        if (has_mix[j]) { src = j; break; }
    fit.mixture[i] = clamp_mixture(src ? fitted_mix[*src] : fit.mixture[i], tech,
                                   kPayloadBuckets[i]);
  }
  return fit;
}

// Fills fitted_eb and residual_rms from the final model.
void score(EnergyModel& model) {
  for (auto& [key, fit] : model.fits) {
    double ss = 0.0;
    int n = 0;
    for (auto b : kPayloadBuckets) {
      const auto i = static_cast<std::size_t>(b);
      if (!bucket_supported(fit.technology, b)) continue;
      fit.fitted_eb[i] = bucket_eb(model, fit.technology, fit.scenario, b);
      if (fit.target_eb[i]) {
        const double d = std::log(*fit.fitted_eb[i] / *fit.target_eb[i]);
        ss += d * d;
        ++n;
      }
    }
    fit.residual_rms = n ? std::sqrt(ss / n) : 0.0;
  }
}

const ScenarioFit& cached_prior(Technology tech, Scenario scenario) {
  static const auto priors = [] {
    std::map<std::pair<Technology, Scenario>, ScenarioFit> m;
    for (auto t : kAllTechnologies)
      for (auto s : kScenarios) m.emplace(std::pair{t, s}, prior_fit(t, s));
    return m;
  }();
  const auto it = priors.find({tech, scenario});
  if (it == priors.end())
    throw Error(ErrorCode::InvalidScenario, "invalid scenario " + to_string(scenario));
  return it->second;
}

const ScenarioFit& fit_ref(const EnergyModel& model, Technology tech, Scenario scenario) {
  const auto it = model.fits.find({tech, scenario});
  return it != model.fits.end() ? it->second : cached_prior(tech, scenario);
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

int nominal_context(Technology tech) {
  switch (tech) {
    case Technology::LoRaWAN: return 9;
    case Technology::Sigfox: return 0;
    case Technology::NBIoT: return 0;
  }
  return 0;
}

ScenarioFit prior_fit(Technology tech, Scenario scenario) {
  if (!is_valid(scenario))
    throw Error(ErrorCode::InvalidScenario, "invalid scenario " + to_string(scenario));
  ScenarioFit fit;
  fit.technology = tech;
  fit.scenario = scenario;
  fit.power = default_power_profile(tech);
  for (auto b : kPayloadBuckets)
    fit.mixture[static_cast<std::size_t>(b)] =
        clamp_mixture({{nominal_context(tech), 1.0}}, tech, b);
  return fit;
}

const ScenarioFit& EnergyModel::fit(Technology tech, Scenario scenario) const {
  return fit_ref(*this, tech, scenario);
}

double EnergyModel::residual_rms() const {
  double ss = 0.0;
  int n = 0;
  for (const auto& [key, fit] : fits)
    for (std::size_t i = 0; i < 4; ++i)
      if (fit.target_eb[i] && fit.fitted_eb[i]) {
        const double d = std::log(*fit.fitted_eb[i] / *fit.target_eb[i]);
        ss += d * d;
        ++n;
      }
  return n ? std::sqrt(ss / n) : 0.0;
}

EnergyModel fit_power_profiles(const std::vector<AggregateCell>& targets,
                               const RadioTimings& timings) {
  timings.nbiot.validate();
  std::map<std::pair<Technology, Scenario>, std::array<std::optional<double>, 4>> grouped;
  std::map<Technology, bool> has_numeric;
  for (const auto& c : targets) {
    if (!is_valid(c.scenario))
      throw Error(ErrorCode::InvalidScenario, "invalid scenario " + to_string(c.scenario));
    has_numeric.try_emplace(c.technology, false);
    if (!c.eb_uwh_per_byte) continue;
    if (!bucket_supported(c.technology, c.bucket))
      throw Error(ErrorCode::ConfigInvalid, std::string(to_string(c.technology)) +
                                                " cannot carry bucket " +
                                                std::string(to_string(c.bucket)));
    if (!(*c.eb_uwh_per_byte > 0.0))
      throw Error(ErrorCode::NonPositiveEnergy, "E_b targets must be > 0");
    auto& slot = grouped[{c.technology, c.scenario}][static_cast<std::size_t>(c.bucket)];
    if (slot) throw Error(ErrorCode::ConfigInvalid, "duplicate target cell");
    slot = *c.eb_uwh_per_byte;
    has_numeric[c.technology] = true;
  }
  for (const auto& [tech, ok] : has_numeric)
    if (!ok)
      throw Error(ErrorCode::Underdetermined,
                  "no numeric E_b target for " + std::string(to_string(tech)));

  EnergyModel model;
  model.timings = timings;
  for (const auto& [key, cells] : grouped)
    model.fits.emplace(key, fit_one(key.first, key.second, cells, timings));
  score(model);
  return model;
}

const EnergyModel& shipped_model() {
  static const EnergyModel model = [] {
    EnergyModel m = fit_power_profiles(reference_targets());
    m.fitted_at = "built-in";
    return m;
  }();
  return model;
}

double packet_energy(const EnergyModel& model, Technology tech, Scenario scenario,
                     int payload_bytes, int context, bool confirmed,
                     std::optional<int> tx_power_dbm) {
  const auto& fit = fit_ref(model, tech, scenario);
  RadioTimings timings = model.timings;
  timings.nbiot.ce_multiplier = fit.ce_multiplier;
  const auto profile = transaction_profile(timings, tech, payload_bytes, context, confirmed);
  return transaction_energy(profile, fit.power, tx_power_dbm.value_or(default_tx_power_dbm(tech)));
}

const ContextMixture& context_mixture(const ScenarioFit& fit, int payload_bytes) {
  return fit.mixture[static_cast<std::size_t>(bucket_of(payload_bytes))];
}

double expected_packet_energy(const EnergyModel& model, Technology tech, Scenario scenario,
                              int payload_bytes, bool confirmed) {
  const auto& fit = fit_ref(model, tech, scenario);
  double e = 0.0;
  for (const auto& [c, w] : context_mixture(fit, payload_bytes))
    e += w * packet_energy(model, tech, scenario, payload_bytes, c, confirmed);
  return e;
}

double bucket_eb(const EnergyModel& model, Technology tech, Scenario scenario,
                 PayloadBucket bucket) {
  const int lo = byte_range(bucket).lo;
  const int hi = std::min(byte_range(bucket).hi, max_payload(tech));
  if (lo > hi)
    throw Error(ErrorCode::Unsupported, std::string(to_string(tech)) + " cannot carry bucket " +
                                            std::string(to_string(bucket)));
  double energy = 0.0;
  double bytes = 0.0;
  for (int n = lo; n <= hi; ++n) {
    energy += expected_packet_energy(model, tech, scenario, n);
    bytes += n;
  }
  return energy / bytes;
}

std::pair<int, Xoshiro256> sample_context(const ScenarioFit& fit, int payload_bytes,
                                          Xoshiro256 rng) {
  const auto& mix = context_mixture(fit, payload_bytes);
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [c, w] : mix) {
    acc += w;
    if (u < acc) return {c, rng};
  }
  return {mix.rbegin()->first, rng};
}

nlohmann::json to_json(const PowerProfile& p) {
  nlohmann::json tx = nlohmann::json::object();
  for (const auto& [dbm, mw] : p.p_tx_mw) tx[std::to_string(dbm)] = mw;
  return {{"p_tx_mw", tx},
          {"p_rx_mw", p.p_rx_mw},
          {"p_idle_mw", p.p_idle_mw},
          {"p_sleep_mw", p.p_sleep_mw},
          {"fixed_overhead_uwh", p.fixed_overhead_uwh}};
}

PowerProfile power_profile_from_json(const nlohmann::json& j) {
  PowerProfile p;
  for (const auto& [k, v] : j.at("p_tx_mw").items()) p.p_tx_mw[std::stoi(k)] = v.get<double>();
  p.p_rx_mw = j.at("p_rx_mw").get<double>();
  p.p_idle_mw = j.at("p_idle_mw").get<double>();
  p.p_sleep_mw = j.at("p_sleep_mw").get<double>();
  p.fixed_overhead_uwh = j.at("fixed_overhead_uwh").get<double>();
  p.validate();
  return p;
}

nlohmann::json to_json(const RadioTimings& t) {
  nlohmann::json nb = {{"attach_ms", t.nbiot.attach_ms},
                       {"tx_ms_per_128B", t.nbiot.tx_ms_per_128B},
                       {"inactivity_timer_ms", t.nbiot.inactivity_timer_ms},
                       {"edrx_paging_window_ms", t.nbiot.edrx_paging_window_ms},
                       {"edrx_windows", t.nbiot.edrx_windows},
                       {"psm_entry_ms", t.nbiot.psm_entry_ms},
                       {"ce_multiplier", t.nbiot.ce_multiplier},
                       {"ack_rx_ms", t.nbiot_ack_rx_ms},
                       {"rrc_resume", t.nbiot_rrc_resume}};
  if (t.nbiot.edrx_cycle_ms) nb["edrx_cycle_ms"] = *t.nbiot.edrx_cycle_ms;
  return {{"lora",
           {{"bandwidth_hz", t.lora_bandwidth_hz},
            {"rx_windows_ms", t.lora_rx_windows_ms},
            {"ack_rx_ms", t.lora_ack_rx_ms}}},
          {"sigfox",
           {{"bitrate_bps", t.sigfox.bitrate_bps},
            {"repetitions", t.sigfox.repetitions},
            {"frame_overhead_bytes", t.sigfox.frame_overhead_bytes},
            {"interframe_gap_ms", t.sigfox.interframe_gap_ms},
            {"ack_rx_ms", t.sigfox_ack_rx_ms}}},
          {"nbiot", nb}};
}

RadioTimings radio_timings_from_json(const nlohmann::json& j) {
  RadioTimings t;
  if (j.contains("lora")) {
    const auto& l = j.at("lora");
    read_opt(l, "bandwidth_hz", t.lora_bandwidth_hz);
    read_opt(l, "rx_windows_ms", t.lora_rx_windows_ms);
    read_opt(l, "ack_rx_ms", t.lora_ack_rx_ms);
  }
  if (j.contains("sigfox")) {
    const auto& s = j.at("sigfox");
    read_opt(s, "bitrate_bps", t.sigfox.bitrate_bps);
    read_opt(s, "repetitions", t.sigfox.repetitions);
    read_opt(s, "frame_overhead_bytes", t.sigfox.frame_overhead_bytes);
    read_opt(s, "interframe_gap_ms", t.sigfox.interframe_gap_ms);
    read_opt(s, "ack_rx_ms", t.sigfox_ack_rx_ms);
  }
  if (j.contains("nbiot")) {
    const auto& n = j.at("nbiot");
    read_opt(n, "attach_ms", t.nbiot.attach_ms);
    read_opt(n, "tx_ms_per_128B", t.nbiot.tx_ms_per_128B);
    read_opt(n, "inactivity_timer_ms", t.nbiot.inactivity_timer_ms);
    if (n.contains("edrx_cycle_ms") && !n.at("edrx_cycle_ms").is_null())
      t.nbiot.edrx_cycle_ms = n.at("edrx_cycle_ms").get<double>();
    read_opt(n, "edrx_paging_window_ms", t.nbiot.edrx_paging_window_ms);
    read_opt(n, "edrx_windows", t.nbiot.edrx_windows);
    read_opt(n, "psm_entry_ms", t.nbiot.psm_entry_ms);
    read_opt(n, "ce_multiplier", t.nbiot.ce_multiplier);
    read_opt(n, "ack_rx_ms", t.nbiot_ack_rx_ms);
    read_opt(n, "rrc_resume", t.nbiot_rrc_resume);
  }
  t.nbiot.validate();
  return t;
}

nlohmann::json to_json(const EnergyModel& model) {
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& [key, f] : model.fits) {
    nlohmann::json mix = nlohmann::json::object();
    nlohmann::json targets = nlohmann::json::object();
    nlohmann::json fitted = nlohmann::json::object();
    for (auto b : kPayloadBuckets) {
      const auto i = static_cast<std::size_t>(b);
      const std::string label(to_string(b));
      nlohmann::json m = nlohmann::json::object();
      for (const auto& [c, w] : f.mixture[i]) m[std::to_string(c)] = w;
      mix[label] = m;
      if (f.target_eb[i]) targets[label] = *f.target_eb[i];
      if (f.fitted_eb[i]) fitted[label] = *f.fitted_eb[i];
    }
    nlohmann::json entry = {{"technology", std::string(to_string(f.technology))},
                            {"scenario", to_string(f.scenario)},
                            {"power", to_json(f.power)},
                            {"tx_scale", f.tx_scale},
                            {"context_mixture", mix},
                            {"target_eb_uwh_per_byte", targets},
                            {"fitted_eb_uwh_per_byte", fitted},
                            {"residual_rms", f.residual_rms},
                            {"underdetermined", f.underdetermined},
                            {"notes", f.notes}};
    if (f.technology == Technology::NBIoT) entry["ce_multiplier"] = f.ce_multiplier;
    fits.push_back(entry);
  }
  return {{"format", "ratbench-model/1"},
          {"fitted_at", model.fitted_at},
          {"residual_rms", model.residual_rms()},
          {"timings", to_json(model.timings)},
          {"fits", fits}};
}

EnergyModel energy_model_from_json(const nlohmann::json& j) {
  try {
    EnergyModel model;
    read_opt(j, "fitted_at", model.fitted_at);
    if (j.contains("timings")) model.timings = radio_timings_from_json(j.at("timings"));
    for (const auto& e : j.at("fits")) {
      ScenarioFit f;
      f.technology = parse_technology(e.at("technology").get<std::string>());
      f.scenario = scenario_from_json(e.at("scenario"));
      if (!is_valid(f.scenario))
        throw Error(ErrorCode::InvalidScenario, "invalid scenario " + to_string(f.scenario));
      f.power = power_profile_from_json(e.at("power"));
      read_opt(e, "tx_scale", f.tx_scale);
      read_opt(e, "ce_multiplier", f.ce_multiplier);
      read_opt(e, "residual_rms", f.residual_rms);
      read_opt(e, "underdetermined", f.underdetermined);
      read_opt(e, "notes", f.notes);
      const auto prior = prior_fit(f.technology, f.scenario);
      for (auto b : kPayloadBuckets) {
        const auto i = static_cast<std::size_t>(b);
        const std::string label(to_string(b));
        f.mixture[i] = prior.mixture[i];
        if (e.contains("context_mixture") && e.at("context_mixture").contains(label)) {
          ContextMixture m;
          double sum = 0.0;
          for (const auto& [c, w] : e.at("context_mixture").at(label).items()) {
            const double wv = w.get<double>();
            if (!(wv >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "negative mixture weight");
            if (wv > 0.0) m[std::stoi(c)] = wv;
            sum += wv;
          }
          if (m.empty() || std::abs(sum - 1.0) > 1e-6)
            throw Error(ErrorCode::ConfigInvalid, "mixture weights must sum to 1");
          f.mixture[i] = m;
        }
        if (e.contains("target_eb_uwh_per_byte") && e.at("target_eb_uwh_per_byte").contains(label))
          f.target_eb[i] = e.at("target_eb_uwh_per_byte").at(label).get<double>();
        if (e.contains("fitted_eb_uwh_per_byte") && e.at("fitted_eb_uwh_per_byte").contains(label))
          f.fitted_eb[i] = e.at("fitted_eb_uwh_per_byte").at(label).get<double>();
      }
      model.fits[{f.technology, f.scenario}] = std::move(f);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "model file: non-numeric key");
  }
}

void write_model_file(const std::string& path, const EnergyModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << to_json(model).dump(2) << '\n';
}

EnergyModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return energy_model_from_json(j);
}

}  // namespace ratbench
