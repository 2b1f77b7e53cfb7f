#include "ratbench/airtime.hpp"

#include <algorithm>
#include <cmath>

namespace ratbench {

std::string_view to_string(RadioState s) {
  switch (s) {
    case RadioState::Tx: return "tx";
    case RadioState::Rx: return "rx";
    case RadioState::Idle: return "idle";
    case RadioState::Sleep: return "sleep";
  }
  return "?";
}

double AirtimeProfile::total_on_air_ms() const {
  double sum = 0.0;
  for (const auto& p : phases)
    if (p.state == RadioState::Tx) sum += p.duration_ms;
  return sum;
}

double AirtimeProfile::total_ms() const {
  double sum = 0.0;
  for (const auto& p : phases) sum += p.duration_ms;
  return sum;
}

void AirtimeProfile::append(std::string name, double duration_ms, RadioState state) {
  if (!(duration_ms >= 0.0))
    throw Error(ErrorCode::OutOfRange, "phase '" + name + "' has negative duration");
  phases.push_back(Phase{std::move(name), duration_ms, state});
}

void AirtimeProfile::append(const AirtimeProfile& other) {
  phases.insert(phases.end(), other.phases.begin(), other.phases.end());
}

LoRaParams LoRaParams::uplink(int sf, int bandwidth_hz) {
  LoRaParams p;
  p.sf = sf;
  p.bandwidth_hz = bandwidth_hz;
  p.low_data_rate_optimize = lora_ldro_required(sf, bandwidth_hz);
  return p;
}

double lora_symbol_ms(int sf, int bandwidth_hz) {
  return std::ldexp(1.0, sf) / bandwidth_hz * 1000.0;
}

bool lora_ldro_required(int sf, int bandwidth_hz) { return lora_symbol_ms(sf, bandwidth_hz) > 16.0; }

AirtimeProfile lora_time_on_air(const LoRaParams& p, int payload_bytes) {
  if (payload_bytes < 1) throw Error(ErrorCode::PayloadTooSmall, "payload must be >= 1 B");
  if (payload_bytes > max_payload(Technology::LoRaWAN))
    throw Error(ErrorCode::PayloadExceedsMax,
                "LoRa payload " + std::to_string(payload_bytes) + " B exceeds 256 B");
  if (p.sf < 7 || p.sf > 12) throw Error(ErrorCode::ParamOutOfRange, "sf must be in [7, 12]");
  if (p.bandwidth_hz != 125000 && p.bandwidth_hz != 250000 && p.bandwidth_hz != 500000)
    throw Error(ErrorCode::ParamOutOfRange, "bandwidth must be 125, 250 or 500 kHz");
  if (p.coding_rate_index < 1 || p.coding_rate_index > 4)
    throw Error(ErrorCode::ParamOutOfRange, "coding rate index must be in [1, 4]");
  if (p.preamble_symbols < 6)
    throw Error(ErrorCode::ParamOutOfRange, "preamble must be >= 6 symbols");
  if (lora_ldro_required(p.sf, p.bandwidth_hz) && !p.low_data_rate_optimize)
    throw Error(ErrorCode::LdroRequired, "low data rate optimize required for SF" +
                                             std::to_string(p.sf) + " at " +
                                             std::to_string(p.bandwidth_hz / 1000) + " kHz");

  const int de = p.low_data_rate_optimize ? 1 : 0;
  const int ih = p.explicit_header ? 0 : 1;
  const int crc = p.crc_on ? 1 : 0;
  const int numerator = 8 * payload_bytes - 4 * p.sf + 28 + 16 * crc - 20 * ih;
  const int denominator = 4 * (p.sf - 2 * de);
  const int blocks = numerator > 0 ? (numerator + denominator - 1) / denominator : 0;
  const double payload_symbols = 8.0 + blocks * (p.coding_rate_index + 4);
  const double symbols = p.preamble_symbols + 4.25 + payload_symbols;

  AirtimeProfile out;
  out.append("lora_tx", symbols * lora_symbol_ms(p.sf, p.bandwidth_hz), RadioState::Tx);
  return out;
}

AirtimeProfile sigfox_airtime(const SigfoxFrameParams& p, int payload_bytes) {
  if (payload_bytes < 1) throw Error(ErrorCode::PayloadTooSmall, "payload must be >= 1 B");
  if (payload_bytes > max_payload(Technology::Sigfox))
    throw Error(ErrorCode::PayloadExceedsMax,
                "Sigfox payload " + std::to_string(payload_bytes) + " B exceeds 12 B");
  if (p.bitrate_bps <= 0 || p.repetitions < 1 || p.frame_overhead_bytes < 0 ||
      p.interframe_gap_ms < 0.0)
    throw Error(ErrorCode::ConfigInvalid, "invalid Sigfox frame parameters");

  const double frame_ms = (payload_bytes + p.frame_overhead_bytes) * 8.0 * 1000.0 / p.bitrate_bps;
  AirtimeProfile out;
  for (int i = 0; i < p.repetitions; ++i) {
    if (i > 0) out.append("sigfox_gap", p.interframe_gap_ms, RadioState::Idle);
    out.append("sigfox_frame_" + std::to_string(i + 1), frame_ms, RadioState::Tx);
  }
  return out;
}

void NbiotTimingConfig::validate() const {
  for (double d : {attach_ms, tx_ms_per_128B, inactivity_timer_ms, edrx_paging_window_ms,
                   psm_entry_ms})
    if (!(d >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "NB-IoT durations must be >= 0");
  if (edrx_cycle_ms && !(*edrx_cycle_ms >= edrx_paging_window_ms))
    throw Error(ErrorCode::ConfigInvalid, "eDRX cycle shorter than its paging window");
  if (edrx_windows < 0) throw Error(ErrorCode::ConfigInvalid, "eDRX window count must be >= 0");
  if (ce_multiplier[0] != 1.0 || ce_multiplier[1] < ce_multiplier[0] ||
      ce_multiplier[2] < ce_multiplier[1])
    throw Error(ErrorCode::ConfigInvalid, "CE multipliers must satisfy 1 = c0 <= c1 <= c2");
}

AirtimeProfile nbiot_transaction_profile(const NbiotTimingConfig& cfg, int payload_bytes,
                                         int ce_level, bool rrc_resume) {
  if (payload_bytes < 1) throw Error(ErrorCode::PayloadTooSmall, "payload must be >= 1 B");
  if (payload_bytes > max_payload(Technology::NBIoT))
    throw Error(ErrorCode::PayloadExceedsMax,
                "NB-IoT payload " + std::to_string(payload_bytes) + " B exceeds 1547 B");
  if (ce_level < 0 || ce_level > 2)
    throw Error(ErrorCode::BadCeLevel, "CE level must be 0, 1 or 2");
  cfg.validate();

  const int units = (payload_bytes + 127) / 128;
  AirtimeProfile out;
  if (!rrc_resume) out.append("nbiot_attach", cfg.attach_ms, RadioState::Rx);
  out.append("nbiot_tx", units * cfg.tx_ms_per_128B * cfg.ce_multiplier[ce_level],
             RadioState::Tx);
  out.append("nbiot_inactivity", cfg.inactivity_timer_ms, RadioState::Idle);
  if (cfg.edrx_cycle_ms) {
    for (int i = 0; i < cfg.edrx_windows; ++i) {
      out.append("nbiot_edrx_sleep", *cfg.edrx_cycle_ms - cfg.edrx_paging_window_ms,
                 RadioState::Sleep);
      out.append("nbiot_edrx_ptw", cfg.edrx_paging_window_ms, RadioState::Rx);
    }
  }
  out.append("nbiot_psm_entry", cfg.psm_entry_ms, RadioState::Idle);
  return out;
}

}  // namespace ratbench
