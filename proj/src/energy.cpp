#include "ratbench/energy.hpp"

#include <iterator>

namespace ratbench {

double PowerProfile::tx_power_mw(int dbm) const {
  if (p_tx_mw.empty()) throw Error(ErrorCode::UnknownTxPower, "empty tx power table");
  auto hi = p_tx_mw.lower_bound(dbm);
  if (hi != p_tx_mw.end() && hi->first == dbm) return hi->second;
  if (hi == p_tx_mw.begin() || hi == p_tx_mw.end())
    throw Error(ErrorCode::UnknownTxPower,
                "tx power " + std::to_string(dbm) + " dBm outside the power table");
  auto lo = std::prev(hi);
  const double f = static_cast<double>(dbm - lo->first) / (hi->first - lo->first);
  return lo->second + f * (hi->second - lo->second);
}

double PowerProfile::state_power_mw(RadioState s, int tx_power_dbm) const {
  switch (s) {
    case RadioState::Tx: return tx_power_mw(tx_power_dbm);
    case RadioState::Rx: return p_rx_mw;
    case RadioState::Idle: return p_idle_mw;
    case RadioState::Sleep: return p_sleep_mw;
  }
  return 0.0;
}

PowerProfile PowerProfile::with_tx_scale(double scale) const {
  PowerProfile out = *this;
  for (auto& [dbm, mw] : out.p_tx_mw) mw *= scale;
  return out;
}

void PowerProfile::validate() const {
  double prev = -1.0;
  for (const auto& [dbm, mw] : p_tx_mw) {
    if (!(mw >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "negative tx power");
    if (mw < prev) throw Error(ErrorCode::ConfigInvalid, "tx power must not decrease with dBm");
    prev = mw;
  }
  if (!(p_sleep_mw >= 0.0 && p_sleep_mw <= p_idle_mw && p_idle_mw <= p_rx_mw))
    throw Error(ErrorCode::ConfigInvalid, "power profile must satisfy 0 <= sleep <= idle <= rx");
  if (!(fixed_overhead_uwh >= 0.0))
    throw Error(ErrorCode::ConfigInvalid, "fixed overhead must be >= 0");
}

PowerProfile default_power_profile(Technology tech) {
  PowerProfile p;
  switch (tech) {
    case Technology::LoRaWAN:
    case Technology::Sigfox:
      // mA at 3.3 V: 20, 23, 27, 32, 44 on tx; 12 rx; 1.5 MCU run; 2 µA stop.
      p.p_tx_mw = {{2, 66.0}, {5, 75.9}, {8, 89.1}, {11, 105.6}, {14, 145.2}};
      p.p_rx_mw = 39.6;
      p.p_idle_mw = 4.95;
      p.p_sleep_mw = 0.0066;
      p.fixed_overhead_uwh = 5.0;
      break;
    case Technology::NBIoT:
      // mA at 3.8 V: 100, 120, 160, 220 on tx; 40 rx; 10 connected idle; 10 µA PSM.
      p.p_tx_mw = {{0, 380.0}, {10, 456.0}, {20, 608.0}, {23, 836.0}};
      p.p_rx_mw = 152.0;
      p.p_idle_mw = 38.0;
      p.p_sleep_mw = 0.038;
      p.fixed_overhead_uwh = 20.0;
      break;
  }
  return p;
}

int default_tx_power_dbm(Technology tech) { return tech == Technology::NBIoT ? 23 : 14; }

double transaction_energy(const AirtimeProfile& profile, const PowerProfile& power,
                          int tx_power_dbm) {
  double mw_ms = 0.0;
  for (const auto& phase : profile.phases)
    mw_ms += power.state_power_mw(phase.state, tx_power_dbm) * phase.duration_ms;
  return power.fixed_overhead_uwh + mw_ms_to_uwh(mw_ms);
}

int lora_max_sf_for_payload(int payload_bytes) {
  if (payload_bytes <= 51) return 12;
  if (payload_bytes <= 115) return 9;
  return 8;
}

AirtimeProfile transaction_profile(const RadioTimings& t, Technology tech, int payload_bytes,
                                   int context, bool confirmed) {
  AirtimeProfile out;
  switch (tech) {
    case Technology::LoRaWAN:
      out = lora_time_on_air(LoRaParams::uplink(context, t.lora_bandwidth_hz), payload_bytes);
      out.append("lora_rx_windows", t.lora_rx_windows_ms, RadioState::Idle);
      if (confirmed) out.append("lora_ack", t.lora_ack_rx_ms, RadioState::Rx);
      break;
    case Technology::Sigfox:
      out = sigfox_airtime(t.sigfox, payload_bytes);
      if (confirmed) out.append("sigfox_downlink", t.sigfox_ack_rx_ms, RadioState::Rx);
      break;
    case Technology::NBIoT:
      out = nbiot_transaction_profile(t.nbiot, payload_bytes, context, t.nbiot_rrc_resume);
      if (confirmed && t.nbiot_ack_rx_ms > 0.0)
        out.append("nbiot_ack", t.nbiot_ack_rx_ms, RadioState::Rx);
      break;
  }
  return out;
}

}  // namespace ratbench
