#pragma once

// Per-transaction energy: an affine model of fixed overhead plus power × time
// summed over the radio phases of a transaction.

#include <map>

#include "ratbench/airtime.hpp"

namespace ratbench {

struct PowerProfile {
  /// Transmit power draw by configured output power. Values between entries
  /// are interpolated linearly; anything outside the table is rejected.
  std::map<int, double> p_tx_mw;
  double p_rx_mw = 0.0;
  double p_idle_mw = 0.0;
  double p_sleep_mw = 0.0;
  double fixed_overhead_uwh = 0.0;

  /// Throws UnknownTxPower outside the lookup domain.
  double tx_power_mw(int tx_power_dbm) const;
  double state_power_mw(RadioState s, int tx_power_dbm) const;

  /// Copy with every p_tx entry multiplied by `scale`.
  PowerProfile with_tx_scale(double scale) const;

  /// Throws ConfigInvalid when powers are negative, p_tx decreases with dBm or
  /// sleep <= idle <= rx is violated.
  void validate() const;
};

/// Datasheet-derived starting points. SX1276 in the Murata module at 3.3 V for
/// LoRaWAN and Sigfox, BG96 at 3.8 V for NB-IoT. They are only priors; the
/// fitting step rescales them.
PowerProfile default_power_profile(Technology tech);

/// Output power each radio uses in the monitoring campaign.
int default_tx_power_dbm(Technology tech);

/// fixed_overhead + Σ power(state) · duration, in µWh.
double transaction_energy(const AirtimeProfile& profile, const PowerProfile& power,
                          int tx_power_dbm);

/// Everything besides the radio itself that shapes a transaction's timeline.
struct RadioTimings {
  int lora_bandwidth_hz = 125000;
  /// Class A wait for the RX1/RX2 windows after an uplink, spent at idle.
  double lora_rx_windows_ms = 2000.0;
  /// Receive window for a confirmation downlink.
  double lora_ack_rx_ms = 1000.0;
  SigfoxFrameParams sigfox;
  double sigfox_ack_rx_ms = 25000.0;
  NbiotTimingConfig nbiot;
  double nbiot_ack_rx_ms = 0.0;
  bool nbiot_rrc_resume = true;
};

/// Highest SF whose EU868 data rate still carries `payload_bytes`
/// (51 B up to SF12, 115 B at SF9, larger payloads at SF8/SF7).
int lora_max_sf_for_payload(int payload_bytes);

/// Complete radio timeline of one uplink. `context` is the SF for LoRaWAN and
/// the CE level for NB-IoT; Sigfox ignores it. A confirmed uplink adds one
/// receive phase for the downlink acknowledgement.
AirtimeProfile transaction_profile(const RadioTimings& timings, Technology tech,
                                   int payload_bytes, int context, bool confirmed);

}  // namespace ratbench
