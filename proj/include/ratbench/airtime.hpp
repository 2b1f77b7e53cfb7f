#pragma once

// On-air time per packet for LoRa, Sigfox and NB-IoT.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ratbench/core.hpp"

namespace ratbench {

enum class RadioState : std::uint8_t { Tx, Rx, Idle, Sleep };

std::string_view to_string(RadioState s);

struct Phase {
  std::string name;
  double duration_ms = 0.0;
  RadioState state = RadioState::Idle;
};

struct AirtimeProfile {
  std::vector<Phase> phases;

  /// Sum of tx phase durations.
  double total_on_air_ms() const;
  /// Sum of all phase durations.
  double total_ms() const;

  void append(std::string name, double duration_ms, RadioState state);
  void append(const AirtimeProfile& other);
};

struct LoRaParams {
  int sf = 7;
  int bandwidth_hz = 125000;
  int coding_rate_index = 1;  // coding rate 4/(4+index)
  int preamble_symbols = 8;
  bool explicit_header = true;
  bool crc_on = true;
  bool low_data_rate_optimize = false;

  /// LoRaWAN uplink defaults for a given SF with LDRO set where required.
  static LoRaParams uplink(int sf, int bandwidth_hz = 125000);
};

double lora_symbol_ms(int sf, int bandwidth_hz);
/// Symbol time above 16 ms (SF11/SF12 at 125 kHz, SF12 at 250 kHz).
bool lora_ldro_required(int sf, int bandwidth_hz);

/// Single tx phase of (preamble + 4.25 + payload symbols) · 2^sf / BW.
/// Throws PayloadExceedsMax above 256 B, LdroRequired when the symbol time
/// demands LDRO and it is off, ParamOutOfRange for invalid radio settings.
AirtimeProfile lora_time_on_air(const LoRaParams& params, int payload_bytes);

struct SigfoxFrameParams {
  int bitrate_bps = 100;
  int repetitions = 3;
  int frame_overhead_bytes = 14;
  double interframe_gap_ms = 500.0;
};

/// `repetitions` identical tx frames separated by idle gaps.
AirtimeProfile sigfox_airtime(const SigfoxFrameParams& params, int payload_bytes);

struct NbiotTimingConfig {
  double attach_ms = 2500.0;
  double tx_ms_per_128B = 400.0;
  double inactivity_timer_ms = 10000.0;
  std::optional<double> edrx_cycle_ms;
  double edrx_paging_window_ms = 2560.0;
  int edrx_windows = 1;
  double psm_entry_ms = 100.0;
  std::array<double, 3> ce_multiplier{1.0, 2.0, 4.0};

  /// Throws ConfigInvalid on negative durations or a non-monotone multiplier.
  void validate() const;
};

/// Phases: attach (unless resuming), tx, inactivity window, optional eDRX
/// paging windows, PSM entry.
AirtimeProfile nbiot_transaction_profile(const NbiotTimingConfig& cfg, int payload_bytes,
                                         int ce_level, bool rrc_resume);

}  // namespace ratbench
