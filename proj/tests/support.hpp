#pragma once

#include <string>

#include "ratbench/core.hpp"

namespace support {

inline ratbench::TechParams params_for(ratbench::Technology t) {
  switch (t) {
    case ratbench::Technology::LoRaWAN: return ratbench::LoRaWanParams{9, true};
    case ratbench::Technology::Sigfox: return ratbench::SigfoxParams{};
    case ratbench::Technology::NBIoT: return ratbench::NbiotParams{};
  }
  return ratbench::LoRaWanParams{};
}

inline ratbench::MeasurementRecord record(std::string id, ratbench::Technology tech,
                                          int payload, double energy_uwh, bool delivered,
                                          ratbench::Scenario scenario = {},
                                          double speed_kmh = 0.0) {
  ratbench::MeasurementRecord r;
  r.record_id = std::move(id);
  r.technology = tech;
  r.timestamp_tx = 1'609'459'200'000;
  if (delivered) r.timestamp_rx = r.timestamp_tx + 1500;
  r.payload_bytes = payload;
  r.tx_power_dbm = tech == ratbench::Technology::NBIoT ? 23 : 14;
  r.energy_uwh = energy_uwh;
  r.delivered = delivered;
  r.speed_kmh = speed_kmh;
  r.scenario = scenario;
  r.tech_params = params_for(tech);
  return r;
}

inline const ratbench::Scenario kStaticIndoor{ratbench::Placement::Indoor,
                                              ratbench::Mobility::Static};
inline const ratbench::Scenario kStaticOutdoor{ratbench::Placement::Outdoor,
                                               ratbench::Mobility::Static};
inline const ratbench::Scenario kMobileOutdoor{ratbench::Placement::Outdoor,
                                               ratbench::Mobility::Mobile};

}  // namespace support
