#pragma once

// Energy and PDR models bundled with a precomputed bucket E_b table, the
// shared input of policy decisions and simulations.

#include <map>
#include <tuple>

#include "ratbench/energy_model.hpp"
#include "ratbench/pdr.hpp"

namespace ratbench {

class Models {
 public:
  explicit Models(EnergyModel energy = shipped_model(), PdrModel pdr = {});

  /// Shipped energy fit with the reference PDR tables, built once.
  static const Models& shipped();

  const EnergyModel& energy() const { return energy_; }
  const PdrModel& pdr() const { return pdr_; }

  /// Cached bucket_eb. Throws Unsupported when the technology carries no
  /// payload of the bucket.
  double eb(Technology tech, Scenario scenario, PayloadBucket bucket) const;

 private:
  EnergyModel energy_;
  PdrModel pdr_;
  std::map<std::tuple<Technology, Scenario, PayloadBucket>, double> eb_;
};

}  // namespace ratbench
