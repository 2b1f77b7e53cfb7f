#include "ratbench/models.hpp"

#include <algorithm>

namespace ratbench {

Models::Models(EnergyModel energy, PdrModel pdr) : energy_(std::move(energy)), pdr_(std::move(pdr)) {
  for (auto t : kAllTechnologies)
    for (auto s : kScenarios)
      for (auto b : kPayloadBuckets)
        if (byte_range(b).lo <= max_payload(t)) eb_[{t, s, b}] = bucket_eb(energy_, t, s, b);
}

const Models& Models::shipped() {
  static const Models models;
  return models;
}

double Models::eb(Technology tech, Scenario scenario, PayloadBucket bucket) const {
  const auto it = eb_.find({tech, scenario, bucket});
  if (it == eb_.end())
    throw Error(ErrorCode::Unsupported, std::string(to_string(tech)) + " cannot carry bucket " +
                                            std::string(to_string(bucket)) + " in " +
                                            to_string(scenario));
  return it->second;
}

}  // namespace ratbench
