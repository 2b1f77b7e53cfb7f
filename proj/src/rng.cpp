#include "ratbench/rng.hpp"

#include <cmath>
#include <numbers>

#include "ratbench/error.hpp"

namespace ratbench {

std::int64_t Xoshiro256::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(ErrorCode::OutOfRange, "uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>((*this)());
  const std::uint64_t limit = max() - max() % span;
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Xoshiro256::normal() {
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (a * 0xD1B54A32D192ED03ULL);
  h = splitmix64(s);
  s = h ^ (b * 0x8CB92BA72F3D8DD7ULL);
  return splitmix64(s);
}

std::pair<bool, Xoshiro256> sample_delivery(Xoshiro256 state, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::BadProbability, "delivery probability must be in [0, 1]");
  const bool ok = state.uniform() < p;
  return {ok, state};
}

}  // namespace ratbench
