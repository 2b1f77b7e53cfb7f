#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "ratbench/error.hpp"
#include "ratbench/rng.hpp"

using namespace ratbench;

TEST_CASE("xoshiro256** reference outputs") {
  // SplitMix64 from 0 yields this well-known first word.
  std::uint64_t sm = 0;
  CHECK(splitmix64(sm) == 0xE220A8397B1DCDAFULL);

  Xoshiro256 a(42);
  Xoshiro256 b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
  CHECK(a == b);
  Xoshiro256 c(43);
  CHECK(c() != Xoshiro256(42)());
}

TEST_CASE("uniform and uniform_int ranges") {
  Xoshiro256 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = rng.uniform_int(-3, 5);
    REQUIRE(k >= -3);
    REQUIRE(k <= 5);
  }
  std::set<std::int64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(rng.uniform_int(1, 6));
  CHECK(seen.size() == 6);
  CHECK(rng.uniform_int(4, 4) == 4);
}

TEST_CASE("normal draws have unit variance") {
  Xoshiro256 rng(3);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.03);
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("derived streams are independent of each other") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t cycle = 0; cycle < 100; ++cycle)
    for (std::uint64_t tech = 0; tech < 3; ++tech) seeds.insert(derive_seed(99, cycle, tech));
  CHECK(seeds.size() == 300);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("sample_delivery") {
  SUBCASE("p = 1 always delivers, p = 0 never does") {
    Xoshiro256 rng(5);
    for (int i = 0; i < 1000; ++i) {
      bool ok = false;
      std::tie(ok, rng) = sample_delivery(rng, 1.0);
      REQUIRE(ok);
      std::tie(ok, rng) = sample_delivery(rng, 0.0);
      REQUIRE_FALSE(ok);
    }
  }
  SUBCASE("p = 0.5 over 10000 draws lies within the 3-sigma interval") {
    Xoshiro256 rng(2024);
    int hits = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      bool ok = false;
      std::tie(ok, rng) = sample_delivery(rng, 0.5);
      hits += ok;
    }
    CHECK(std::abs(hits / double(n) - 0.5) <= oracle::binomial_3sigma(0.5, n));
  }
  SUBCASE("bit-reproducible for equal state") {
    const Xoshiro256 s(77);
    const auto a = sample_delivery(s, 0.3);
    const auto b = sample_delivery(s, 0.3);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }
  SUBCASE("probabilities outside [0, 1] are rejected") {
    try {
      sample_delivery(Xoshiro256(1), 1.5);
      FAIL("expected BadProbability");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadProbability);
    }
    CHECK_THROWS_AS(sample_delivery(Xoshiro256(1), -0.1), Error);
  }
}
