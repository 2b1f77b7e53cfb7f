#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "ratbench/calibration.hpp"
#include "ratbench/rng.hpp"

using namespace ratbench;

namespace {

std::vector<EnergyPair> synthetic_pairs(double true_scale, double noise, std::uint64_t seed,
                                        int n = 120) {
  // reference = true_scale · device · (1 + noise · N(0, 1))
  Xoshiro256 rng(seed);
  std::vector<EnergyPair> out;
  for (int i = 0; i < n; ++i) {
    const double device = 20.0 + rng.uniform() * 900.0;
    out.push_back({device, true_scale * device * (1.0 + noise * rng.normal())});
  }
  return out;
}

std::vector<double> fixture(const std::string& slug) {
  std::ifstream in(std::string(RATBENCH_DATA_DIR) + "/fixtures/residuals_" + slug + ".json");
  REQUIRE(in);
  const auto j = nlohmann::json::parse(in);
  return j.at("residuals_pct").get<std::vector<double>>();
}

struct Published {
  const char* slug;
  double median, q1, q3, lo_w, hi_w;
  std::vector<double> outliers;
};

const std::vector<Published>& published() {
  static const std::vector<Published> p{
      {"lorawan", 0.24, -1.12, 0.93, -3.91, 3.64, {-4.49, -4.25, 4.45}},
      {"sigfox", -0.08, -0.6, 0.84, -2.42, 2.46, {-3.43, -3.06}},
      {"nbiot", 0.06, -1.43, 1.54, -5.17, 3.41, {}},
  };
  return p;
}

}  // namespace

TEST_CASE("calibrate_scale examples") {
  const std::vector<EnergyPair> same{{1.0, 1.0}, {2.0, 2.0}, {5.0, 5.0}};
  CHECK(calibrate_scale(same).scale == doctest::Approx(1.0));
  const std::vector<EnergyPair> twice{{2.0, 1.0}, {4.0, 2.0}, {10.0, 5.0}};
  const auto f = calibrate_scale(twice, Technology::Sigfox);
  CHECK(f.scale == doctest::Approx(0.5));
  CHECK(f.n_samples == 3);
  CHECK(f.technology == Technology::Sigfox);

  const auto noisy = calibrate_scale(synthetic_pairs(0.93, 0.01, 1));
  CHECK(noisy.scale >= 0.92);
  CHECK(noisy.scale <= 0.94);
}

TEST_CASE("calibrate_scale recovers known scales within 1%") {
  Xoshiro256 rng(17);
  for (int i = 0; i < 50; ++i) {
    const double truth = 0.9 + 0.2 * rng.uniform();
    const auto f = calibrate_scale(synthetic_pairs(truth, 0.01, 1000 + i));
    CHECK(std::abs(f.scale / truth - 1.0) < 0.01);
  }
}

TEST_CASE("calibrate_scale is scale-equivariant") {
  auto pairs = synthetic_pairs(1.05, 0.02, 5);
  const double base = calibrate_scale(pairs).scale;
  for (double k : {0.5, 3.0, 17.0}) {
    auto scaled = pairs;
    for (auto& p : scaled) p.device_uwh *= k;
    CHECK(calibrate_scale(scaled).scale == doctest::Approx(base / k).epsilon(1e-12));
  }
}

TEST_CASE("calibrated residuals have zero best-fit slope") {
  const auto pairs = synthetic_pairs(0.97, 0.02, 8);
  const auto f = calibrate_scale(pairs);
  double cross = 0.0;
  for (const auto& p : pairs) cross += p.device_uwh * (f.scale * p.device_uwh - p.reference_uwh);
  CHECK(std::abs(cross) < 1e-6 * pairs.size() * 1e6);
  const auto res = calibrated_residuals_pct(pairs, f);
  CHECK(res.size() == pairs.size());
  CHECK(res[0] == doctest::Approx(100.0 * (f.scale * pairs[0].device_uwh - pairs[0].reference_uwh) /
                                  pairs[0].reference_uwh));
}

TEST_CASE("calibrate_scale errors") {
  try {
    calibrate_scale(std::vector<EnergyPair>{{1.0, 1.0}});
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
  try {
    calibrate_scale(std::vector<EnergyPair>{{1.0, 1.0}, {0.0, 1.0}});
    FAIL("expected NonPositiveEnergy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveEnergy);
  }
}

TEST_CASE("residual_box_stats on a symmetric set") {
  const std::vector<double> v{-1, -1, 0, 1, 1};
  const auto s = residual_box_stats(v);
  CHECK(s.median == 0.0);
  CHECK(s.lower_quartile == -1.0);
  CHECK(s.upper_quartile == 1.0);
  CHECK(s.outliers.empty());
  CHECK_THROWS_AS(residual_box_stats(std::vector<double>{1, 2, 3, 4}), Error);
}

TEST_CASE("shipped residual fixtures reproduce the published boxes") {
  for (const auto& p : published()) {
    CAPTURE(p.slug);
    const auto v = fixture(p.slug);
    CHECK(v.size() == 120);
    const auto s = residual_box_stats(v);
    CHECK(s.median == p.median);
    CHECK(s.lower_quartile == p.q1);
    CHECK(s.upper_quartile == p.q3);
    CHECK(s.lower_whisker == p.lo_w);
    CHECK(s.upper_whisker == p.hi_w);
    CHECK(s.outliers == p.outliers);

    CHECK(oracle::quantile(v, 0.25) == p.q1);
    CHECK(oracle::quantile(v, 0.5) == p.median);
    CHECK(oracle::quantile(v, 0.75) == p.q3);
  }
}

TEST_CASE("box stats agree with the quantile oracle and keep their ordering") {
  Xoshiro256 rng(4242);
  for (int k = 0; k < 300; ++k) {
    const int n = static_cast<int>(rng.uniform_int(5, 200));
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
      double x = rng.normal() * 1.5;
      if (rng.uniform() < 0.05) x *= 6.0;
      v.push_back(x);
    }
    const auto s = residual_box_stats(v);
    REQUIRE(s.lower_quartile == doctest::Approx(oracle::quantile(v, 0.25)).epsilon(1e-12));
    REQUIRE(s.median == doctest::Approx(oracle::quantile(v, 0.5)).epsilon(1e-12));
    REQUIRE(s.upper_quartile == doctest::Approx(oracle::quantile(v, 0.75)).epsilon(1e-12));
    REQUIRE(s.lower_whisker <= s.lower_quartile);
    REQUIRE(s.lower_quartile <= s.median);
    REQUIRE(s.median <= s.upper_quartile);
    REQUIRE(s.upper_quartile <= s.upper_whisker);
    for (double o : s.outliers) REQUIRE((o < s.lower_whisker || o > s.upper_whisker));
    REQUIRE(std::is_sorted(s.outliers.begin(), s.outliers.end()));
    const double iqr = s.upper_quartile - s.lower_quartile;
    std::size_t beyond = 0;
    for (double x : v)
      if (x < s.lower_quartile - 1.5 * iqr || x > s.upper_quartile + 1.5 * iqr) ++beyond;
    REQUIRE(beyond == s.outliers.size());
  }
}
