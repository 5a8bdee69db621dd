// Copyright 2026 The zeno-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "zeno/error.hpp"
#include "zeno/stochastics.hpp"

using namespace zeno;

TEST_CASE("moments: bimodal (1, 5) us at 0.5/0.5") {
  const auto m = moments(IntervalDistribution({{1.0, 0.5}, {5.0, 0.5}}));
  CHECK(m.mean == doctest::Approx(3.0));
  CHECK(m.variance == doctest::Approx(4.0));
  CHECK(m.kappa == doctest::Approx(4.0 / 9.0));
  CHECK(m.third_raw == doctest::Approx(63.0));
}

TEST_CASE("moments: deterministic and the kappa = 16/9 endpoint") {
  CHECK(moments(IntervalDistribution::deterministic(3.0)).kappa == 0.0);
  const auto m = moments(IntervalDistribution({{1.0, 0.8}, {11.0, 0.2}}));
  CHECK(m.mean == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(m.kappa == doctest::Approx(16.0 / 9.0).epsilon(1e-14));
  CHECK(std::round(m.kappa * 1000.0) / 1000.0 == doctest::Approx(1.778));
}

TEST_CASE("moments: kappa >= 0, zero only for a single atom, kappa = var/mean^2") {
  SeededSampler rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double p1 = 0.05 + 0.9 * rng.uniform();
    const double mu1 = 0.1 + 10.0 * rng.uniform();
    const double mu2 = mu1 + 0.01 + 10.0 * rng.uniform();
    const auto m = moments(IntervalDistribution::bimodal(p1, mu1, mu2));
    CHECK(m.variance > 0.0);
    CHECK(m.kappa > 0.0);
    CHECK(std::abs(m.kappa - m.variance / (m.mean * m.mean)) <= 1e-12 * m.kappa);
  }
}

TEST_CASE("IntervalDistribution validation") {
  CHECK_THROWS_AS(IntervalDistribution({{1.0, 0.5}, {5.0, 0.4}}), Error);
  CHECK_THROWS_AS(IntervalDistribution({{0.0, 1.0}}), Error);
  CHECK_THROWS_AS(IntervalDistribution({{1.0, 0.5}, {1.0, 0.5}}), Error);
  CHECK_THROWS_AS(IntervalDistribution({}), Error);
  CHECK_NOTHROW(IntervalDistribution({{1.0, 0.3}, {2.0, 0.3}, {3.0, 0.4}}));
}

TEST_CASE("SeededSampler: documented SplitMix64 reference values") {
  // First outputs of SplitMix64 seeded with 0 (published reference stream).
  SeededSampler s(0);
  CHECK(s.next_u64() == 0xE220A8397B1DCDAFULL);
  CHECK(s.next_u64() == 0x6E789E6AA1B965F4ULL);
  CHECK(s.next_u64() == 0x06C45D188009454FULL);
}

TEST_CASE("sample_intervals: deterministic distribution") {
  SeededSampler s(123);
  const auto v = sample_intervals(IntervalDistribution::deterministic(3.0), s, 5);
  CHECK(v == std::vector<double>{3, 3, 3, 3, 3});
}

TEST_CASE("sample_intervals: same seed, same sequence; different seed differs") {
  const auto d = IntervalDistribution({{1.0, 0.5}, {5.0, 0.5}});
  SeededSampler a(99), b(99), c(100);
  const auto va = sample_intervals(d, a, 1000);
  const auto vb = sample_intervals(d, b, 1000);
  const auto vc = sample_intervals(d, c, 1000);
  CHECK(va == vb);
  CHECK(va != vc);
  for (double x : va) CHECK((x == 1.0 || x == 5.0));
}

TEST_CASE("sample_intervals: law of large numbers, seed 1") {
  const auto d = IntervalDistribution({{1.0, 0.5}, {5.0, 0.5}});
  SeededSampler s(1);
  const auto v = sample_intervals(d, s, 100000);
  const double freq = static_cast<double>(std::count(v.begin(), v.end(), 1.0)) / 1e5;
  CHECK(freq >= 0.49);
  CHECK(freq <= 0.51);

  const auto d3 = IntervalDistribution({{1.0, 0.8}, {11.0, 0.2}});
  SeededSampler s3(2);
  const auto v3 = sample_intervals(d3, s3, 100000);
  const double f3 = static_cast<double>(std::count(v3.begin(), v3.end(), 11.0)) / 1e5;
  CHECK(std::abs(f3 - 0.2) <= 0.01);
}

TEST_CASE("derive_seed gives distinct child streams") {
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("weak_zeno_margin") {
  const auto d = IntervalDistribution({{1.0, 0.5}, {5.0, 0.5}});
  CHECK(weak_zeno_margin(d, 100, 0.0) == 0.0);
  CHECK(weak_zeno_margin(d, 100, 1e-4) == doctest::Approx(0.63));
  CHECK(weak_zeno_margin(d, 200, 1e-4) == doctest::Approx(2.0 * weak_zeno_margin(d, 100, 1e-4)));
}

TEST_CASE("parse_distribution") {
  const auto d = parse_distribution("[(1.0, 0.5), (5.0, 0.5)]");
  REQUIRE(d.atoms().size() == 2);
  CHECK(d.atoms()[1].mu == 5.0);
  CHECK(parse_distribution("  [ (3,1) ]  ").atoms().front().mu == 3.0);
  CHECK_THROWS_AS(parse_distribution("[(1.0, 0.5), (5.0 0.5)]"), Error);
  CHECK_THROWS_AS(parse_distribution("[(1.0, 0.5)] x"), Error);
  CHECK_THROWS_AS(parse_distribution("[(1.0, 0.7)]"), Error);

  const auto again = parse_distribution(format_distribution(d));
  CHECK(again.atoms()[0].mu == d.atoms()[0].mu);
  CHECK(again.atoms()[1].prob == d.atoms()[1].prob);
}
