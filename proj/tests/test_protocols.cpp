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

#include <cmath>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "zeno/protocols.hpp"
#include "zeno/theory.hpp"

using namespace zeno;

namespace {

constexpr double kBeta = 0.0314159;

ChainSpec chain(int n, int lam) {
  return ChainSpec{.sites = n, .alpha = kBeta, .beta = kBeta, .subspace = lam};
}

std::vector<double> repeat(double mu, std::size_t m) { return std::vector<double>(m, mu); }

/// ||Pi U_m ... Pi U_1 psi||^2 built from explicit projector and propagator
/// matrices, with no renormalization along the way.
double unnormalized_survival(const ComplexMatrix& h, const ComplexMatrix& pi,
                             const StateVector& psi0, const std::vector<double>& mus) {
  StateVector psi = psi0;
  for (double mu : mus) psi = pi * oracle::reference_propagator(h, mu) * psi;
  return psi.squaredNorm();
}

}  // namespace

TEST_CASE("projective: two-site chain, one step of 1 us") {
  const ZenoSystem sys = make_system(chain(2, 1));
  const std::vector<double> mus{1.0};
  const auto traj = run_projective(sys, site_state(2, 1), mus);
  REQUIRE(traj.survival_factors.size() == 1);
  CHECK(traj.survival_factors[0] == doctest::Approx(std::pow(std::cos(kBeta), 2)).epsilon(1e-12));
  CHECK(traj.survival_factors[0] == doctest::Approx(0.999013).epsilon(1e-6));
}

TEST_CASE("projective: zero-length intervals leave the state alone") {
  const ZenoSystem sys = make_system(chain(12, 3));
  const auto traj = run_projective(sys, w_state(12, 3), repeat(0.0, 20));
  CHECK(traj.final_survival() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((traj.final_state - w_state(12, 3)).norm() <= 1e-12);
}

TEST_CASE("projective: W state on two sites follows the weak-regime estimate") {
  const ChainSpec spec = chain(12, 2);
  const ZenoSystem sys = make_system(spec);
  const StateVector psi0 = w_state(12, 2);
  const std::size_t m = 100;
  const auto traj = run_projective(sys, psi0, repeat(3.0, m));
  const auto pred =
      pstar_weak(m, IntervalDistribution::deterministic(3.0), variance_h_pi(psi0, spec));
  CHECK(std::abs(traj.final_survival() - pred.pstar) <= 0.05 * pred.pstar);
}

TEST_CASE("projective: post-selected product equals the unnormalized operator product") {
  for (int n = 3; n <= 6; ++n) {
    for (int lam = 1; lam + 2 <= n; ++lam) {
      const ChainSpec spec = chain(n, lam);
      const ZenoSystem sys = make_system(spec);
      SeededSampler rng(static_cast<std::uint64_t>(10 * n + lam));
      std::vector<double> mus;
      for (int j = 0; j < 15; ++j) mus.push_back(0.5 + 6.0 * rng.uniform());
      const StateVector psi0 = w_state(n, lam);
      const auto traj = run_projective(sys, psi0, mus);
      const double direct =
          unnormalized_survival(hamiltonian(spec), projector(spec), psi0, mus);
      CHECK(std::abs(traj.final_survival() - direct) <= 1e-10);
      CHECK(std::abs(traj.log_survival - std::log(direct)) <= 1e-9);
    }
  }
}

TEST_CASE("projective: lambda = N never leaks") {
  const ZenoSystem sys = make_system(chain(5, 5));
  const auto traj = run_projective(sys, site_state(5, 1), repeat(2.0, 50));
  CHECK(traj.final_survival() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projective: survival is non-increasing, population equals q_j") {
  const ZenoSystem sys = make_system(chain(12, 4));
  const auto traj = run_projective(sys, w_state(12, 4), repeat(2.0, 200));
  for (std::size_t j = 0; j < traj.steps(); ++j) {
    CHECK(traj.survival_factors[j] <= 1.0);
    CHECK(traj.subspace_population[j] == traj.survival_factors[j]);
    if (j > 0) CHECK(traj.cumulative_survival[j] <= traj.cumulative_survival[j - 1]);
  }
  CHECK(traj.final_state.tail(8).norm() == 0.0);
  CHECK(traj.final_state.norm() == doctest::Approx(1.0));
}

TEST_CASE("projective: input validation") {
  const ZenoSystem sys = make_system(chain(12, 3));
  CHECK_THROWS_AS(run_projective(sys, site_state(12, 5), repeat(1.0, 3)), Error);
  StateVector unnormalized = site_state(12, 1) * 2.0;
  try {
    run_projective(sys, unnormalized, repeat(1.0, 3));
    FAIL("expected NotNormalized");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotNormalized);
  }
  try {
    run_projective(sys, site_state(12, 5), repeat(1.0, 3));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInitialStateOutsideSubspace);
  }
}

TEST_CASE("projective: Bernoulli outcomes average to the post-selected survival") {
  const ZenoSystem sys = make_system(chain(8, 2));
  const StateVector psi0 = site_state(8, 2);
  const auto intervals = repeat(4.0, 40);
  const double expected = run_projective(sys, psi0, intervals).final_survival();
  const int runs = 4000;
  int survived = 0;
  for (int r = 0; r < runs; ++r) {
    SeededSampler outcomes(derive_seed(5, static_cast<std::uint64_t>(r)));
    const auto traj = run_projective_bernoulli(sys, psi0, intervals, outcomes);
    if (!traj.failed_at) {
      ++survived;
      CHECK(traj.final_survival() == 1.0);
    } else {
      CHECK(traj.final_survival() == 0.0);
      CHECK(*traj.failed_at == traj.steps());
    }
  }
  const double freq = static_cast<double>(survived) / runs;
  const double sigma = std::sqrt(expected * (1.0 - expected) / runs);
  CHECK(std::abs(freq - expected) <= 4.0 * sigma);
}

TEST_CASE("pulsed: unitary evolution, population stays bounded") {
  const ZenoSystem sys = make_system(chain(12, 5));
  const auto traj = run_pulsed(sys, w_state(12, 5), repeat(3.0, 300), std::numbers::pi / 2);
  CHECK(traj.final_state.norm() == doctest::Approx(1.0).epsilon(1e-10));
  for (double p : traj.cumulative_survival) CHECK((p >= 0.0 && p <= 1.0 + 1e-12));
  CHECK(traj.survival_factors.empty());
}

TEST_CASE("pulsed: zero pulse area is free evolution") {
  const ChainSpec spec = chain(6, 2);
  const ZenoSystem sys = make_system(spec);
  const auto traj = run_pulsed(sys, site_state(6, 1), repeat(2.5, 40), 0.0);
  const StateVector free = oracle::reference_propagator(hamiltonian(spec), 100.0) * site_state(6, 1);
  CHECK((traj.final_state - free).norm() <= 1e-10);
}

TEST_CASE("pulsed: frequent phase kicks suppress leakage") {
  const ZenoSystem sys = make_system(chain(12, 5));
  const StateVector psi0 = w_state(12, 5);
  const auto kicked = run_pulsed(sys, psi0, repeat(0.5, 3000), std::numbers::pi / 2);
  const auto free = run_pulsed(sys, psi0, repeat(0.5, 3000), 0.0);
  CHECK(kicked.final_survival() > 0.9);
  CHECK(kicked.final_survival() > free.final_survival());
}

TEST_CASE("pulsed: needs two sites beyond the subspace") {
  const ZenoSystem sys = make_system(chain(5, 4));
  CHECK_THROWS_AS(run_pulsed(sys, site_state(5, 1), repeat(1.0, 2), 1.0), Error);
}

TEST_CASE("continuous: g = 0 is free evolution") {
  const ChainSpec spec = chain(7, 3);
  const ZenoSystem sys = make_system(spec);
  const std::vector<double> ts{10.0, 55.5, 120.0};
  const auto traj = run_continuous(sys, site_state(7, 1), 120.0, 0.0, ts, true);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const StateVector ref = oracle::reference_propagator(hamiltonian(spec), ts[k]) * site_state(7, 1);
    CHECK((traj.states[k] - ref).norm() <= 1e-10);
    CHECK(traj.cumulative_survival[k] == doctest::Approx(ref.head(3).squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("continuous: three-site chain maps onto the three-level closed form") {
  // The chain's own 2-3 hopping adds to the coupling: g_eff = beta + 2 g.
  const ZenoSystem sys = make_system(chain(3, 1));
  for (double g : {0.0, 0.01, 0.1, 0.5}) {
    std::vector<double> ts;
    for (int k = 1; k <= 50; ++k) ts.push_back(7.3 * k);
    const auto traj = run_continuous(sys, site_state(3, 1), ts.back(), g, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      CHECK(std::abs(traj.cumulative_survival[k] -
                     three_level_survival(kBeta, kBeta + 2.0 * g, ts[k])) <= 1e-10);
    }
  }
}

TEST_CASE("continuous: doubling g cuts the averaged leakage about fourfold") {
  const ZenoSystem sys = make_system(chain(3, 1));
  std::vector<double> ts;
  for (int k = 1; k <= 4000; ++k) ts.push_back(0.25 * k);
  auto mean_leak = [&](double g) {
    const auto traj = run_continuous(sys, site_state(3, 1), ts.back(), g, ts);
    double s = 0.0;
    for (double p : traj.cumulative_survival) s += 1.0 - p;
    return s / static_cast<double>(ts.size());
  };
  const double ratio = mean_leak(20.0 * kBeta) / mean_leak(40.0 * kBeta);
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.2);
}

TEST_CASE("exact subspace: two sites give sin^2(beta t) on the edge") {
  const ZenoSystem sys = make_system(chain(6, 2));
  std::vector<double> ts;
  for (int k = 1; k <= 40; ++k) ts.push_back(3.1 * k);
  const auto traj = run_exact_subspace(sys, site_state(6, 1), ts, true);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    REQUIRE(traj.states[k].size() == 2);
    CHECK(std::norm(traj.states[k](1)) ==
          doctest::Approx(std::pow(std::sin(kBeta * ts[k]), 2)).epsilon(1e-10));
  }
}

TEST_CASE("exact subspace: two-site W state is stationary up to phase") {
  const ZenoSystem sys = make_system(chain(6, 2));
  const StateVector psi0 = w_state(6, 2);
  const std::vector<double> ts{17.0, 400.0};
  const auto traj = run_exact_subspace(sys, psi0, ts);
  CHECK(std::abs(std::abs(traj.final_state.dot(psi0.head(2))) - 1.0) <= 1e-12);
}

TEST_CASE("run_protocol: reproducible for a seed, samples the distribution") {
  const ChainSpec spec = chain(12, 3);
  ProtocolConfig cfg;
  cfg.steps = 50;
  cfg.distribution = IntervalDistribution({{1.0, 0.5}, {5.0, 0.5}});
  for (auto kind : {ProtocolKind::kProjectiveMeasurement, ProtocolKind::kPulsedCoupling,
                    ProtocolKind::kContinuousCoupling}) {
    cfg.kind = kind;
    const ZenoSystem sys = make_system(spec);
    SeededSampler a(2024), b(2024);
    const auto ta = run_protocol(sys, w_state(12, 3), cfg, a);
    const auto tb = run_protocol(sys, w_state(12, 3), cfg, b);
    CHECK(ta.times == tb.times);
    CHECK(ta.cumulative_survival == tb.cumulative_survival);
    CHECK(ta.steps() == 50);
    for (double mu : ta.intervals) CHECK((mu == 1.0 || mu == 5.0));
  }
}

TEST_CASE("run_protocol_on: continuous coupling ends at the realized t_m") {
  const ZenoSystem sys = make_system(chain(12, 3));
  ProtocolConfig cfg;
  cfg.kind = ProtocolKind::kContinuousCoupling;
  cfg.steps = 4;
  const std::vector<double> mus{1.0, 5.0, 5.0, 1.0};
  const auto traj = run_protocol_on(sys, w_state(12, 3), cfg, mus);
  CHECK(traj.final_time() == doctest::Approx(12.0));
  CHECK(traj.times[1] == doctest::Approx(6.0));
  CHECK(cfg.coupling_or_default() == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("write_trajectory_csv") {
  const ZenoSystem sys = make_system(chain(4, 1));
  const auto pm = run_projective(sys, site_state(4, 1), repeat(2.0, 2));
  std::ostringstream os;
  write_trajectory_csv(os, pm);
  std::istringstream lines(os.str());
  std::string header, row0, row1;
  std::getline(lines, header);
  std::getline(lines, row0);
  std::getline(lines, row1);
  CHECK(header == "step,t_us,mu_us,q_j,P_cum,pop_subspace");
  CHECK(row0.rfind("0,0,", 0) == 0);
  CHECK(row1.rfind("1,2,2,", 0) == 0);

  const auto pc = run_pulsed(sys, site_state(4, 1), repeat(2.0, 2), 1.0);
  std::ostringstream os2;
  write_trajectory_csv(os2, pc);
  std::istringstream lines2(os2.str());
  std::getline(lines2, header);
  std::getline(lines2, row0);
  std::getline(lines2, row1);
  CHECK(row1.find(",2,2,,") != std::string::npos);
}
