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

// Closed-form survival-probability predictions for stochastic Zeno dynamics.
//
// With x = m Var(H_Pi) (1 + kappa) mean^2:
//   weak regime     P* = exp(-x)
//   strong regime   P* = 1 - x
//   time averaged   P* = exp(-m beta^2 mean^2 (1 + kappa) <|c_lambda|^2>_t)
// and the exact product P* = exp(m sum_mu p(mu) ln q(mu)).

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "zeno/chain.hpp"
#include "zeno/linalg.hpp"
#include "zeno/protocols.hpp"
#include "zeno/stochastics.hpp"

namespace zeno {

enum class Regime { kStrong, kWeak, kTimeAveraged, kExactProduct };

struct TheoryPrediction {
  double pstar = 1.0;
  Regime regime = Regime::kWeak;
  std::size_t m = 0;
  Moments moments;
  double variance = 0.0;   // Var(H_Pi) or beta^2 <|c_lambda|^2>_t, rad^2/us^2
  double exponent = 0.0;   // x above (or -m <ln q> for the exact product)
  bool out_of_regime = false;
};

/// Strong-regime validity threshold on x; the raw value is always returned.
inline constexpr double kStrongRegimeLimit = 0.1;

/// <H_Pi^2> - <H_Pi>^2 with H_Pi = H - Pi H Pi.
double variance_h_pi(const StateVector& psi, const ChainSpec& spec);

/// beta^2 |c_lambda|^2: the chain closed form of the same variance.
double edge_variance(const StateVector& psi, const ChainSpec& spec);

TheoryPrediction pstar_weak(std::size_t m, const IntervalDistribution& d, double variance);
TheoryPrediction pstar_strong(std::size_t m, const IntervalDistribution& d, double variance);

/// q values aligned with `d.atoms()`.
TheoryPrediction pstar_exact_product(std::size_t m, const IntervalDistribution& d,
                                     std::span<const double> q_per_atom);
TheoryPrediction pstar_exact_product(std::size_t m, const IntervalDistribution& d,
                                     const std::function<double(double)>& q_of_mu);

/// One-step survival q(mu) = |Pi U(mu) psi|^2 and its leak 1 - q, computed
/// from the out-of-subspace amplitude so that ln q keeps full precision.
double survival_factor(const ZenoSystem& system, const StateVector& psi, double mu);
double log_survival_factor(const ZenoSystem& system, const StateVector& psi, double mu);

/// |c_lambda(t)|^2 under the lambda-site Hamiltonian on a uniform grid.
class EdgePopulationSeries {
 public:
  EdgePopulationSeries(std::vector<double> t_grid, std::vector<double> values);

  const std::vector<double>& t_grid() const { return t_grid_; }
  const std::vector<double>& values() const { return values_; }
  double t_end() const { return t_grid_.back(); }

  /// Trapezoidal integral over [0, t]; t must lie inside the grid.
  double integral(double t) const;
  /// (1/t_end) int_0^t_end |c_lambda|^2 dt.
  double time_average() const { return t_end() > 0.0 ? integral(t_end()) / t_end() : values_[0]; }

 private:
  std::vector<double> t_grid_;
  std::vector<double> values_;
  std::vector<double> prefix_;  // trapezoidal prefix sums
};

/// Grid 0, dt, 2 dt, ..., with the last point placed at t_end exactly.
EdgePopulationSeries edge_population(const ChainSpec& spec, const StateVector& psi0, double t_end,
                                     double dt);

/// Time-averaged prediction with t_m = m mean; `series` must cover t_m.
TheoryPrediction pstar_time_averaged(std::size_t m, const IntervalDistribution& d,
                                     const EdgePopulationSeries& series, double beta);

struct RemainderEstimate {
  double constant = 0.0;     // C, 1/us^3
  double at_mu = 0.0;        // grid point of the maximum
  double refined = 0.0;      // same scan at half the step
};

/// C = max_mu |(1/6) d^3/dmu^3 ln q(mu)| over [0, mu_max] by the 5-point
/// central stencil. Throws GridTooCoarse if halving the step moves C by
/// more than 10%.
RemainderEstimate remainder_constant(const ChainSpec& spec, const StateVector& psi0,
                                     double mu_max, double grid_step);

/// (1 - (2 w^2/(w^2+g^2)) sin^2(sqrt(w^2+g^2) t / 2))^2
double three_level_survival(double omega, double g, double t);

/// w(|1><2| + h.c.) + g(|2><3| + h.c.)
ComplexMatrix three_level_hamiltonian(double omega, double g);

/// Basis change diagonalizing the |2>,|3> coupling.
ComplexMatrix three_level_transform();

/// Expected T^dagger H T: couplings w/sqrt(2) to the dressed levels at +g, -g.
ComplexMatrix three_level_transformed(double omega, double g);

}  // namespace zeno
