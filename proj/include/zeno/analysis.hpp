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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "zeno/chain.hpp"
#include "zeno/linalg.hpp"
#include "zeno/protocols.hpp"
#include "zeno/theory.hpp"

namespace zeno {

/// Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a)), clamped to [0, 1].
///
/// Both inputs must be Hermitian, PSD within 1e-10 and of unit trace within
/// 1e-10. Eigenvalues below dim * epsilon are treated as zero in both square
/// roots; below that level they are indistinguishable from rounding, and
/// keeping them would put sqrt(epsilon) ~ 1e-8 noise on pure-state results.
double uhlmann_fidelity(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b);

/// |psi><psi|
ComplexMatrix density_matrix(const StateVector& psi);

/// Zero-pads a lambda-dimensional state into `dim` coordinates.
StateVector embed(const StateVector& psi, Eigen::Index dim);

/// Fidelity of the protocol's final state against the exact-subspace
/// reference at the same final time. Throws TimeMismatch otherwise.
double protocol_fidelity(const Trajectory& traj, const Trajectory& reference);

/// Per-step fidelities; both trajectories must have recorded states on the
/// same time grid.
std::vector<double> fidelity_series(const Trajectory& traj, const Trajectory& reference);

struct EnsembleSummary {
  std::size_t realizations = 0;
  std::vector<double> final_survival;   // in input order
  double mean_log = 0.0;                // mean ln P
  double std_log = 0.0;                 // sample std of ln P (0 for R = 1)
  double mode_log = 0.0;                // histogram mode of ln P, bin width std/5
  std::optional<double> theory_pstar;
};

EnsembleSummary aggregate(std::span<const Trajectory> realizations,
                          std::optional<TheoryPrediction> theory = std::nullopt);

/// Same statistics from raw ln P values.
EnsembleSummary aggregate_log_survival(std::span<const double> log_survival,
                                       std::optional<TheoryPrediction> theory = std::nullopt);

/// Indices of strict local maxima with value >= threshold.
std::vector<std::size_t> local_maxima(std::span<const double> values, double threshold);

/// Vertex of the parabola through (k-1, k, k+1), as a fractional offset in [-1, 1].
double parabolic_offset(double left, double mid, double right);

struct VelocityFit {
  std::vector<int> lambda_values;
  std::vector<double> first_peak_times;  // us
  double velocity = 0.0;                 // sites/us, slope of (lambda - 1) vs peak time
  double intercept = 0.0;
  double bound = 0.0;                    // e * beta, sites/us
};

struct VelocityFitOptions {
  int lambda_min = 2;
  int lambda_max = 10;
  double threshold = 0.05;
  double dt = 0.05;       // us
  double t_max = 2000.0;  // us
};

/// For each lambda, evolves |1_1> in the lambda-site chain and records the
/// first local maximum of |c_lambda(t)|^2 above threshold (parabolically
/// refined). Throws NoPeakFound when a chain never reaches the threshold.
VelocityFit fit_velocity(const ChainSpec& spec, const VelocityFitOptions& options = {});

}  // namespace zeno
