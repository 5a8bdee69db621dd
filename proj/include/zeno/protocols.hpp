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

// Stochastic Zeno confinement protocols on pure states:
//   projective measurements at random times (post-selected),
//   instantaneous kicks exp(-i Hc s) at random times,
//   continuous strong coupling H + g Hc.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "zeno/chain.hpp"
#include "zeno/linalg.hpp"
#include "zeno/stochastics.hpp"

namespace zeno {

enum class ProtocolKind { kProjectiveMeasurement, kPulsedCoupling, kContinuousCoupling };

/// Post-selection tracks the surviving branch and its probability; Bernoulli
/// draws the measurement outcome and stops the trajectory on the first leak.
enum class MeasurementMode { kPostSelected, kBernoulli };

std::string_view to_string(ProtocolKind kind);
/// Short tag used in CSV output: "pm", "pc", "cc".
std::string_view short_name(ProtocolKind kind);

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::kProjectiveMeasurement;
  std::size_t steps = 1;  // m
  IntervalDistribution distribution = IntervalDistribution::deterministic(1.0);
  double pulse_area = std::numbers::pi / 2.0;  // s, rad
  std::optional<double> coupling;              // g, rad/us; default pi / (2 mean)
  bool record_states = false;
  MeasurementMode measurement = MeasurementMode::kPostSelected;

  double coupling_or_default() const;
};

void validate(const ProtocolConfig& config);

/// Matrices a protocol needs. The Zeno subspace is always the leading
/// `subspace` coordinates, so projection is a tail truncation.
struct ZenoSystem {
  ComplexMatrix hamiltonian;             // N x N
  ComplexMatrix subspace_hamiltonian;    // lambda x lambda
  ComplexMatrix coupling;                // N x N, empty if the chain is too short
  Eigen::Index subspace = 1;

  Eigen::Index dim() const { return hamiltonian.rows(); }
};

ZenoSystem make_system(const ChainSpec& spec);

struct Trajectory {
  ProtocolKind kind = ProtocolKind::kProjectiveMeasurement;
  std::vector<double> intervals;            // mu_j
  std::vector<double> times;                // t_j = sum_{k<=j} mu_k
  std::vector<double> survival_factors;     // q_j, projective only
  std::vector<double> cumulative_survival;  // P after step j
  std::vector<double> subspace_population;  // Tr(Pi rho) before any projection at step j
  std::vector<StateVector> states;          // after step j, if recorded
  StateVector final_state;
  double log_survival = 0.0;                // sum ln q_j, finite even when P underflows
  std::optional<std::size_t> failed_at;     // Bernoulli mode: 1-based step of the leak

  std::size_t steps() const { return intervals.size(); }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }
  double final_survival() const {
    return cumulative_survival.empty() ? 1.0 : cumulative_survival.back();
  }
};

// Explicit interval sequences. These are the primitives; the sampler-driven
// overloads below draw the sequence and delegate.

Trajectory run_projective(const ZenoSystem& system, const StateVector& psi0,
                          std::span<const double> intervals, bool record_states = false);

/// Bernoulli outcomes drawn from `outcomes`.
Trajectory run_projective_bernoulli(const ZenoSystem& system, const StateVector& psi0,
                                    std::span<const double> intervals, SeededSampler& outcomes,
                                    bool record_states = false);

Trajectory run_pulsed(const ZenoSystem& system, const StateVector& psi0,
                      std::span<const double> intervals, double pulse_area,
                      bool record_states = false);

/// psi(t) = exp(-i (H + g Hc) t) psi0 at each sample time; final_state is
/// psi(total_time).
Trajectory run_continuous(const ZenoSystem& system, const StateVector& psi0, double total_time,
                          double coupling, std::span<const double> sample_times,
                          bool record_states = false);

/// Perfect confinement reference: lambda-dimensional evolution under the
/// subspace Hamiltonian. States are lambda-dimensional.
Trajectory run_exact_subspace(const ZenoSystem& system, const StateVector& psi0,
                              std::span<const double> t_grid, bool record_states = false);

// Chain + sampler entry points.

Trajectory run_projective(const ChainSpec& spec, const StateVector& psi0,
                          const ProtocolConfig& config, SeededSampler& sampler);
Trajectory run_pulsed(const ChainSpec& spec, const StateVector& psi0,
                      const ProtocolConfig& config, SeededSampler& sampler);
Trajectory run_continuous(const ChainSpec& spec, const StateVector& psi0, double total_time,
                          double coupling, std::span<const double> sample_times);
Trajectory run_exact_subspace(const ChainSpec& spec, const StateVector& psi0,
                              std::span<const double> t_grid);

/// Draws the interval sequence from `sampler` and runs `config.kind`. For
/// continuous coupling the sequence only fixes the sample times and t_m.
Trajectory run_protocol(const ZenoSystem& system, const StateVector& psi0,
                        const ProtocolConfig& config, SeededSampler& sampler);

/// Runs `config.kind` on a given interval sequence (shared across protocols).
Trajectory run_protocol_on(const ZenoSystem& system, const StateVector& psi0,
                           const ProtocolConfig& config, std::span<const double> intervals,
                           SeededSampler* outcomes = nullptr);

/// CSV with header `step,t_us,mu_us,q_j,P_cum,pop_subspace`; row 0 is the
/// initial state. q_j is empty for the coherent protocols.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace zeno
