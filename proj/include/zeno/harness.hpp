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

// Experiment orchestration: config files, figure presets, CSV output.
//
// Config format, one `key = value` per line, `#` starts a comment:
//
//   [chain]       sites, subspace, alpha, beta, include_field_phase
//   [protocol]    kind (pm|pc|cc), steps, distribution, pulse_area,
//                 coupling, measurement (post_selected|bernoulli)
//   [experiment]  initial_state (w_state|leftmost|custom), amplitudes,
//                 realizations, seed, output, lambda_sweep, kappa_sweep,
//                 protocols, trajectories (all|first|none)
//
// Lists use brackets: `lambda_sweep = [1, 2, 3]`,
// `kappa_sweep = [(0.8, 1, 11), (0.8, 2, 7)]`, `protocols = [pm, cc]`.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zeno/analysis.hpp"
#include "zeno/chain.hpp"
#include "zeno/protocols.hpp"
#include "zeno/stochastics.hpp"
#include "zeno/theory.hpp"

namespace zeno {

enum class InitialStateKind { kWState, kLeftmostExcited, kCustom };

struct InitialState {
  InitialStateKind kind = InitialStateKind::kWState;
  std::vector<Complex> amplitudes;  // kCustom only; sites 1..k
};

/// The state on an N-site chain with subspace lambda. Custom amplitudes are
/// normalized here; support beyond lambda is rejected.
StateVector build_initial_state(const InitialState& init, int sites, int subspace);

/// A point of a two-atom distribution family: p1 at mu1, 1 - p1 at mu2.
/// mu1 == mu2 stands for the deterministic distribution.
struct KappaPoint {
  double p1 = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  IntervalDistribution distribution() const;
};

enum class TrajectoryOutput { kAll, kFirst, kNone };

struct ExperimentConfig {
  ChainSpec chain;
  ProtocolConfig protocol;
  InitialState initial_state;
  std::size_t realizations = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_path = ".";
  std::vector<int> lambda_sweep;         // empty: chain.subspace only
  std::vector<KappaPoint> kappa_sweep;   // empty: protocol.distribution only
  std::vector<ProtocolKind> protocols;   // empty: protocol.kind only
  TrajectoryOutput trajectories = TrajectoryOutput::kAll;

  std::vector<int> lambdas() const;
  std::vector<ProtocolKind> kinds() const;
  std::vector<IntervalDistribution> distributions() const;
};

/// Parses and validates. ParseError messages start with "line N:".
ExperimentConfig parse_config(std::string_view text);

/// Component invariants after parsing or programmatic edits.
void validate(const ExperimentConfig& config);

struct RunOptions {
  bool reproducible = false;   // drop the timestamp header line
  unsigned threads = 0;        // 0: ZENO_LAB_THREADS, then hardware
  bool write_files = true;
};

/// Worker count: explicit value, else ZENO_LAB_THREADS, else hardware.
unsigned resolve_threads(unsigned requested);

struct SummaryRow {
  int lambda = 1;
  ProtocolKind protocol = ProtocolKind::kProjectiveMeasurement;
  double fidelity = 0.0;       // mean over realizations
  double p_final = 0.0;        // mean over realizations
  double pstar_theory = 1.0;   // time-averaged form at t_m = m mean
  double kappa = 0.0;
  std::size_t m = 0;
  double mu_mean = 0.0;
  EnsembleSummary ensemble;
  double beta = 0.0;
  double edge_average = 0.0;   // (1/t_m) int_0^t_m |c_lambda|^2 dt
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  std::vector<std::filesystem::path> files;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// theory.csv only; no simulation.
ExperimentResult run_theory(const ExperimentConfig& config, const RunOptions& options = {});

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Per (kappa point, lambda): Eq. (11)/(12)-style curves on the mean-time grid.
void write_theory_csv(std::ostream& os, const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Figure presets.

/// fig2, fig3, fig4 or fig5; ValidationError otherwise.
ExperimentConfig preset(std::string_view name);

struct ScalingPoint {
  ProtocolKind protocol = ProtocolKind::kProjectiveMeasurement;
  double mu = 0.0;
  std::size_t m = 0;
  double leakage = 0.0;  // 1 - P
};

/// Zeno-limit sweep at fixed m * mu: deterministic mu, one run per protocol.
std::vector<ScalingPoint> scaling_sweep(const ChainSpec& spec, const StateVector& psi0,
                                        double total_time, const std::vector<double>& mus);

/// Least-squares slope of log(1 - P) against log(mu) for one protocol.
double scaling_slope(const std::vector<ScalingPoint>& points, ProtocolKind protocol);

void write_scaling_csv(std::ostream& os, const std::vector<ScalingPoint>& points);

/// Runs a preset, including the fig4 scaling inset, under options.
ExperimentResult run_figure(std::string_view name, const ExperimentConfig& config,
                            const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Three-level model.

/// Columns t, P_formula, P_numeric, abs_diff on t = 0, dt, ..., t_max.
void run_three_level(std::ostream& os, double omega, double g, double t_max, double dt);

/// Largest |formula - numeric| over the same grid, without writing.
double three_level_max_error(double omega, double g, double t_max, double dt);

}  // namespace zeno
