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

#include "zeno/protocols.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "zeno/csv.hpp"

namespace zeno {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kProjectiveMeasurement: return "projective";
    case ProtocolKind::kPulsedCoupling: return "pulsed";
    case ProtocolKind::kContinuousCoupling: return "continuous";
  }
  return "unknown";
}

std::string_view short_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kProjectiveMeasurement: return "pm";
    case ProtocolKind::kPulsedCoupling: return "pc";
    case ProtocolKind::kContinuousCoupling: return "cc";
  }
  return "??";
}

double ProtocolConfig::coupling_or_default() const {
  return coupling ? *coupling : std::numbers::pi / (2.0 * moments(distribution).mean);
}

void validate(const ProtocolConfig& config) {
  if (config.steps < 1) throw Error(ErrorCode::kValidationError, "m must be >= 1");
  if (config.kind == ProtocolKind::kPulsedCoupling && !(config.pulse_area > 0.0)) {
    throw Error(ErrorCode::kValidationError, "pulse area must be > 0");
  }
  if (config.kind == ProtocolKind::kContinuousCoupling && !(config.coupling_or_default() > 0.0)) {
    throw Error(ErrorCode::kValidationError, "coupling g must be > 0");
  }
}

ZenoSystem make_system(const ChainSpec& spec) {
  ZenoSystem sys;
  sys.hamiltonian = hamiltonian(spec);
  sys.subspace_hamiltonian = zeno_hamiltonian(spec);
  if (spec.subspace + 2 <= spec.sites) sys.coupling = coupling_hamiltonian(spec);
  sys.subspace = spec.subspace;
  return sys;
}

namespace {

constexpr double kDeadBranch = 1e-300;

void require_normalized(const StateVector& psi) {
  if (std::abs(psi.squaredNorm() - 1.0) > tolerance::kNormalized) {
    throw Error(ErrorCode::kNotNormalized,
                "|psi|^2 = " + std::to_string(psi.squaredNorm()));
  }
}

void require_in_subspace(const ZenoSystem& sys, const StateVector& psi) {
  if (psi.size() != sys.dim()) {
    throw Error(ErrorCode::kInvalidSpec, "state dimension does not match the system");
  }
  require_normalized(psi);
  const auto tail = sys.dim() - sys.subspace;
  if (tail > 0 && psi.tail(tail).norm() > tolerance::kNormalized) {
    throw Error(ErrorCode::kInitialStateOutsideSubspace,
                "leak norm " + std::to_string(psi.tail(tail).norm()));
  }
}

void require_coupling(const ZenoSystem& sys) {
  if (sys.coupling.size() == 0) {
    throw Error(ErrorCode::kSubspaceTooLarge, "no room for the coupling sites lambda+1, lambda+2");
  }
}

/// Propagators keyed by interval length. Atomic p(mu) gives only a handful
/// of distinct keys, so a linear scan beats hashing.
class PropagatorCache {
 public:
  PropagatorCache(const ComplexMatrix& h, const ComplexMatrix* kick)
      : eig_(hermitian_eig(h)), kick_(kick) {}

  const ComplexMatrix& get(double mu) {
    for (auto& [key, u] : entries_) {
      if (key == mu) return u;
    }
    ComplexMatrix u = propagator(eig_, mu);
    if (kick_) u = (*kick_ * u).eval();
    entries_.emplace_back(mu, std::move(u));
    return entries_.back().second;
  }

 private:
  EigenDecomposition eig_;
  const ComplexMatrix* kick_;
  std::vector<std::pair<double, ComplexMatrix>> entries_;
};

Trajectory start(ProtocolKind kind, std::size_t steps, bool record) {
  Trajectory t;
  t.kind = kind;
  t.intervals.reserve(steps);
  t.times.reserve(steps);
  t.cumulative_survival.reserve(steps);
  t.subspace_population.reserve(steps);
  if (kind == ProtocolKind::kProjectiveMeasurement) t.survival_factors.reserve(steps);
  if (record) t.states.reserve(steps);
  return t;
}

Trajectory projective_impl(const ZenoSystem& sys, const StateVector& psi0,
                           std::span<const double> intervals, SeededSampler* outcomes,
                           bool record) {
  require_in_subspace(sys, psi0);
  Trajectory traj = start(ProtocolKind::kProjectiveMeasurement, intervals.size(), record);
  PropagatorCache cache(sys.hamiltonian, nullptr);
  const auto lam = sys.subspace;
  const auto tail = sys.dim() - lam;

  StateVector psi = psi0;
  StateVector next(psi.size());
  double survival = 1.0;
  double t = 0.0;
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    const double mu = intervals[j];
    t += mu;
    next.noalias() = cache.get(mu) * psi;
    const double q = next.head(lam).squaredNorm();
    if (q < kDeadBranch) {
      throw Error(ErrorCode::kZeroSurvival, "q_" + std::to_string(j + 1) + " underflowed");
    }
    if (tail > 0) next.tail(tail).setZero();
    psi = next / std::sqrt(q);

    traj.intervals.push_back(mu);
    traj.times.push_back(t);
    traj.survival_factors.push_back(q);
    traj.subspace_population.push_back(q);
    if (outcomes) {
      // The branch survives with probability q; on a leak the run ends.
      if (outcomes->uniform() >= q) {
        traj.failed_at = j + 1;
        traj.cumulative_survival.push_back(0.0);
        traj.log_survival = -std::numeric_limits<double>::infinity();
        if (record) traj.states.push_back(psi);
        break;
      }
      traj.cumulative_survival.push_back(1.0);
    } else {
      survival *= q;
      traj.log_survival += std::log(q);
      traj.cumulative_survival.push_back(survival);
    }
    if (record) traj.states.push_back(psi);
  }
  traj.final_state = std::move(psi);
  return traj;
}

}  // namespace

Trajectory run_projective(const ZenoSystem& system, const StateVector& psi0,
                          std::span<const double> intervals, bool record_states) {
  return projective_impl(system, psi0, intervals, nullptr, record_states);
}

Trajectory run_projective_bernoulli(const ZenoSystem& system, const StateVector& psi0,
                                    std::span<const double> intervals, SeededSampler& outcomes,
                                    bool record_states) {
  return projective_impl(system, psi0, intervals, &outcomes, record_states);
}

Trajectory run_pulsed(const ZenoSystem& system, const StateVector& psi0,
                      std::span<const double> intervals, double pulse_area, bool record_states) {
  require_coupling(system);
  require_in_subspace(system, psi0);
  const ComplexMatrix kick = propagator(system.coupling, pulse_area);
  PropagatorCache cache(system.hamiltonian, &kick);
  Trajectory traj = start(ProtocolKind::kPulsedCoupling, intervals.size(), record_states);
  const auto lam = system.subspace;

  StateVector psi = psi0;
  StateVector next(psi.size());
  double t = 0.0;
  for (const double mu : intervals) {
    t += mu;
    next.noalias() = cache.get(mu) * psi;
    psi.swap(next);
    const double pop = psi.head(lam).squaredNorm();
    traj.intervals.push_back(mu);
    traj.times.push_back(t);
    traj.subspace_population.push_back(pop);
    traj.cumulative_survival.push_back(pop);
    if (record_states) traj.states.push_back(psi);
  }
  traj.final_state = std::move(psi);
  return traj;
}

Trajectory run_continuous(const ZenoSystem& system, const StateVector& psi0, double total_time,
                          double coupling, std::span<const double> sample_times,
                          bool record_states) {
  if (psi0.size() != system.dim()) {
    throw Error(ErrorCode::kInvalidSpec, "state dimension does not match the system");
  }
  require_normalized(psi0);
  if (!(total_time > 0.0)) throw Error(ErrorCode::kValidationError, "t_m must be > 0");
  ComplexMatrix h = system.hamiltonian;
  if (coupling != 0.0) {
    require_coupling(system);
    h += coupling * system.coupling;
  }
  const auto eig = hermitian_eig(h);
  const StateVector amplitudes = eig.eigenvectors.adjoint() * psi0;
  auto evolve = [&](double t) -> StateVector {
    const StateVector phased =
        amplitudes.cwiseProduct((eig.eigenvalues * (-t))
                                    .unaryExpr([](double x) { return std::polar(1.0, x); })
                                    .eval());
    return eig.eigenvectors * phased;
  };

  Trajectory traj = start(ProtocolKind::kContinuousCoupling, sample_times.size(), record_states);
  const auto lam = system.subspace;
  double prev = 0.0;
  for (const double t : sample_times) {
    if (t < 0.0 || t > total_time * (1.0 + 1e-12)) {
      throw Error(ErrorCode::kValidationError, "sample time outside [0, t_m]");
    }
    const StateVector psi = evolve(t);
    const double pop = psi.head(lam).squaredNorm();
    traj.intervals.push_back(t - prev);
    traj.times.push_back(t);
    traj.subspace_population.push_back(pop);
    traj.cumulative_survival.push_back(pop);
    if (record_states) traj.states.push_back(psi);
    prev = t;
  }
  traj.final_state = evolve(total_time);
  return traj;
}

Trajectory run_exact_subspace(const ZenoSystem& system, const StateVector& psi0,
                              std::span<const double> t_grid, bool record_states) {
  require_in_subspace(system, psi0);
  const auto lam = system.subspace;
  const auto eig = hermitian_eig(system.subspace_hamiltonian);
  const StateVector amplitudes = eig.eigenvectors.adjoint() * psi0.head(lam);
  Trajectory traj = start(ProtocolKind::kProjectiveMeasurement, t_grid.size(), record_states);
  double prev = 0.0;
  StateVector psi = psi0.head(lam);
  for (const double t : t_grid) {
    const StateVector phased =
        amplitudes.cwiseProduct((eig.eigenvalues * (-t))
                                    .unaryExpr([](double x) { return std::polar(1.0, x); })
                                    .eval());
    psi = eig.eigenvectors * phased;
    traj.intervals.push_back(t - prev);
    traj.times.push_back(t);
    traj.subspace_population.push_back(1.0);
    traj.cumulative_survival.push_back(1.0);
    if (record_states) traj.states.push_back(psi);
    prev = t;
  }
  traj.final_state = std::move(psi);
  return traj;
}

Trajectory run_projective(const ChainSpec& spec, const StateVector& psi0,
                          const ProtocolConfig& config, SeededSampler& sampler) {
  auto cfg = config;
  cfg.kind = ProtocolKind::kProjectiveMeasurement;
  return run_protocol(make_system(spec), psi0, cfg, sampler);
}

Trajectory run_pulsed(const ChainSpec& spec, const StateVector& psi0,
                      const ProtocolConfig& config, SeededSampler& sampler) {
  auto cfg = config;
  cfg.kind = ProtocolKind::kPulsedCoupling;
  return run_protocol(make_system(spec), psi0, cfg, sampler);
}

Trajectory run_continuous(const ChainSpec& spec, const StateVector& psi0, double total_time,
                          double coupling, std::span<const double> sample_times) {
  return run_continuous(make_system(spec), psi0, total_time, coupling, sample_times);
}

Trajectory run_exact_subspace(const ChainSpec& spec, const StateVector& psi0,
                              std::span<const double> t_grid) {
  return run_exact_subspace(make_system(spec), psi0, t_grid);
}

Trajectory run_protocol_on(const ZenoSystem& system, const StateVector& psi0,
                           const ProtocolConfig& config, std::span<const double> intervals,
                           SeededSampler* outcomes) {
  validate(config);
  switch (config.kind) {
    case ProtocolKind::kProjectiveMeasurement:
      if (config.measurement == MeasurementMode::kBernoulli) {
        if (!outcomes) {
          throw Error(ErrorCode::kValidationError, "Bernoulli mode needs an outcome sampler");
        }
        return run_projective_bernoulli(system, psi0, intervals, *outcomes, config.record_states);
      }
      return run_projective(system, psi0, intervals, config.record_states);
    case ProtocolKind::kPulsedCoupling:
      return run_pulsed(system, psi0, intervals, config.pulse_area, config.record_states);
    case ProtocolKind::kContinuousCoupling: {
      std::vector<double> times;
      times.reserve(intervals.size());
      double t = 0.0;
      for (const double mu : intervals) times.push_back(t += mu);
      auto traj = run_continuous(system, psi0, t, config.coupling_or_default(), times,
                                 config.record_states);
      return traj;
    }
  }
  throw Error(ErrorCode::kValidationError, "unknown protocol");
}

Trajectory run_protocol(const ZenoSystem& system, const StateVector& psi0,
                        const ProtocolConfig& config, SeededSampler& sampler) {
  validate(config);
  const auto intervals = sample_intervals(config.distribution, sampler, config.steps);
  return run_protocol_on(system, psi0, config, intervals, &sampler);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const bool projective = traj.kind == ProtocolKind::kProjectiveMeasurement;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  os << "step,t_us,mu_us,q_j,P_cum,pop_subspace\n";
  csv::row(os, {"0", csv::num(0.0), csv::num(0.0), projective ? csv::num(1.0) : "",
                csv::num(1.0), csv::num(1.0)});
  for (std::size_t j = 0; j < traj.cumulative_survival.size(); ++j) {
    csv::row(os, {std::to_string(j + 1), csv::num(traj.times[j]), csv::num(traj.intervals[j]),
                  csv::num(projective ? traj.survival_factors[j] : nan),
                  csv::num(traj.cumulative_survival[j]), csv::num(traj.subspace_population[j])});
  }
}

}  // namespace zeno
