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

#include "zeno/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace zeno {

namespace {

constexpr double kDensityTolerance = 1e-10;

void validate_density(const ComplexMatrix& rho, const char* name) {
  if (rho.rows() != rho.cols() || rho.rows() < 1) {
    throw Error(ErrorCode::kInvalidDensityMatrix, std::string(name) + " is not square");
  }
  if (!is_hermitian(rho, kDensityTolerance)) {
    throw Error(ErrorCode::kInvalidDensityMatrix, std::string(name) + " is not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > kDensityTolerance) {
    throw Error(ErrorCode::kInvalidDensityMatrix, std::string(name) + " does not have unit trace");
  }
}

/// Eigenvalues of a density-like matrix with the rounding floor zeroed.
EigenDecomposition floored_eig(const ComplexMatrix& a, double floor, const char* name) {
  auto eig = hermitian_eig(a);
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    double& ev = eig.eigenvalues(k);
    if (ev < -kDensityTolerance) {
      throw Error(ErrorCode::kInvalidDensityMatrix,
                  std::string(name) + " has eigenvalue " + std::to_string(ev));
    }
    if (ev <= floor) ev = 0.0;
  }
  return eig;
}

}  // namespace

double uhlmann_fidelity(const ComplexMatrix& rho_a, const ComplexMatrix& rho_b) {
  validate_density(rho_a, "rho_a");
  validate_density(rho_b, "rho_b");
  if (rho_a.rows() != rho_b.rows()) {
    throw Error(ErrorCode::kInvalidDensityMatrix, "dimension mismatch");
  }
  const double floor = static_cast<double>(rho_a.rows()) * std::numeric_limits<double>::epsilon();

  auto eig_a = floored_eig(rho_a, floor, "rho_a");
  eig_a.eigenvalues = eig_a.eigenvalues.cwiseSqrt();
  floored_eig(rho_b, floor, "rho_b");  // PSD check only
  const ComplexMatrix root_a = reconstruct(eig_a);
  ComplexMatrix inner = root_a * rho_b * root_a;
  inner = 0.5 * (inner + inner.adjoint()).eval();

  const auto eig_inner = hermitian_eig(inner);
  double f = 0.0;
  for (Eigen::Index k = 0; k < eig_inner.eigenvalues.size(); ++k) {
    const double ev = eig_inner.eigenvalues(k);
    if (ev > floor) f += std::sqrt(ev);
  }
  return std::clamp(f, 0.0, 1.0);
}

ComplexMatrix density_matrix(const StateVector& psi) { return psi * psi.adjoint(); }

StateVector embed(const StateVector& psi, Eigen::Index dim) {
  if (psi.size() > dim) throw Error(ErrorCode::kInvalidSpec, "cannot embed into a smaller space");
  StateVector out = StateVector::Zero(dim);
  out.head(psi.size()) = psi;
  return out;
}

double protocol_fidelity(const Trajectory& traj, const Trajectory& reference) {
  const double t = traj.final_time();
  const double tr = reference.final_time();
  if (std::abs(t - tr) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw Error(ErrorCode::kTimeMismatch,
                "protocol ends at " + std::to_string(t) + " us, reference at " + std::to_string(tr));
  }
  const auto dim = traj.final_state.size();
  return uhlmann_fidelity(density_matrix(embed(reference.final_state, dim)),
                          density_matrix(traj.final_state));
}

std::vector<double> fidelity_series(const Trajectory& traj, const Trajectory& reference) {
  if (traj.states.size() != reference.states.size() || traj.times.size() != reference.times.size()) {
    throw Error(ErrorCode::kTimeMismatch, "trajectories record different grids");
  }
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    if (std::abs(traj.times[j] - reference.times[j]) > 1e-9 * std::max(1.0, traj.times[j])) {
      throw Error(ErrorCode::kTimeMismatch, "grids differ at step " + std::to_string(j + 1));
    }
    const auto dim = traj.states[j].size();
    out.push_back(uhlmann_fidelity(density_matrix(embed(reference.states[j], dim)),
                                   density_matrix(traj.states[j])));
  }
  return out;
}

EnsembleSummary aggregate_log_survival(std::span<const double> log_survival,
                                       std::optional<TheoryPrediction> theory) {
  EnsembleSummary s;
  s.realizations = log_survival.size();
  if (log_survival.empty()) return s;
  s.final_survival.reserve(log_survival.size());
  for (double l : log_survival) s.final_survival.push_back(std::exp(l));
  if (theory) s.theory_pstar = theory->pstar;

  // Statistics from sorted values so the result does not depend on the
  // order realizations finished in.
  std::vector<double> sorted(log_survival.begin(), log_survival.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean_log = sum / n;
  if (sorted.size() > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean_log) * (v - s.mean_log);
    s.std_log = std::sqrt(ss / (n - 1.0));
  }
  if (s.std_log == 0.0 || !std::isfinite(s.std_log)) {
    s.mode_log = s.mean_log;
    return s;
  }
  const double width = s.std_log / 5.0;
  const double lo = sorted.front();
  const auto bins = static_cast<std::size_t>(std::floor((sorted.back() - lo) / width)) + 1;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : sorted) {
    auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
    counts[std::min(b, bins - 1)]++;
  }
  const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  s.mode_log = lo + (static_cast<double>(best) + 0.5) * width;
  return s;
}

EnsembleSummary aggregate(std::span<const Trajectory> realizations,
                          std::optional<TheoryPrediction> theory) {
  std::vector<double> logs;
  logs.reserve(realizations.size());
  for (const auto& t : realizations) {
    logs.push_back(t.kind == ProtocolKind::kProjectiveMeasurement ? t.log_survival
                                                                  : std::log(t.final_survival()));
  }
  return aggregate_log_survival(logs, theory);
}

std::vector<std::size_t> local_maxima(std::span<const double> values, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k + 1 < values.size(); ++k) {
    if (values[k] > values[k - 1] && values[k] > values[k + 1] && values[k] >= threshold) {
      out.push_back(k);
    }
  }
  return out;
}

double parabolic_offset(double left, double mid, double right) {
  const double denom = left - 2.0 * mid + right;
  if (denom == 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -1.0, 1.0);
}

VelocityFit fit_velocity(const ChainSpec& spec, const VelocityFitOptions& options) {
  if (options.lambda_min < 2 || options.lambda_max < options.lambda_min) {
    throw Error(ErrorCode::kValidationError, "need 2 <= lambda_min <= lambda_max");
  }
  VelocityFit fit;
  for (int lam = options.lambda_min; lam <= options.lambda_max; ++lam) {
    ChainSpec sub = spec;
    sub.sites = lam;
    sub.subspace = lam;
    const auto series = edge_population(sub, site_state(lam, 1), options.t_max, options.dt);
    const auto& v = series.values();
    std::optional<double> peak;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
      if (v[k] > v[k - 1] && v[k] > v[k + 1] && v[k] >= options.threshold) {
        peak = series.t_grid()[k] + parabolic_offset(v[k - 1], v[k], v[k + 1]) * options.dt;
        break;
      }
    }
    if (!peak) {
      throw Error(ErrorCode::kNoPeakFound,
                  "|c_" + std::to_string(lam) + "|^2 never peaks above the threshold");
    }
    fit.lambda_values.push_back(lam);
    fit.first_peak_times.push_back(*peak);
  }

  const auto n = static_cast<double>(fit.lambda_values.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.lambda_values.size(); ++i) {
    const double x = fit.first_peak_times[i];
    const double y = fit.lambda_values[i] - 1.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2.0 || denom == 0.0) {
    // One chain: the line goes through the origin.
    fit.velocity = sy / sx;
    fit.intercept = 0.0;
  } else {
    fit.velocity = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.velocity * sx) / n;
  }
  fit.bound = std::numbers::e * spec.beta;
  return fit;
}

}  // namespace zeno
