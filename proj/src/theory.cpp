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

#include "zeno/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace zeno {

namespace {

void require_subspace_state(const StateVector& psi, const ChainSpec& spec) {
  if (psi.size() != spec.sites) {
    throw Error(ErrorCode::kInvalidSpec, "state dimension does not match the chain");
  }
  if (std::abs(psi.squaredNorm() - 1.0) > tolerance::kNormalized) {
    throw Error(ErrorCode::kNotNormalized, "state is not normalized");
  }
  const auto tail = spec.sites - spec.subspace;
  if (tail > 0 && psi.tail(tail).norm() > tolerance::kNormalized) {
    throw Error(ErrorCode::kInitialStateOutsideSubspace, "state has support outside the subspace");
  }
}

TheoryPrediction base(std::size_t m, const IntervalDistribution& d, double variance,
                      Regime regime) {
  TheoryPrediction p;
  p.m = m;
  p.moments = moments(d);
  p.variance = variance;
  p.regime = regime;
  p.exponent = static_cast<double>(m) * variance * (1.0 + p.moments.kappa) * p.moments.mean *
               p.moments.mean;
  return p;
}

}  // namespace

double variance_h_pi(const StateVector& psi, const ChainSpec& spec) {
  require_subspace_state(psi, spec);
  const ComplexMatrix h = hamiltonian(spec);
  const ComplexMatrix pi = projector(spec);
  const ComplexMatrix leak = h - pi * h * pi;
  const StateVector hpsi = leak * psi;
  const double mean = psi.dot(hpsi).real();
  return hpsi.squaredNorm() - mean * mean;
}

double edge_variance(const StateVector& psi, const ChainSpec& spec) {
  require_subspace_state(psi, spec);
  return spec.beta * spec.beta * std::norm(psi(spec.subspace - 1));
}

TheoryPrediction pstar_weak(std::size_t m, const IntervalDistribution& d, double variance) {
  if (variance < 0.0) throw Error(ErrorCode::kValidationError, "variance must be >= 0");
  auto p = base(m, d, variance, Regime::kWeak);
  p.pstar = std::exp(-p.exponent);
  return p;
}

TheoryPrediction pstar_strong(std::size_t m, const IntervalDistribution& d, double variance) {
  if (variance < 0.0) throw Error(ErrorCode::kValidationError, "variance must be >= 0");
  auto p = base(m, d, variance, Regime::kStrong);
  p.pstar = 1.0 - p.exponent;
  p.out_of_regime = p.exponent > kStrongRegimeLimit;
  return p;
}

TheoryPrediction pstar_exact_product(std::size_t m, const IntervalDistribution& d,
                                     std::span<const double> q_per_atom) {
  const auto& atoms = d.atoms();
  if (q_per_atom.size() != atoms.size()) {
    throw Error(ErrorCode::kValidationError, "one q value per atom required");
  }
  double mean_log = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double q = q_per_atom[i];
    if (!(q > 0.0)) {
      throw Error(ErrorCode::kNonPositiveQ, "q(" + std::to_string(atoms[i].mu) + ") <= 0");
    }
    mean_log += atoms[i].prob * std::log(q);
  }
  TheoryPrediction p;
  p.m = m;
  p.moments = moments(d);
  p.regime = Regime::kExactProduct;
  p.exponent = -static_cast<double>(m) * mean_log;
  p.pstar = std::exp(-p.exponent);
  return p;
}

TheoryPrediction pstar_exact_product(std::size_t m, const IntervalDistribution& d,
                                     const std::function<double(double)>& q_of_mu) {
  std::vector<double> q;
  q.reserve(d.atoms().size());
  for (const Atom& a : d.atoms()) q.push_back(q_of_mu(a.mu));
  return pstar_exact_product(m, d, q);
}

double log_survival_factor(const ZenoSystem& system, const StateVector& psi, double mu) {
  const StateVector evolved = propagator(system.hamiltonian, mu) * psi;
  const auto tail = system.dim() - system.subspace;
  const double leak = tail > 0 ? evolved.tail(tail).squaredNorm() : 0.0;
  return std::log1p(-leak);
}

double survival_factor(const ZenoSystem& system, const StateVector& psi, double mu) {
  return std::exp(log_survival_factor(system, psi, mu));
}

EdgePopulationSeries::EdgePopulationSeries(std::vector<double> t_grid, std::vector<double> values)
    : t_grid_(std::move(t_grid)), values_(std::move(values)) {
  if (t_grid_.empty() || t_grid_.size() != values_.size()) {
    throw Error(ErrorCode::kValidationError, "edge series needs matching, non-empty grids");
  }
  prefix_.resize(t_grid_.size());
  prefix_[0] = 0.0;
  for (std::size_t k = 1; k < t_grid_.size(); ++k) {
    prefix_[k] = prefix_[k - 1] + 0.5 * (values_[k] + values_[k - 1]) * (t_grid_[k] - t_grid_[k - 1]);
  }
}

double EdgePopulationSeries::integral(double t) const {
  if (t < t_grid_.front() || t > t_grid_.back() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kTimeMismatch, "integral limit " + std::to_string(t) +
                                              " outside the edge series grid");
  }
  t = std::min(t, t_grid_.back());
  const auto it = std::upper_bound(t_grid_.begin(), t_grid_.end(), t);
  if (it == t_grid_.end()) return prefix_.back();
  const auto k = static_cast<std::size_t>(it - t_grid_.begin());  // t_grid_[k-1] <= t < t_grid_[k]
  const double t0 = t_grid_[k - 1];
  const double frac = (t - t0) / (t_grid_[k] - t0);
  const double vt = values_[k - 1] + frac * (values_[k] - values_[k - 1]);
  return prefix_[k - 1] + 0.5 * (values_[k - 1] + vt) * (t - t0);
}

EdgePopulationSeries edge_population(const ChainSpec& spec, const StateVector& psi0, double t_end,
                                     double dt) {
  require_subspace_state(psi0, spec);
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw Error(ErrorCode::kValidationError, "need dt > 0 and t_end >= 0");
  }
  const auto lam = spec.subspace;
  const auto eig = hermitian_eig(zeno_hamiltonian(spec));
  const StateVector amplitudes = eig.eigenvectors.adjoint() * psi0.head(lam);
  // c_lambda(t) = sum_k V(lambda, k) exp(-i E_k t) a_k
  const StateVector weights = eig.eigenvectors.row(lam - 1).transpose().cwiseProduct(amplitudes);

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  std::vector<double> grid;
  std::vector<double> values;
  grid.reserve(steps + 1);
  values.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = k == steps ? t_end : static_cast<double>(k) * dt;
    Complex c = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      c += weights(i) * std::polar(1.0, -eig.eigenvalues(i) * t);
    }
    grid.push_back(t);
    values.push_back(std::norm(c));
  }
  return EdgePopulationSeries(std::move(grid), std::move(values));
}

TheoryPrediction pstar_time_averaged(std::size_t m, const IntervalDistribution& d,
                                     const EdgePopulationSeries& series, double beta) {
  const Moments mom = moments(d);
  const double t_m = static_cast<double>(m) * mom.mean;
  const double average = t_m > 0.0 ? series.integral(t_m) / t_m : series.values().front();
  auto p = base(m, d, beta * beta * average, Regime::kTimeAveraged);
  p.pstar = std::exp(-p.exponent);
  return p;
}

namespace {

double third_derivative_scan(const ZenoSystem& sys, const StateVector& psi, double mu_max,
                             double h, double* where, double* noise = nullptr) {
  // ln q on the grid -2h .. mu_max + 2h, reused across stencils.
  const auto points = static_cast<std::size_t>(std::ceil(mu_max / h - 1e-9));
  std::vector<double> f(points + 5);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double mu = (static_cast<double>(k) - 2.0) * h;
    f[k] = log_survival_factor(sys, psi, mu);
  }
  if (noise) {
    // Round-off level of the stencil. The leak is the square of an amplitude
    // carrying an absolute error of about dim * eps, so each ln q sample is
    // off by about 2 * dim * eps * sqrt(leak).
    double largest = 0.0;
    for (double v : f) largest = std::max(largest, std::abs(v));
    const double eps = std::numeric_limits<double>::epsilon();
    const double per_sample =
        2.0 * static_cast<double>(sys.dim()) * eps * std::sqrt(largest) + eps * largest;
    *noise = 6.0 * per_sample / (2.0 * h * h * h) / 6.0;
  }
  double best = 0.0;
  for (std::size_t k = 2; k + 2 < f.size(); ++k) {
    const double d3 = (f[k + 2] - 2.0 * f[k + 1] + 2.0 * f[k - 1] - f[k - 2]) / (2.0 * h * h * h);
    const double c = std::abs(d3) / 6.0;
    if (c > best) {
      best = c;
      if (where) *where = (static_cast<double>(k) - 2.0) * h;
    }
  }
  return best;
}

}  // namespace

RemainderEstimate remainder_constant(const ChainSpec& spec, const StateVector& psi0,
                                     double mu_max, double grid_step) {
  require_subspace_state(psi0, spec);
  if (!(grid_step > 0.0) || !(mu_max > 0.0)) {
    throw Error(ErrorCode::kValidationError, "need mu_max > 0 and grid_step > 0");
  }
  const ZenoSystem sys = make_system(spec);
  RemainderEstimate out;
  out.constant = third_derivative_scan(sys, psi0, mu_max, grid_step, &out.at_mu);
  double noise = 0.0;
  out.refined = third_derivative_scan(sys, psi0, mu_max, 0.5 * grid_step, nullptr, &noise);
  const double scale = std::max(out.constant, out.refined);
  // Below the round-off level both estimates are noise and only say C ~ 0.
  if (scale > noise && std::abs(out.constant - out.refined) > 0.1 * scale) {
    throw Error(ErrorCode::kGridTooCoarse, "C changed from " + std::to_string(out.constant) +
                                               " to " + std::to_string(out.refined) +
                                               " when halving the step");
  }
  return out;
}

double three_level_survival(double omega, double g, double t) {
  const double w2 = omega * omega;
  const double r2 = w2 + g * g;
  if (r2 == 0.0) return 1.0;
  const double s = std::sin(std::sqrt(r2) * t / 2.0);
  const double amp = 1.0 - 2.0 * w2 / r2 * s * s;
  return amp * amp;
}

ComplexMatrix three_level_hamiltonian(double omega, double g) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 1) = h(1, 0) = omega;
  h(1, 2) = h(2, 1) = g;
  return h;
}

ComplexMatrix three_level_transform() {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix t(3, 3);
  t << 1.0, 0.0, 0.0,
       0.0, r, r,
       0.0, r, -r;
  return t;
}

ComplexMatrix three_level_transformed(double omega, double g) {
  const double c = omega / std::sqrt(2.0);
  ComplexMatrix h(3, 3);
  h << 0.0, c, c,
       c, g, 0.0,
       c, 0.0, -g;
  return h;
}

}  // namespace zeno
