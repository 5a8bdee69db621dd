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

#include "zeno/chain.hpp"

#include <cmath>
#include <string>

namespace zeno {

namespace {

std::string describe(const ChainSpec& spec) {
  return "N=" + std::to_string(spec.sites) + ", lambda=" + std::to_string(spec.subspace) +
         ", beta=" + std::to_string(spec.beta);
}

}  // namespace

void validate_model(const ChainSpec& spec) {
  if (spec.sites < 2 || spec.subspace < 1 || spec.subspace > spec.sites ||
      !(spec.beta > 0.0) || !std::isfinite(spec.beta) || !std::isfinite(spec.alpha)) {
    throw Error(ErrorCode::kInvalidSpec, describe(spec));
  }
}

void validate(const ChainSpec& spec) {
  validate_model(spec);
  if (spec.sites < 3 || spec.subspace > spec.sites - 2) {
    throw Error(ErrorCode::kInvalidSpec, "need N >= 3 and lambda <= N-2 (" + describe(spec) + ")");
  }
}

ComplexMatrix hamiltonian(const ChainSpec& spec) {
  validate_model(spec);
  const Eigen::Index n = spec.sites;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = h(i + 1, i) = spec.beta;
  }
  if (spec.include_field_phase) {
    h.diagonal().setConstant(spec.alpha * (2.0 - static_cast<double>(spec.sites)));
  }
  return h;
}

ComplexMatrix projector(const ChainSpec& spec) {
  validate_model(spec);
  ComplexMatrix p = ComplexMatrix::Zero(spec.sites, spec.sites);
  p.diagonal().head(spec.subspace).setOnes();
  return p;
}

ComplexMatrix zeno_hamiltonian(const ChainSpec& spec) {
  validate_model(spec);
  // With the field phase on, the diagonal constant is alpha (2 - lambda) rather
  // than the alpha (2 - N) of the Pi H Pi block; the two differ by a global phase.
  const Eigen::Index n = spec.subspace;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = h(i + 1, i) = spec.beta;
  }
  if (spec.include_field_phase) {
    h.diagonal().setConstant(spec.alpha * (2.0 - static_cast<double>(n)));
  }
  return h;
}

ComplexMatrix coupling_hamiltonian(const ChainSpec& spec) {
  validate_model(spec);
  if (spec.subspace + 2 > spec.sites) {
    throw Error(ErrorCode::kSubspaceTooLarge,
                "coupling needs sites lambda+1, lambda+2 (" + describe(spec) + ")");
  }
  ComplexMatrix hc = ComplexMatrix::Zero(spec.sites, spec.sites);
  // 0-based storage: sites lambda+1, lambda+2 live at lambda, lambda+1.
  const Eigen::Index a = spec.subspace;
  hc(a, a + 1) = hc(a + 1, a) = 2.0;
  return hc;
}

StateVector site_state(int sites, int site) {
  if (site < 1 || site > sites) {
    throw Error(ErrorCode::kInvalidSpec, "site " + std::to_string(site) + " outside 1.." +
                                             std::to_string(sites));
  }
  StateVector psi = StateVector::Zero(sites);
  psi(site - 1) = 1.0;
  return psi;
}

StateVector w_state(int sites, int subspace) {
  if (subspace < 1 || subspace > sites) {
    throw Error(ErrorCode::kInvalidSpec, "W-state support outside chain");
  }
  StateVector psi = StateVector::Zero(sites);
  psi.head(subspace).setConstant(1.0 / std::sqrt(static_cast<double>(subspace)));
  return psi;
}

ChainSpec with_sites(ChainSpec spec, int sites) {
  spec.sites = sites;
  return spec;
}

}  // namespace zeno
