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

// XY spin chain restricted to the single-excitation sector.
//
// Basis vector k (0-based storage) is |1_{k+1}>, the state with the single
// excitation on site k+1. Public functions taking a site use 1-based indices.
//
//   H_N = alpha sum_i sigma_z^i + (beta/2) sum_i (sigma_x^i sigma_x^{i+1} + sigma_y^i sigma_y^{i+1})
//
// reduces in this sector to a hopping matrix with amplitude beta plus the
// constant diagonal alpha (2 - N) (sigma_z|1> = +|1>).

#pragma once

#include <cstddef>

#include "zeno/linalg.hpp"

namespace zeno {

/// Default field and coupling: 2 pi x 5 kHz in rad/us.
inline constexpr double kDefaultRate = 2.0 * 3.14159265358979323846 * 5e-3;

struct ChainSpec {
  int sites = 12;                  // N
  double alpha = kDefaultRate;     // field, rad/us
  double beta = kDefaultRate;      // hopping, rad/us
  int subspace = 1;                // lambda, first sites kept by the projector
  bool include_field_phase = false;
};

/// Full invariant for experiment chains: N >= 3, 1 <= lambda <= N-2, beta > 0.
void validate(const ChainSpec& spec);

/// Relaxed check used by the matrix builders: N >= 2, 1 <= lambda <= N,
/// beta > 0. Lets tests build the two-site chain and the trivial projector.
void validate_model(const ChainSpec& spec);

/// N x N tridiagonal single-excitation Hamiltonian.
ComplexMatrix hamiltonian(const ChainSpec& spec);

/// Diagonal 0/1 projector onto sites 1..lambda.
ComplexMatrix projector(const ChainSpec& spec);

/// Hamiltonian of the lambda-site chain; equals the lambda x lambda block of
/// Pi H Pi up to a constant diagonal when the field phase is included.
ComplexMatrix zeno_hamiltonian(const ChainSpec& spec);

/// sigma_x sigma_x + sigma_y sigma_y on sites lambda+1, lambda+2, reduced to
/// the sector: hopping amplitude 2 (no beta/2 prefactor).
/// Throws SubspaceTooLarge when lambda + 2 > N.
ComplexMatrix coupling_hamiltonian(const ChainSpec& spec);

/// |1_site> in an N-site chain (site is 1-based).
StateVector site_state(int sites, int site);

/// (1/sqrt(lambda)) sum_{i<=lambda} |1_i> embedded in N sites.
StateVector w_state(int sites, int subspace);

/// Spec copy with the number of sites replaced; used for the lambda-site chain.
ChainSpec with_sites(ChainSpec spec, int sites);

}  // namespace zeno
