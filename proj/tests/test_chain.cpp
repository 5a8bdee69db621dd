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
#include <numbers>

#include "oracles.hpp"
#include "zeno/chain.hpp"

using namespace zeno;

namespace {

constexpr double kBeta = 0.0314159;

ChainSpec chain(int n, int lam, bool phase = false) {
  return ChainSpec{.sites = n, .alpha = kBeta, .beta = kBeta, .subspace = lam,
                   .include_field_phase = phase};
}

}  // namespace

TEST_CASE("hamiltonian: N=3 hopping matrix") {
  ComplexMatrix expected(3, 3);
  expected << 0, kBeta, 0, kBeta, 0, kBeta, 0, kBeta, 0;
  CHECK(max_abs(hamiltonian(chain(3, 1)) - expected) == 0.0);

  const ComplexMatrix reduced =
      oracle::project_single_excitation(oracle::full_hamiltonian(3, 0.0, kBeta), 3);
  CHECK(max_abs(hamiltonian(chain(3, 1)) - reduced) <= 1e-12);
}

TEST_CASE("hamiltonian: two-site chain has eigenvalues +-beta") {
  const ComplexMatrix reduced =
      oracle::project_single_excitation(oracle::full_hamiltonian(2, 0.0, kBeta), 2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(reduced);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-kBeta));
  CHECK(es.eigenvalues()(1) == doctest::Approx(kBeta));
  const auto eig = hermitian_eig(hamiltonian(chain(2, 1)));
  CHECK(eig.eigenvalues(0) == doctest::Approx(-kBeta));
  CHECK(eig.eigenvalues(1) == doctest::Approx(kBeta));
}

TEST_CASE("hamiltonian: sector reduction matches the full tensor-product chain, N=3..6") {
  for (int n = 3; n <= 6; ++n) {
    const ComplexMatrix full = oracle::full_hamiltonian(n, kBeta, kBeta);
    CHECK(max_abs(hamiltonian(chain(n, 1, true)) -
                  oracle::project_single_excitation(full, n)) <= 1e-12);
    if (n >= 3) {
      for (int lam = 1; lam + 2 <= n; ++lam) {
        const ComplexMatrix fc = oracle::full_pair_coupling(n, lam + 1);
        CHECK(max_abs(coupling_hamiltonian(chain(n, lam)) -
                      oracle::project_single_excitation(fc, n)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("hamiltonian: full-space evolution stays in the single-excitation sector") {
  const int n = 5;
  const ComplexMatrix full = oracle::full_hamiltonian(n, kBeta, kBeta);
  StateVector psi = StateVector::Zero(Eigen::Index(1) << n);
  psi(oracle::excitation_index(n, 1)) = 1.0;
  const StateVector evolved = oracle::reference_propagator(full, 137.0) * psi;
  double sector = 0.0;
  for (int i = 1; i <= n; ++i) sector += std::norm(evolved(oracle::excitation_index(n, i)));
  CHECK(sector == doctest::Approx(1.0).epsilon(1e-12));

  // And the reduced evolution reproduces the sector amplitudes.
  const StateVector reduced = propagator(hamiltonian(chain(n, 1, true)), 137.0) * site_state(n, 1);
  for (int i = 1; i <= n; ++i) {
    CHECK(std::abs(reduced(i - 1) - evolved(oracle::excitation_index(n, i))) <= 1e-10);
  }
}

TEST_CASE("hamiltonian: hermitian, tridiagonal, field phase is a global phase") {
  const ComplexMatrix h = hamiltonian(chain(12, 5, true));
  CHECK(is_hermitian(h));
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      if (std::abs(i - j) > 1) CHECK(h(i, j) == Complex(0.0));
  CHECK(h(0, 0).real() == doctest::Approx(kBeta * (2.0 - 12.0)));

  const StateVector psi0 = w_state(12, 5);
  const StateVector a = propagator(hamiltonian(chain(12, 5, true)), 321.0) * psi0;
  const StateVector b = propagator(hamiltonian(chain(12, 5, false)), 321.0) * psi0;
  CHECK((a.cwiseAbs2() - b.cwiseAbs2()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("projector") {
  ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK(max_abs(projector(chain(3, 1)) - expected) == 0.0);

  const ComplexMatrix p = projector(chain(12, 9));
  CHECK(p.trace().real() == 9.0);
  CHECK(max_abs(p * p - p) == 0.0);
  CHECK(max_abs(p.adjoint() - p) == 0.0);
}

TEST_CASE("zeno_hamiltonian") {
  CHECK(zeno_hamiltonian(chain(5, 1)).size() == 1);
  CHECK(zeno_hamiltonian(chain(5, 1))(0, 0) == Complex(0.0));

  ComplexMatrix two(2, 2);
  two << 0, kBeta, kBeta, 0;
  CHECK(max_abs(zeno_hamiltonian(chain(6, 2)) - two) <= 1e-14);

  for (int lam = 1; lam <= 10; ++lam) {
    const ChainSpec spec = chain(12, lam);
    const ComplexMatrix pi = projector(spec);
    const ComplexMatrix h = hamiltonian(spec);
    const ComplexMatrix block = (pi * h * pi).topLeftCorner(lam, lam);
    CHECK(max_abs(block - zeno_hamiltonian(spec)) <= 1e-14);
    if (lam >= 2) CHECK(max_abs(block - hamiltonian(chain(lam, 1))) <= 1e-14);
  }
}

TEST_CASE("coupling_hamiltonian") {
  const ComplexMatrix hc = coupling_hamiltonian(chain(4, 1));
  // 1-based sites 2 and 3.
  CHECK(hc(1, 2) == Complex(2.0));
  CHECK(hc(2, 1) == Complex(2.0));
  CHECK(std::abs(hc.cwiseAbs().sum() - 4.0) == 0.0);

  const ComplexMatrix pi = projector(chain(4, 1));
  CHECK(max_abs(hc * pi - pi * hc) == 0.0);

  try {
    coupling_hamiltonian(chain(4, 3));
    FAIL("expected SubspaceTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSubspaceTooLarge);
  }
}

TEST_CASE("coupling_hamiltonian: exp(-i Hc s) on the lambda+1, lambda+2 block") {
  const ChainSpec spec = chain(6, 2);
  const ComplexMatrix hc = coupling_hamiltonian(spec);
  StateVector psi = StateVector::Zero(6);
  psi(2) = std::sqrt(0.8);  // site lambda+1
  psi(3) = std::sqrt(0.2);  // site lambda+2

  // Entries 2 make s = pi/4 the full exchange.
  const StateVector swapped = propagator(hc, std::numbers::pi / 4) * psi;
  CHECK(std::norm(swapped(2)) == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(std::norm(swapped(3)) == doctest::Approx(0.8).epsilon(1e-10));

  // s = pi/2 is a 2 pi rotation: -1 on the block, populations unchanged.
  const ComplexMatrix kick = propagator(hc, std::numbers::pi / 2);
  CHECK(std::abs(kick(2, 2) + 1.0) <= 1e-12);
  CHECK(std::abs(kick(3, 3) + 1.0) <= 1e-12);
  CHECK(std::abs(kick(0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(kick(2, 3)) <= 1e-12);
}

TEST_CASE("validate") {
  CHECK_NOTHROW(validate(chain(12, 10)));
  CHECK_THROWS_AS(validate(chain(12, 11)), Error);
  CHECK_THROWS_AS(validate(chain(2, 1)), Error);
  ChainSpec bad = chain(5, 1);
  bad.beta = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_THROWS_AS(hamiltonian(bad), Error);
  CHECK_NOTHROW(validate_model(chain(5, 5)));
}

TEST_CASE("initial states") {
  const StateVector w = w_state(12, 4);
  CHECK(w.norm() == doctest::Approx(1.0));
  CHECK(std::norm(w(3)) == doctest::Approx(0.25));
  CHECK(std::abs(w(4)) == 0.0);
  CHECK(site_state(12, 1)(0) == Complex(1.0));
  CHECK_THROWS_AS(site_state(12, 13), Error);
}
