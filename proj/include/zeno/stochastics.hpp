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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace zeno {

struct Atom {
  double mu = 0.0;    // waiting time, us
  double prob = 0.0;
};

/// Discrete waiting-time density p(mu): a finite set of atoms whose
/// probabilities sum to one within 1e-12.
class IntervalDistribution {
 public:
  explicit IntervalDistribution(std::vector<Atom> atoms);

  static IntervalDistribution deterministic(double mu);

  /// Two atoms {(mu1, p1), (mu2, 1 - p1)}; collapses to one atom when mu1 == mu2.
  static IntervalDistribution bimodal(double p1, double mu1, double mu2);

  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::vector<Atom> atoms_;
};

struct Moments {
  double mean = 0.0;       // us
  double variance = 0.0;   // us^2
  double kappa = 0.0;      // variance / mean^2
  double third_raw = 0.0;  // <mu^3>, us^3
};

Moments moments(const IntervalDistribution& d);

/// SplitMix64 stream. Constants:
///   state += 0x9E3779B97F4A7C15
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z ^= z >> 31
/// Uniform doubles use the top 53 bits. Identical seeds give identical
/// streams on every platform.
class SeededSampler {
 public:
  explicit SeededSampler(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Child seed for realization `index`: mix64(seed + (index + 1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

std::vector<double> sample_intervals(const IntervalDistribution& d, SeededSampler& sampler,
                                     std::size_t count);

/// m C <mu^3>; the weak-Zeno skewness condition asks for this to be << 1.
double weak_zeno_margin(const IntervalDistribution& d, std::size_t m, double remainder_bound);

/// Parses `[(1.0, 0.5), (5.0, 0.5)]` (mu in us, probability).
IntervalDistribution parse_distribution(std::string_view text);

std::string format_distribution(const IntervalDistribution& d);

}  // namespace zeno
