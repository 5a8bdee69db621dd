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

#include "zeno/stochastics.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "zeno/error.hpp"

namespace zeno {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

IntervalDistribution::IntervalDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error(ErrorCode::kInvalidDistribution, "no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!(a.mu > 0.0) || !std::isfinite(a.mu)) {
      throw Error(ErrorCode::kInvalidDistribution, "atom mu must be positive and finite");
    }
    if (!(a.prob > 0.0) || a.prob > 1.0) {
      throw Error(ErrorCode::kInvalidDistribution, "atom probability must lie in (0, 1]");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (atoms_[j].mu == a.mu) throw Error(ErrorCode::kInvalidDistribution, "duplicate atom");
    }
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidDistribution, "probabilities sum to " + std::to_string(total));
  }
}

IntervalDistribution IntervalDistribution::deterministic(double mu) {
  return IntervalDistribution({{mu, 1.0}});
}

IntervalDistribution IntervalDistribution::bimodal(double p1, double mu1, double mu2) {
  if (mu1 == mu2 || p1 == 1.0) return deterministic(mu1);
  if (p1 == 0.0) return deterministic(mu2);
  return IntervalDistribution({{mu1, p1}, {mu2, 1.0 - p1}});
}

Moments moments(const IntervalDistribution& d) {
  Moments out;
  for (const Atom& a : d.atoms()) {
    out.mean += a.prob * a.mu;
    out.third_raw += a.prob * a.mu * a.mu * a.mu;
  }
  for (const Atom& a : d.atoms()) {
    const double dev = a.mu - out.mean;
    out.variance += a.prob * dev * dev;
  }
  out.kappa = out.variance / (out.mean * out.mean);
  return out;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededSampler::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double SeededSampler::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * kGolden);
}

std::vector<double> sample_intervals(const IntervalDistribution& d, SeededSampler& sampler,
                                     std::size_t count) {
  const auto& atoms = d.atoms();
  std::vector<double> out;
  out.reserve(count);
  if (atoms.size() == 1) {
    out.assign(count, atoms.front().mu);
    return out;
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double u = sampler.uniform();
    double acc = 0.0;
    double pick = atoms.back().mu;
    for (const Atom& a : atoms) {
      acc += a.prob;
      if (u < acc) {
        pick = a.mu;
        break;
      }
    }
    out.push_back(pick);
  }
  return out;
}

double weak_zeno_margin(const IntervalDistribution& d, std::size_t m, double remainder_bound) {
  return static_cast<double>(m) * remainder_bound * moments(d).third_raw;
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) {
      throw Error(ErrorCode::kParseError, std::string("expected '") + c + "' at offset " +
                                              std::to_string(pos) + " in distribution literal");
    }
  }
  double number() {
    skip_ws();
    const std::string rest(text.substr(pos));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) {
      throw Error(ErrorCode::kParseError,
                  "expected number at offset " + std::to_string(pos) + " in distribution literal");
    }
    pos += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }
};

}  // namespace

IntervalDistribution parse_distribution(std::string_view text) {
  Cursor cur{text};
  std::vector<Atom> atoms;
  cur.expect('[');
  if (!cur.eat(']')) {
    do {
      cur.expect('(');
      Atom a;
      a.mu = cur.number();
      cur.expect(',');
      a.prob = cur.number();
      cur.expect(')');
      atoms.push_back(a);
    } while (cur.eat(','));
    cur.expect(']');
  }
  cur.skip_ws();
  if (cur.pos != text.size()) {
    throw Error(ErrorCode::kParseError, "trailing characters after distribution literal");
  }
  return IntervalDistribution(std::move(atoms));
}

std::string format_distribution(const IntervalDistribution& d) {
  std::string out = "[";
  char buf[64];
  for (std::size_t i = 0; i < d.atoms().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s(%.15g, %.15g)", i ? ", " : "", d.atoms()[i].mu,
                  d.atoms()[i].prob);
    out += buf;
  }
  return out + "]";
}

}  // namespace zeno
