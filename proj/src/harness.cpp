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

#include "zeno/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "zeno/csv.hpp"

namespace zeno {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Initial states and distribution families.

StateVector build_initial_state(const InitialState& init, int sites, int subspace) {
  switch (init.kind) {
    case InitialStateKind::kWState:
      return w_state(sites, subspace);
    case InitialStateKind::kLeftmostExcited:
      return site_state(sites, 1);
    case InitialStateKind::kCustom: {
      const auto k = static_cast<int>(init.amplitudes.size());
      if (k == 0 || k > sites) {
        throw Error(ErrorCode::kValidationError, "custom state needs 1..N amplitudes");
      }
      StateVector psi = StateVector::Zero(sites);
      for (int i = 0; i < k; ++i) psi(i) = init.amplitudes[static_cast<std::size_t>(i)];
      const double norm = psi.norm();
      if (norm == 0.0) throw Error(ErrorCode::kValidationError, "custom state is zero");
      psi /= norm;
      if (psi.tail(sites - subspace).norm() > tolerance::kNormalized) {
        throw Error(ErrorCode::kInitialStateOutsideSubspace,
                    "custom state has support beyond site " + std::to_string(subspace));
      }
      return psi;
    }
  }
  throw Error(ErrorCode::kValidationError, "unknown initial state");
}

IntervalDistribution KappaPoint::distribution() const {
  if (mu1 == mu2 || p1 == 1.0) return IntervalDistribution::deterministic(mu1);
  return IntervalDistribution::bimodal(p1, mu1, mu2);
}

std::vector<int> ExperimentConfig::lambdas() const {
  return lambda_sweep.empty() ? std::vector<int>{chain.subspace} : lambda_sweep;
}

std::vector<ProtocolKind> ExperimentConfig::kinds() const {
  return protocols.empty() ? std::vector<ProtocolKind>{protocol.kind} : protocols;
}

std::vector<IntervalDistribution> ExperimentConfig::distributions() const {
  if (kappa_sweep.empty()) return {protocol.distribution};
  std::vector<IntervalDistribution> out;
  for (const auto& k : kappa_sweep) out.push_back(k.distribution());
  return out;
}

// ---------------------------------------------------------------------------
// Config parsing.

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    parse_fail(line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

long long to_integer(std::string_view s, std::size_t line) {
  s = trim(s);
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    parse_fail(line, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::size_t to_count(std::string_view s, std::size_t line) {
  const long long v = to_integer(s, line);
  if (v < 0) parse_fail(line, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool to_bool(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  parse_fail(line, "expected true or false, got '" + std::string(s) + "'");
}

ProtocolKind to_kind(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s == "pm" || s == "projective") return ProtocolKind::kProjectiveMeasurement;
  if (s == "pc" || s == "pulsed") return ProtocolKind::kPulsedCoupling;
  if (s == "cc" || s == "continuous") return ProtocolKind::kContinuousCoupling;
  parse_fail(line, "unknown protocol '" + std::string(s) + "'");
}

/// Top-level items of "[a, (b, c), d]", split at depth-one commas.
std::vector<std::string_view> list_items(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    parse_fail(line, "expected a bracketed list");
  }
  s = trim(s.substr(1, s.size() - 2));
  std::vector<std::string_view> out;
  if (s.empty()) return out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth < 0) parse_fail(line, "unbalanced parentheses");
    if (s[i] == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) parse_fail(line, "unbalanced parentheses");
  out.push_back(trim(s.substr(start)));
  for (auto item : out) {
    if (item.empty()) parse_fail(line, "empty list item");
  }
  return out;
}

std::vector<double> tuple_numbers(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') parse_fail(line, "expected a tuple");
  s = s.substr(1, s.size() - 2);
  std::vector<double> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(to_double(s.substr(start, i - start), line));
      start = i + 1;
    }
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

using Section = std::map<std::string, Entry, std::less<>>;

void apply_chain(const Section& sec, ChainSpec& chain) {
  for (const auto& [key, e] : sec) {
    if (key == "sites") {
      chain.sites = static_cast<int>(to_integer(e.value, e.line));
    } else if (key == "subspace") {
      chain.subspace = static_cast<int>(to_integer(e.value, e.line));
    } else if (key == "alpha") {
      chain.alpha = to_double(e.value, e.line);
    } else if (key == "beta") {
      chain.beta = to_double(e.value, e.line);
    } else if (key == "include_field_phase") {
      chain.include_field_phase = to_bool(e.value, e.line);
    } else {
      parse_fail(e.line, "unknown key '" + key + "' in [chain]");
    }
  }
}

void apply_protocol(const Section& sec, ProtocolConfig& p) {
  for (const auto& [key, e] : sec) {
    if (key == "kind") {
      p.kind = to_kind(e.value, e.line);
    } else if (key == "steps") {
      p.steps = to_count(e.value, e.line);
    } else if (key == "distribution") {
      try {
        p.distribution = parse_distribution(e.value);
      } catch (const Error& err) {
        parse_fail(e.line, err.what());
      }
    } else if (key == "pulse_area") {
      p.pulse_area = to_double(e.value, e.line);
    } else if (key == "coupling") {
      p.coupling = to_double(e.value, e.line);
    } else if (key == "measurement") {
      const auto v = trim(e.value);
      if (v == "post_selected") {
        p.measurement = MeasurementMode::kPostSelected;
      } else if (v == "bernoulli") {
        p.measurement = MeasurementMode::kBernoulli;
      } else {
        parse_fail(e.line, "measurement must be post_selected or bernoulli");
      }
    } else if (key == "record_states") {
      p.record_states = to_bool(e.value, e.line);
    } else {
      parse_fail(e.line, "unknown key '" + key + "' in [protocol]");
    }
  }
}

void apply_experiment(const Section& sec, ExperimentConfig& cfg) {
  for (const auto& [key, e] : sec) {
    const auto v = trim(e.value);
    if (key == "initial_state") {
      if (v == "w_state" || v == "w") {
        cfg.initial_state.kind = InitialStateKind::kWState;
      } else if (v == "leftmost") {
        cfg.initial_state.kind = InitialStateKind::kLeftmostExcited;
      } else if (v == "custom") {
        cfg.initial_state.kind = InitialStateKind::kCustom;
      } else {
        parse_fail(e.line, "initial_state must be w_state, leftmost or custom");
      }
    } else if (key == "amplitudes") {
      cfg.initial_state.amplitudes.clear();
      for (auto item : list_items(v, e.line)) {
        if (item.front() == '(') {
          const auto xs = tuple_numbers(item, e.line);
          if (xs.size() != 2) parse_fail(e.line, "complex amplitude needs (re, im)");
          cfg.initial_state.amplitudes.emplace_back(xs[0], xs[1]);
        } else {
          cfg.initial_state.amplitudes.emplace_back(to_double(item, e.line), 0.0);
        }
      }
    } else if (key == "realizations") {
      cfg.realizations = to_count(v, e.line);
    } else if (key == "seed") {
      const long long s = to_integer(v, e.line);
      if (s < 0) parse_fail(e.line, "seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "output") {
      cfg.output_path = std::string(v);
    } else if (key == "lambda_sweep") {
      cfg.lambda_sweep.clear();
      for (auto item : list_items(v, e.line)) {
        cfg.lambda_sweep.push_back(static_cast<int>(to_integer(item, e.line)));
      }
    } else if (key == "kappa_sweep") {
      cfg.kappa_sweep.clear();
      for (auto item : list_items(v, e.line)) {
        const auto xs = tuple_numbers(item, e.line);
        if (xs.size() != 3) parse_fail(e.line, "kappa_sweep items are (p1, mu1, mu2)");
        cfg.kappa_sweep.push_back({xs[0], xs[1], xs[2]});
      }
    } else if (key == "protocols") {
      cfg.protocols.clear();
      for (auto item : list_items(v, e.line)) cfg.protocols.push_back(to_kind(item, e.line));
    } else if (key == "trajectories") {
      if (v == "all") {
        cfg.trajectories = TrajectoryOutput::kAll;
      } else if (v == "first") {
        cfg.trajectories = TrajectoryOutput::kFirst;
      } else if (v == "none") {
        cfg.trajectories = TrajectoryOutput::kNone;
      } else {
        parse_fail(e.line, "trajectories must be all, first or none");
      }
    } else {
      parse_fail(e.line, "unknown key '" + key + "' in [experiment]");
    }
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Section, std::less<>> sections;
  std::string current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(line_no, "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current != "chain" && current != "protocol" && current != "experiment") {
        parse_fail(line_no, "unknown section [" + current + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, "expected key = value");
    if (current.empty()) parse_fail(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) parse_fail(line_no, "empty key");
    if (value.empty()) parse_fail(line_no, "empty value for '" + key + "'");
    auto& sec = sections[current];
    if (const auto it = sec.find(key); it != sec.end()) {
      parse_fail(line_no, "duplicate key '" + key + "' (first set on line " +
                              std::to_string(it->second.line) + ")");
    }
    sec.emplace(key, Entry{value, line_no});
  }

  ExperimentConfig cfg;
  if (auto it = sections.find("chain"); it != sections.end()) apply_chain(it->second, cfg.chain);
  if (auto it = sections.find("protocol"); it != sections.end()) {
    apply_protocol(it->second, cfg.protocol);
  }
  if (auto it = sections.find("experiment"); it != sections.end()) {
    apply_experiment(it->second, cfg);
  }
  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kValidationError, what); };
  const auto kinds = cfg.kinds();
  const bool coherent = std::any_of(kinds.begin(), kinds.end(), [](ProtocolKind k) {
    return k != ProtocolKind::kProjectiveMeasurement;
  });
  for (const int lam : cfg.lambdas()) {
    ChainSpec spec = cfg.chain;
    spec.subspace = lam;
    if (coherent && lam + 2 > spec.sites) {
      fail(std::string(to_string(ErrorCode::kSubspaceTooLarge)) + ": lambda = " +
           std::to_string(lam) + " leaves no room for coupling sites on N = " +
           std::to_string(spec.sites));
    }
    try {
      validate(spec);
      build_initial_state(cfg.initial_state, spec.sites, lam);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (cfg.realizations < 1) fail("realizations must be >= 1");
  if (cfg.protocol.steps < 1) fail("steps must be >= 1");
  try {
    validate(cfg.protocol);
    (void)cfg.distributions();  // builds, and so checks, every kappa point
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!cfg.kappa_sweep.empty()) {
    const double mean = moments(cfg.kappa_sweep.front().distribution()).mean;
    for (const auto& k : cfg.kappa_sweep) {
      if (std::abs(moments(k.distribution()).mean - mean) > 1e-9 * mean) {
        fail("kappa_sweep points must share one mean interval");
      }
    }
  }
  if (cfg.protocol.measurement == MeasurementMode::kBernoulli) {
    for (auto k : kinds) {
      if (k != ProtocolKind::kProjectiveMeasurement) {
        fail("Bernoulli measurement applies to projective runs only");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Running experiments.

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ZENO_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception stops new work and is rethrown after every worker has joined.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(threads, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !stop; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string timestamp_line(std::uint64_t seed) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return "# zeno-lab run " + std::string(buf) + " seed " + std::to_string(seed) + "\n";
}

class OutputFile {
 public:
  OutputFile(const fs::path& path, const RunOptions& options, std::uint64_t seed)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    if (!options.reproducible) out_ << timestamp_line(seed);
  }
  std::ostream& stream() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::kIoError, "failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

ChainSpec with_subspace(const ChainSpec& chain, int lam) {
  ChainSpec spec = chain;
  spec.subspace = lam;
  return spec;
}

double edge_step(const Moments& m) { return m.mean / 20.0; }

struct RealizationResult {
  Trajectory trajectory;
  double fidelity = 0.0;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const unsigned threads = resolve_threads(options.threads);
  const auto lambdas = config.lambdas();
  const auto kinds = config.kinds();
  const auto dists = config.distributions();
  const std::size_t m = config.protocol.steps;
  const std::size_t reps = config.realizations;
  const bool nested = dists.size() * lambdas.size() * kinds.size() > 1;

  ExperimentResult result;
  if (options.write_files) ensure_directory(config.output_path);

  for (std::size_t k = 0; k < dists.size(); ++k) {
    const IntervalDistribution& d = dists[k];
    const Moments mom = moments(d);
    // Interval sequences depend only on (seed, kappa point, realization), so
    // every lambda and protocol sees the same waiting times.
    const std::uint64_t family_seed = derive_seed(config.seed, k);
    std::vector<std::vector<double>> intervals(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      SeededSampler s(derive_seed(family_seed, r));
      intervals[r] = sample_intervals(d, s, m);
    }

    for (const int lam : lambdas) {
      const ChainSpec spec = with_subspace(config.chain, lam);
      const ZenoSystem sys = make_system(spec);
      const StateVector psi0 = build_initial_state(config.initial_state, spec.sites, lam);
      const double t_m = static_cast<double>(m) * mom.mean;
      const auto series = edge_population(spec, psi0, t_m, edge_step(mom));
      const TheoryPrediction theory = pstar_time_averaged(m, d, series, spec.beta);

      for (const ProtocolKind kind : kinds) {
        ProtocolConfig cfg = config.protocol;
        cfg.kind = kind;
        cfg.distribution = d;
        std::vector<RealizationResult> runs(reps);
        parallel_for(reps, threads, [&](std::size_t r) {
          SeededSampler outcomes(derive_seed(derive_seed(family_seed, r), 0));
          Trajectory traj = run_protocol_on(sys, psi0, cfg, intervals[r], &outcomes);
          const std::vector<double> end{traj.final_time()};
          const Trajectory ref = run_exact_subspace(sys, psi0, end);
          runs[r].fidelity = protocol_fidelity(traj, ref);
          runs[r].trajectory = std::move(traj);
        });

        SummaryRow row;
        row.lambda = lam;
        row.protocol = kind;
        row.kappa = mom.kappa;
        row.m = m;
        row.mu_mean = mom.mean;
        row.beta = spec.beta;
        row.pstar_theory = theory.pstar;
        row.edge_average = t_m > 0.0 ? series.integral(t_m) / t_m : series.values().front();
        std::vector<Trajectory> trajs;
        trajs.reserve(reps);
        double f_sum = 0.0;
        double p_sum = 0.0;
        for (auto& run : runs) {
          f_sum += run.fidelity;
          p_sum += run.trajectory.final_survival();
          trajs.push_back(std::move(run.trajectory));
        }
        row.fidelity = f_sum / static_cast<double>(reps);
        row.p_final = p_sum / static_cast<double>(reps);
        row.ensemble = aggregate(trajs, theory);

        if (options.write_files && config.trajectories != TrajectoryOutput::kNone) {
          fs::path dir = config.output_path;
          if (nested) {
            std::string name = "lambda" + std::to_string(lam) + "_" + std::string(short_name(kind));
            if (dists.size() > 1) name += "_kappa" + std::to_string(k);
            dir /= name;
            ensure_directory(dir);
          }
          const std::size_t count = config.trajectories == TrajectoryOutput::kAll ? reps : 1;
          for (std::size_t r = 0; r < count; ++r) {
            const fs::path path = dir / ("trajectory_r" + std::to_string(r) + ".csv");
            OutputFile file(path, options, config.seed);
            write_trajectory_csv(file.stream(), trajs[r]);
            file.close();
            result.files.push_back(path);
          }
        }
        result.rows.push_back(std::move(row));
      }
    }
  }

  if (options.write_files) {
    const fs::path summary = config.output_path / "summary.csv";
    OutputFile s(summary, options, config.seed);
    write_summary_csv(s.stream(), result.rows);
    s.close();
    result.files.push_back(summary);

    const fs::path theory = config.output_path / "theory.csv";
    OutputFile t(theory, options, config.seed);
    write_theory_csv(t.stream(), config);
    t.close();
    result.files.push_back(theory);
  }
  return result;
}

ExperimentResult run_theory(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  ExperimentResult result;
  if (!options.write_files) return result;
  ensure_directory(config.output_path);
  const fs::path theory = config.output_path / "theory.csv";
  OutputFile t(theory, options, config.seed);
  write_theory_csv(t.stream(), config);
  t.close();
  result.files.push_back(theory);
  return result;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "lambda,protocol,F,P_final,pstar_theory,kappa,m,mu_mean,"
        "mean_log_P,std_log_P,mode_log_P,realizations,beta,edge_avg\n";
  for (const auto& r : rows) {
    csv::row(os, {std::to_string(r.lambda), std::string(short_name(r.protocol)),
                  csv::num(r.fidelity), csv::num(r.p_final), csv::num(r.pstar_theory),
                  csv::num(r.kappa), std::to_string(r.m), csv::num(r.mu_mean),
                  csv::num(r.ensemble.mean_log), csv::num(r.ensemble.std_log),
                  csv::num(r.ensemble.mode_log), std::to_string(r.ensemble.realizations),
                  csv::num(r.beta), csv::num(r.edge_average)});
  }
}

void write_theory_csv(std::ostream& os, const ExperimentConfig& config) {
  os << "lambda,kappa,step,t_us,mu_mean,beta,edge_pop,edge_avg,pstar_eq11,pstar_eq12\n";
  const std::size_t m = config.protocol.steps;
  for (const auto& d : config.distributions()) {
    const Moments mom = moments(d);
    for (const int lam : config.lambdas()) {
      const ChainSpec spec = with_subspace(config.chain, lam);
      const StateVector psi0 = build_initial_state(config.initial_state, spec.sites, lam);
      const double t_m = static_cast<double>(m) * mom.mean;
      const auto series = edge_population(spec, psi0, t_m, edge_step(mom));
      // The constant-edge form takes |c_lambda|^2 from the initial state.
      const double c0 = std::norm(psi0(lam - 1));
      const double rate = spec.beta * spec.beta * mom.mean * mom.mean * (1.0 + mom.kappa);
      for (std::size_t j = 0; j <= m; ++j) {
        const double t = static_cast<double>(j) * mom.mean;
        const std::size_t idx = std::min(j * 20, series.values().size() - 1);
        const double avg = j == 0 ? series.values().front() : series.integral(t) / t;
        const double jd = static_cast<double>(j);
        csv::row(os, {std::to_string(lam), csv::num(mom.kappa), std::to_string(j), csv::num(t),
                      csv::num(mom.mean), csv::num(spec.beta), csv::num(series.values()[idx]),
                      csv::num(avg), csv::num(std::exp(-jd * rate * c0)),
                      csv::num(std::exp(-jd * rate * avg))});
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Presets.

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  cfg.chain = ChainSpec{};
  cfg.seed = 1;
  cfg.realizations = 20;
  cfg.trajectories = TrajectoryOutput::kFirst;
  cfg.output_path = std::string(name);
  cfg.protocol.kind = ProtocolKind::kProjectiveMeasurement;
  if (name == "fig2") {
    cfg.initial_state.kind = InitialStateKind::kWState;
    cfg.protocol.distribution = IntervalDistribution({{1.0, 0.5}, {5.0, 0.5}});
    cfg.protocol.steps = 2000;
    cfg.lambda_sweep = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  } else if (name == "fig3") {
    cfg.initial_state.kind = InitialStateKind::kLeftmostExcited;
    cfg.protocol.distribution = IntervalDistribution({{1.0, 0.5}, {5.0, 0.5}});
    cfg.protocol.steps = 2000;
    cfg.lambda_sweep = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  } else if (name == "fig4") {
    cfg.initial_state.kind = InitialStateKind::kWState;
    cfg.protocol.distribution = IntervalDistribution({{3.0, 0.5}, {5.0, 0.5}});
    cfg.protocol.steps = 100;
    cfg.lambda_sweep = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.protocols = {ProtocolKind::kProjectiveMeasurement, ProtocolKind::kPulsedCoupling,
                     ProtocolKind::kContinuousCoupling};
  } else if (name == "fig5") {
    cfg.initial_state.kind = InitialStateKind::kWState;
    cfg.protocol.steps = 200;
    cfg.chain.subspace = 5;
    for (double mu1 = 3.0; mu1 >= 1.0 - 1e-12; mu1 -= 0.25) {
      cfg.kappa_sweep.push_back({0.8, mu1, (3.0 - 0.8 * mu1) / 0.2});
    }
    cfg.protocol.distribution = cfg.kappa_sweep.front().distribution();
    cfg.protocols = {ProtocolKind::kProjectiveMeasurement, ProtocolKind::kPulsedCoupling,
                     ProtocolKind::kContinuousCoupling};
  } else {
    throw Error(ErrorCode::kValidationError,
                "unknown figure '" + std::string(name) + "' (fig2, fig3, fig4, fig5)");
  }
  validate(cfg);
  return cfg;
}

std::vector<ScalingPoint> scaling_sweep(const ChainSpec& spec, const StateVector& psi0,
                                        double total_time, const std::vector<double>& mus) {
  const ZenoSystem sys = make_system(spec);
  std::vector<ScalingPoint> out;
  for (const ProtocolKind kind : {ProtocolKind::kProjectiveMeasurement,
                                  ProtocolKind::kPulsedCoupling,
                                  ProtocolKind::kContinuousCoupling}) {
    for (const double mu : mus) {
      const auto m = static_cast<std::size_t>(std::llround(total_time / mu));
      const std::vector<double> intervals(m, mu);
      ProtocolConfig cfg;
      cfg.kind = kind;
      cfg.steps = m;
      cfg.distribution = IntervalDistribution::deterministic(mu);
      const Trajectory traj = run_protocol_on(sys, psi0, cfg, intervals);
      out.push_back({kind, mu, m, 1.0 - traj.final_survival()});
    }
  }
  return out;
}

double scaling_slope(const std::vector<ScalingPoint>& points, ProtocolKind protocol) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
  for (const auto& p : points) {
    if (p.protocol != protocol) continue;
    if (!(p.leakage > 0.0)) {
      throw Error(ErrorCode::kValidationError, "non-positive leakage in a log-log fit");
    }
    const double x = std::log(p.mu);
    const double y = std::log(p.leakage);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1.0;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2.0 || denom == 0.0) {
    throw Error(ErrorCode::kValidationError, "need two distinct mu values for a slope");
  }
  return (n * sxy - sx * sy) / denom;
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingPoint>& points) {
  os << "protocol,mu_us,m,t_m_us,one_minus_P\n";
  for (const auto& p : points) {
    csv::row(os, {std::string(short_name(p.protocol)), csv::num(p.mu), std::to_string(p.m),
                  csv::num(p.mu * static_cast<double>(p.m)), csv::num(p.leakage)});
  }
}

ExperimentResult run_figure(std::string_view name, const ExperimentConfig& config,
                            const RunOptions& options) {
  ExperimentResult result = run_experiment(config, options);
  auto absorb = [&](ExperimentResult more) {
    for (auto& f : more.files) result.files.push_back(std::move(f));
  };
  if (name == "fig4" && options.write_files) {
    // Zeno-limit inset: lambda = 5, m * mu = 1500 us, mu over one decade.
    const ChainSpec spec = with_subspace(config.chain, 5);
    const StateVector psi0 = build_initial_state(config.initial_state, spec.sites, 5);
    const std::vector<double> mus{0.1, 0.15, 0.2, 0.3, 0.5, 0.6, 0.75, 1.0};
    const auto points = scaling_sweep(spec, psi0, 1500.0, mus);
    const fs::path path = config.output_path / "scaling.csv";
    OutputFile f(path, options, config.seed);
    write_scaling_csv(f.stream(), points);
    f.close();
    result.files.push_back(path);
  } else if (name == "fig5") {
    ExperimentConfig inset = config;
    inset.initial_state.kind = InitialStateKind::kLeftmostExcited;
    inset.output_path = config.output_path / "inset";
    absorb(run_experiment(inset, options));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Three-level model.

namespace {

template <class Visit>
void three_level_grid(double omega, double g, double t_max, double dt, Visit visit) {
  if (!(dt > 0.0) || !(t_max >= 0.0)) {
    throw Error(ErrorCode::kValidationError, "need dt > 0 and t_max >= 0");
  }
  const auto eig = hermitian_eig(three_level_hamiltonian(omega, g));
  // <1| U(t) |1> = sum_k |V(0, k)|^2 exp(-i E_k t)
  const RealVector weights = eig.eigenvectors.row(0).cwiseAbs2().transpose();
  const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    Complex amp = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      amp += weights(i) * std::polar(1.0, -eig.eigenvalues(i) * t);
    }
    visit(t, three_level_survival(omega, g, t), std::norm(amp));
  }
}

}  // namespace

void run_three_level(std::ostream& os, double omega, double g, double t_max, double dt) {
  os << "t,P_formula,P_numeric,abs_diff\n";
  three_level_grid(omega, g, t_max, dt, [&](double t, double formula, double numeric) {
    csv::row(os, {csv::num(t), csv::num(formula), csv::num(numeric),
                  csv::num(std::abs(formula - numeric))});
  });
}

double three_level_max_error(double omega, double g, double t_max, double dt) {
  double worst = 0.0;
  three_level_grid(omega, g, t_max, dt, [&](double, double formula, double numeric) {
    worst = std::max(worst, std::abs(formula - numeric));
  });
  return worst;
}

}  // namespace zeno
