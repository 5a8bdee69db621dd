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

// zeno_lab: command-line front end for the experiment harness.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zeno/csv.hpp"
#include "zeno/harness.hpp"

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> realizations;
  bool reproducible = false;
  unsigned threads = 0;
};

zeno::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw zeno::Error(zeno::ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return zeno::parse_config(text.str());
}

void apply_globals(const GlobalFlags& flags, zeno::ExperimentConfig& cfg) {
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out_dir) cfg.output_path = *flags.out_dir;
  if (flags.realizations) cfg.realizations = *flags.realizations;
  zeno::validate(cfg);
}

zeno::RunOptions options(const GlobalFlags& flags) {
  zeno::RunOptions o;
  o.reproducible = flags.reproducible;
  o.threads = flags.threads;
  return o;
}

void report(const zeno::ExperimentResult& result) {
  for (const auto& row : result.rows) {
    std::printf("lambda=%d %s  F=%.6f  P=%.6g  <ln P>=%.6g  P*=%.6g  kappa=%.4g\n", row.lambda,
                std::string(zeno::short_name(row.protocol)).c_str(), row.fidelity, row.p_final,
                row.ensemble.mean_log, row.pstar_theory, row.kappa);
  }
  for (const auto& f : result.files) {
    if (f.filename() == "summary.csv" || f.filename() == "theory.csv" ||
        f.filename() == "scaling.csv") {
      std::printf("wrote %s\n", f.string().c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic quantum Zeno dynamics on an XY spin chain"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t realizations = 0;
  auto* o_seed = app.add_option("--seed", seed, "Master seed for interval sampling");
  auto* o_out = app.add_option("--out-dir", out_dir, "Directory for CSV output");
  auto* o_real = app.add_option("--realizations", realizations, "Number of realizations R")
                     ->check(CLI::PositiveNumber);
  app.add_flag("--reproducible", flags.reproducible, "Omit the timestamp header line");
  app.add_option("--threads", flags.threads, "Worker threads (0: ZENO_LAB_THREADS or hardware)");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Run the protocols of a config file");
  simulate->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  std::string theory_config;
  auto* theory = app.add_subcommand("theory", "Write theory.csv for a config file");
  theory->add_option("config", theory_config, "Config file")->required()->check(CLI::ExistingFile);

  std::string compare_config;
  auto* compare = app.add_subcommand("compare", "Run p.m., p.c. and c.c. on the same intervals");
  compare->add_option("config", compare_config, "Config file")->required()->check(CLI::ExistingFile);

  std::string figure_name;
  auto* figure = app.add_subcommand("figure", "Reproduce a figure preset");
  figure->add_option("name", figure_name, "fig2, fig3, fig4 or fig5")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5"}));

  double omega = 1.0;
  std::vector<double> couplings{0.0, 1.0, 10.0};
  double t_max = 200.0;
  double dt = 0.05;
  auto* three = app.add_subcommand("three-level", "Closed form against propagation");
  three->add_option("--omega", omega, "Drive omega (rad/us)")->capture_default_str();
  three->add_option("--g", couplings, "Coupling values g (rad/us)")->delimiter(',')
      ->capture_default_str();
  three->add_option("--t-max", t_max, "End time (us)")->capture_default_str();
  three->add_option("--dt", dt, "Time step (us)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (o_seed->count()) flags.seed = seed;
  if (o_out->count()) flags.out_dir = out_dir;
  if (o_real->count()) flags.realizations = realizations;

  try {
    if (simulate->parsed()) {
      auto cfg = load_config(config_path);
      apply_globals(flags, cfg);
      report(zeno::run_experiment(cfg, options(flags)));
    } else if (theory->parsed()) {
      auto cfg = load_config(theory_config);
      apply_globals(flags, cfg);
      report(zeno::run_theory(cfg, options(flags)));
    } else if (compare->parsed()) {
      auto cfg = load_config(compare_config);
      cfg.protocols = {zeno::ProtocolKind::kProjectiveMeasurement,
                       zeno::ProtocolKind::kPulsedCoupling,
                       zeno::ProtocolKind::kContinuousCoupling};
      apply_globals(flags, cfg);
      report(zeno::run_experiment(cfg, options(flags)));
    } else if (figure->parsed()) {
      auto cfg = zeno::preset(figure_name);
      apply_globals(flags, cfg);
      report(zeno::run_figure(figure_name, cfg, options(flags)));
    } else if (three->parsed()) {
      const std::filesystem::path dir = flags.out_dir.value_or(".");
      std::filesystem::create_directories(dir);
      for (const double g : couplings) {
        const auto path = dir / ("three_level_g" + zeno::csv::num(g) + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw zeno::Error(zeno::ErrorCode::kIoError, "cannot open " + path.string());
        zeno::run_three_level(out, omega, g, t_max, dt);
        std::printf("g=%s  max|formula - numeric| = %.3g  wrote %s\n", zeno::csv::num(g).c_str(),
                    zeno::three_level_max_error(omega, g, t_max, dt), path.string().c_str());
      }
    }
  } catch (const zeno::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
