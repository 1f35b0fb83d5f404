// Copyright 2026 The qrc-absorb Authors
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

// qrc-absorb: command-line front end for the sweep harness.
//
// Exit codes: 0 success, 1 fatal error, 2 invalid configuration or usage.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qrc/experiment.hpp"

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory (overrides output_dir)");
  cmd->add_option("--workers", opts.workers, "worker threads (else $QRC_WORKERS, else all cores)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "root seed (overrides root_seed)");
  cmd->add_option("--set", opts.overrides, "override a config field, e.g. --set gamma_grid.points=15");
}

// Applies "a.b.c=value"; the value is parsed as JSON, falling back to a string.
void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw qrc::ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::stringstream keys(path);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) parts.push_back(key);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& child = (*node)[parts[i]];
    if (child.is_null()) child = json::object();
    node = &child;
  }
  (*node)[parts.back()] = value;
}

qrc::ExperimentConfig resolve_config(const CommonOptions& opts) {
  json doc = json::object();
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw qrc::ConfigError(opts.config_path + " is not valid JSON");
  }
  for (const auto& o : opts.overrides) apply_override(doc, o);
  if (opts.seed) doc["root_seed"] = *opts.seed;
  if (!opts.out_dir.empty()) doc["output_dir"] = opts.out_dir;
  return qrc::config_from_json(doc);
}

std::size_t resolve_workers(const CommonOptions& opts) {
  if (opts.workers) return *opts.workers;
  return qrc::workers_from_environment(std::max(1U, std::thread::hardware_concurrency()));
}

void report(const qrc::SweepResult& result, const std::string& dir) {
  std::cout << "wrote " << dir << " (config " << result.config_hash << ")\n";
  for (const auto& [degree, rho] : result.spearman) {
    std::cout << "spearman degree " << degree << ": "
              << (rho ? qrc::format_double(*rho) : std::string("null")) << '\n';
  }
}

int run_sweep_command(const CommonOptions& opts, bool memory, bool absorption) {
  const qrc::ExperimentConfig config = resolve_config(opts);
  const qrc::SweepResult result =
      qrc::run_sweep(config, {memory, absorption, resolve_workers(opts)});
  qrc::emit(result, config.output_dir);
  report(result, config.output_dir);
  return 0;
}

int run_simulate(const CommonOptions& opts, std::size_t reservoir, double gamma) {
  qrc::ExperimentConfig config = resolve_config(opts);
  if (!(gamma > 0.0)) throw qrc::ConfigError("--gamma must be > 0");
  if (reservoir >= config.ensemble_size) {
    throw qrc::ConfigError("--reservoir must be below ensemble_size");
  }
  config.gamma_grid = {std::log10(gamma), std::log10(gamma), 1};
  qrc::SweepOptions options{true, true, resolve_workers(opts), {reservoir}};
  const qrc::SweepResult result = qrc::run_sweep(config, options);
  qrc::emit(result, config.output_dir);
  report(result, config.output_dir);
  return 0;
}

int run_timetrace_command(const CommonOptions& opts) {
  const qrc::ExperimentConfig config = resolve_config(opts);
  const qrc::QubitNetworkSpec spec = qrc::sample_reservoir(config, config.timetrace.reservoir, 1.0);
  const std::uint64_t input_seed =
      qrc::derive_seed(config.root_seed, config.timetrace.reservoir, "timetrace-inputs");
  const qrc::Timetrace trace = qrc::run_timetrace(spec, config.timetrace, input_seed);
  std::filesystem::create_directories(config.output_dir);
  const auto path = std::filesystem::path(config.output_dir) / "timetrace.csv";
  qrc::write_timetrace_csv(trace, path);
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int run_spectrum_command(const CommonOptions& opts) {
  const qrc::ExperimentConfig config = resolve_config(opts);
  std::filesystem::create_directories(config.output_dir);
  const auto path = std::filesystem::path(config.output_dir) / "spectrum.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "gamma,s,omega,alpha\n";
  for (double gamma : config.spectrum.gammas) {
    const qrc::QubitNetworkSpec spec =
        qrc::sample_reservoir(config, config.spectrum.reservoir, gamma);
    const auto omega = qrc::default_omega_grid(spec, config.spectrum.points);
    const auto spectrum = qrc::spectrum_resolvent(spec, config.spectrum.signal, omega);
    for (std::size_t k = 0; k < omega.size(); ++k) {
      out << qrc::format_double(gamma) << ',' << qrc::format_double(config.spectrum.signal) << ','
          << qrc::format_double(omega[k]) << ',' << qrc::format_double(spectrum.alpha[k]) << '\n';
    }
  }
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int run_correlate(const CommonOptions& opts, const std::string& input_dir) {
  const std::string dir = !input_dir.empty() ? input_dir
                          : !opts.out_dir.empty() ? opts.out_dir
                                                  : resolve_config(opts).output_dir;
  const qrc::SweepResult result = qrc::load_result(dir);
  if (result.stmc.empty() || result.absorption.empty()) {
    throw std::runtime_error(dir + " needs both stmc.csv and absorption.csv");
  }
  json out = json::object();
  for (const auto& [degree, rho] : result.spearman) {
    out[std::to_string(degree)] = rho ? json(*rho) : json(nullptr);
    std::cout << "spearman degree " << degree << ": "
              << (rho ? qrc::format_double(*rho) : std::string("null")) << '\n';
  }
  std::ofstream(std::filesystem::path(dir) / "correlation.json") << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory capacity and optical absorption of dissipative qubit reservoirs"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::size_t reservoir = 0;
  double gamma = 1.0;
  std::string input_dir;

  auto* simulate = app.add_subcommand("simulate", "one reservoir at one decay rate");
  add_common(simulate, opts);
  simulate->add_option("--reservoir", reservoir, "ensemble index");
  simulate->add_option("--gamma", gamma, "decay rate");

  auto* stmc = app.add_subcommand("stmc-sweep", "memory capacities over the gamma grid");
  add_common(stmc, opts);
  auto* absorption = app.add_subcommand("absorption-sweep", "resonant absorption over the gamma grid");
  add_common(absorption, opts);
  auto* full = app.add_subcommand("full-sweep", "both sweeps plus their rank correlation");
  add_common(full, opts);
  auto* timetrace = app.add_subcommand("timetrace", "first-qubit <Z> under a zero/input/zero drive");
  add_common(timetrace, opts);
  auto* spectrum = app.add_subcommand("spectrum", "full absorption spectra for selected decay rates");
  add_common(spectrum, opts);
  auto* correlate = app.add_subcommand("correlate", "rank correlation from emitted sweep files");
  add_common(correlate, opts);
  correlate->add_option("--in", input_dir, "directory holding stmc.csv and absorption.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(opts, reservoir, gamma);
    if (stmc->parsed()) return run_sweep_command(opts, true, false);
    if (absorption->parsed()) return run_sweep_command(opts, false, true);
    if (full->parsed()) return run_sweep_command(opts, true, true);
    if (timetrace->parsed()) return run_timetrace_command(opts);
    if (spectrum->parsed()) return run_spectrum_command(opts);
    if (correlate->parsed()) return run_correlate(opts, input_dir);
  } catch (const qrc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
