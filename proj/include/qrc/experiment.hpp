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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrc/absorption.hpp"
#include "qrc/memory_capacity.hpp"

namespace qrc {

inline constexpr const char* kCodeVersion = "0.1.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Log-spaced decay rates 10^min_exponent ... 10^max_exponent.
struct GammaGridSpec {
  double min_exponent = -3.0;
  double max_exponent = 3.0;
  std::size_t points = 25;

  [[nodiscard]] std::vector<double> values() const;
};

/// Zero / random / zero input protocol for a single reservoir.
struct TimetraceConfig {
  std::size_t zero_before = 5;
  std::size_t input_steps = 10;
  std::size_t zero_after = 10;
  std::vector<double> gammas = {0.01, 1.0, 100.0};
  std::size_t substeps = 20;
  std::size_t reservoir = 0;
};

struct SpectrumConfig {
  std::vector<double> gammas = {0.01, 1.0, 100.0};
  double signal = 1.0;
  std::size_t points = 801;
  std::size_t reservoir = 0;
};

struct ExperimentConfig {
  std::size_t n_qubits = 3;
  Topology topology = Topology::AllToAll;
  double coupling_strength = 0.5;
  GammaGridSpec gamma_grid;
  std::size_t ensemble_size = 15;
  std::size_t multiplexing = 4;
  ShotModel shots = ShotModel::finite(1'000'000);
  std::size_t train_len = 1000;
  std::size_t test_len = 1000;
  std::vector<int> degrees = {1, 2, 3};
  std::size_t delay_cap = 50;
  std::size_t threshold_repetitions = 500;
  std::vector<double> s_grid = default_signal_grid();
  std::uint64_t root_seed = 20240601;
  std::string output_dir = "results";
  TimetraceConfig timetrace;
  SpectrumConfig spectrum;
};

/// Throws ConfigError on the first violated constraint.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 16 hex digits, stable for equal configurations.
std::string config_hash(const ExperimentConfig& config);

StmcConfig stmc_config(const ExperimentConfig& config);

std::uint64_t reservoir_seed(const ExperimentConfig& config, std::size_t reservoir);
QubitNetworkSpec sample_reservoir(const ExperimentConfig& config, std::size_t reservoir,
                                  double gamma);

/// Runs `task(i)` for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

/// Worker count from the QRC_WORKERS environment variable, else `fallback`.
std::size_t workers_from_environment(std::size_t fallback);

struct StmcRow {
  std::size_t reservoir = 0;
  std::size_t gamma_index = 0;
  double gamma = 0.0;
  StmcCell cell;
};

struct AbsorptionRow {
  std::size_t reservoir = 0;
  std::size_t gamma_index = 0;
  double gamma = 0.0;
  std::vector<std::optional<double>> alpha0;  // parallel to s_grid
  std::optional<double> mean;
  std::optional<std::string> error;
};

struct SweepResult {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<std::size_t> reservoir_indices;
  std::vector<std::uint64_t> reservoir_seeds;  // parallel to reservoir_indices
  std::vector<double> gamma_grid;
  std::vector<StmcRow> stmc;              // ordered by (reservoir, gamma_index)
  std::vector<AbsorptionRow> absorption;  // ordered by (reservoir, gamma_index)
  std::map<int, std::optional<double>> spearman;
};

struct SweepOptions {
  bool memory = true;
  bool absorption = true;
  std::size_t workers = 1;
  std::vector<std::size_t> reservoirs;  // subset of the ensemble; empty means all
};

SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

/// Ensemble means over reservoirs on the gamma grid; NaN where every cell
/// failed.
std::vector<double> mean_capacity(const SweepResult& result, int degree);
std::vector<double> mean_absorption(const SweepResult& result);
std::vector<double> mean_resonant_absorption(const SweepResult& result, std::size_t s_index);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Rank correlation of the ensemble-mean degree-`degree` capacity and the
/// mean absorption across the gamma grid.
double correlate_curves(const SweepResult& result, int degree);

struct Timetrace {
  std::vector<double> gammas;
  std::vector<double> times;
  std::vector<double> inputs;                // drive active during each sample's step
  std::vector<std::vector<double>> first_z;  // per gamma, <Z_0>(t)
  std::size_t substeps = 1;
  TimetraceConfig protocol;
};

Timetrace run_timetrace(const QubitNetworkSpec& spec, const TimetraceConfig& protocol,
                        std::uint64_t input_seed);

void write_timetrace_csv(const Timetrace& trace, const std::filesystem::path& path);

/// Writes stmc.csv, absorption.csv and summary.json into `dir`.
void emit(const SweepResult& result, const std::filesystem::path& dir);

nlohmann::json summary_json(const SweepResult& result);

/// Reads stmc.csv and absorption.csv back (for correlate).
SweepResult load_result(const std::filesystem::path& dir);

/// 17 significant digits; parses back to the identical double.
std::string format_double(double value);

}  // namespace qrc
