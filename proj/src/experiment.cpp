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

#include "qrc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace qrc {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
T field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void check_keys(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown config field '" + where + key + "'");
  }
}

json shots_to_json(const ShotModel& shots) {
  if (shots.is_infinite()) return "infinite";
  return shots.shots();
}

ShotModel shots_from_json(const json& value) {
  if (value.is_string()) {
    require(value.get<std::string>() == "infinite", "shots must be a count or \"infinite\"");
    return ShotModel::infinite();
  }
  require(value.is_number_integer() && value.get<std::int64_t>() >= 1,
          "shots must be a positive integer or \"infinite\"");
  return ShotModel::finite(value.get<std::uint64_t>());
}

json nullable(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

json nullable(const std::optional<double>& value) {
  return value ? nullable(*value) : json(nullptr);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_nullable(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return std::stod(text);
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string optional_field(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string{};
}

}  // namespace

std::vector<double> GammaGridSpec::values() const {
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
    grid[k] = std::pow(10.0, min_exponent + t * (max_exponent - min_exponent));
  }
  return grid;
}

void validate(const ExperimentConfig& c) {
  require(c.n_qubits >= 1 && c.n_qubits <= 4, "n_qubits must be in [1, 4]");
  require(c.coupling_strength > 0.0 && std::isfinite(c.coupling_strength),
          "coupling_strength must be > 0");
  require(c.gamma_grid.points >= 1, "gamma_grid.points must be >= 1");
  require(std::isfinite(c.gamma_grid.min_exponent) && std::isfinite(c.gamma_grid.max_exponent) &&
              c.gamma_grid.min_exponent <= c.gamma_grid.max_exponent,
          "gamma_grid exponents must be finite with min <= max");
  require(c.ensemble_size >= 1, "ensemble_size must be >= 1");
  require(c.multiplexing >= 1, "multiplexing must be >= 1");
  require(c.train_len >= 2 && c.test_len >= 2, "train_len and test_len must be >= 2");
  require(!c.degrees.empty(), "degrees must not be empty");
  for (int d : c.degrees) require(d >= 1 && d <= kMaxDegree, "degrees must lie in [1, 3]");
  require(c.threshold_repetitions >= 1, "threshold_repetitions must be >= 1");
  require(!c.s_grid.empty(), "s_grid must not be empty");
  for (double s : c.s_grid) require(s >= 0.0 && s <= 1.0, "s_grid values must lie in [0, 1]");
  require(!c.output_dir.empty(), "output_dir must not be empty");

  require(c.timetrace.substeps >= 1, "timetrace.substeps must be >= 1");
  require(!c.timetrace.gammas.empty(), "timetrace.gammas must not be empty");
  for (double g : c.timetrace.gammas) require(g > 0.0, "timetrace.gammas must be > 0");
  require(c.timetrace.reservoir < c.ensemble_size, "timetrace.reservoir out of range");

  require(!c.spectrum.gammas.empty(), "spectrum.gammas must not be empty");
  for (double g : c.spectrum.gammas) require(g > 0.0, "spectrum.gammas must be > 0");
  require(c.spectrum.signal >= 0.0 && c.spectrum.signal <= 1.0, "spectrum.signal must lie in [0, 1]");
  require(c.spectrum.points >= 2, "spectrum.points must be >= 2");
  require(c.spectrum.reservoir < c.ensemble_size, "spectrum.reservoir out of range");
}

json to_json(const ExperimentConfig& c) {
  return json{
      {"n_qubits", c.n_qubits},
      {"topology", to_string(c.topology)},
      {"coupling_strength", c.coupling_strength},
      {"gamma_grid",
       {{"min_exponent", c.gamma_grid.min_exponent},
        {"max_exponent", c.gamma_grid.max_exponent},
        {"points", c.gamma_grid.points}}},
      {"ensemble_size", c.ensemble_size},
      {"multiplexing", c.multiplexing},
      {"shots", shots_to_json(c.shots)},
      {"train_len", c.train_len},
      {"test_len", c.test_len},
      {"degrees", c.degrees},
      {"delay_cap", c.delay_cap},
      {"threshold_repetitions", c.threshold_repetitions},
      {"s_grid", c.s_grid},
      {"root_seed", c.root_seed},
      {"output_dir", c.output_dir},
      {"timetrace",
       {{"zero_before", c.timetrace.zero_before},
        {"input_steps", c.timetrace.input_steps},
        {"zero_after", c.timetrace.zero_after},
        {"gammas", c.timetrace.gammas},
        {"substeps", c.timetrace.substeps},
        {"reservoir", c.timetrace.reservoir}}},
      {"spectrum",
       {{"gammas", c.spectrum.gammas},
        {"signal", c.spectrum.signal},
        {"points", c.spectrum.points},
        {"reservoir", c.spectrum.reservoir}}},
  };
}

ExperimentConfig config_from_json(const json& doc) {
  check_keys(doc,
             {"n_qubits", "topology", "coupling_strength", "gamma_grid", "ensemble_size",
              "multiplexing", "shots", "train_len", "test_len", "degrees", "delay_cap",
              "threshold_repetitions", "s_grid", "root_seed", "output_dir", "timetrace",
              "spectrum"},
             "");
  ExperimentConfig c;
  if (doc.contains("n_qubits")) c.n_qubits = field<std::size_t>(doc, "n_qubits");
  if (doc.contains("topology")) {
    try {
      c.topology = topology_from_string(field<std::string>(doc, "topology"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("coupling_strength")) c.coupling_strength = field<double>(doc, "coupling_strength");
  if (doc.contains("gamma_grid")) {
    const json& g = doc["gamma_grid"];
    check_keys(g, {"min_exponent", "max_exponent", "points"}, "gamma_grid.");
    if (g.contains("min_exponent")) c.gamma_grid.min_exponent = field<double>(g, "min_exponent");
    if (g.contains("max_exponent")) c.gamma_grid.max_exponent = field<double>(g, "max_exponent");
    if (g.contains("points")) c.gamma_grid.points = field<std::size_t>(g, "points");
  }
  if (doc.contains("ensemble_size")) c.ensemble_size = field<std::size_t>(doc, "ensemble_size");
  if (doc.contains("multiplexing")) c.multiplexing = field<std::size_t>(doc, "multiplexing");
  if (doc.contains("shots")) c.shots = shots_from_json(doc["shots"]);
  if (doc.contains("train_len")) c.train_len = field<std::size_t>(doc, "train_len");
  if (doc.contains("test_len")) c.test_len = field<std::size_t>(doc, "test_len");
  if (doc.contains("degrees")) c.degrees = field<std::vector<int>>(doc, "degrees");
  if (doc.contains("delay_cap")) c.delay_cap = field<std::size_t>(doc, "delay_cap");
  if (doc.contains("threshold_repetitions")) {
    c.threshold_repetitions = field<std::size_t>(doc, "threshold_repetitions");
  }
  if (doc.contains("s_grid")) c.s_grid = field<std::vector<double>>(doc, "s_grid");
  if (doc.contains("root_seed")) c.root_seed = field<std::uint64_t>(doc, "root_seed");
  if (doc.contains("output_dir")) c.output_dir = field<std::string>(doc, "output_dir");
  if (doc.contains("timetrace")) {
    const json& t = doc["timetrace"];
    check_keys(t, {"zero_before", "input_steps", "zero_after", "gammas", "substeps", "reservoir"},
               "timetrace.");
    if (t.contains("zero_before")) c.timetrace.zero_before = field<std::size_t>(t, "zero_before");
    if (t.contains("input_steps")) c.timetrace.input_steps = field<std::size_t>(t, "input_steps");
    if (t.contains("zero_after")) c.timetrace.zero_after = field<std::size_t>(t, "zero_after");
    if (t.contains("gammas")) c.timetrace.gammas = field<std::vector<double>>(t, "gammas");
    if (t.contains("substeps")) c.timetrace.substeps = field<std::size_t>(t, "substeps");
    if (t.contains("reservoir")) c.timetrace.reservoir = field<std::size_t>(t, "reservoir");
  }
  if (doc.contains("spectrum")) {
    const json& s = doc["spectrum"];
    check_keys(s, {"gammas", "signal", "points", "reservoir"}, "spectrum.");
    if (s.contains("gammas")) c.spectrum.gammas = field<std::vector<double>>(s, "gammas");
    if (s.contains("signal")) c.spectrum.signal = field<double>(s, "signal");
    if (s.contains("points")) c.spectrum.points = field<std::size_t>(s, "points");
    if (s.contains("reservoir")) c.spectrum.reservoir = field<std::size_t>(s, "reservoir");
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

std::string config_hash(const ExperimentConfig& config) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(config).dump())));
  return buffer;
}

StmcConfig stmc_config(const ExperimentConfig& c) {
  StmcConfig s;
  s.multiplexing = c.multiplexing;
  s.shots = c.shots;
  s.train_len = c.train_len;
  s.test_len = c.test_len;
  s.degrees = c.degrees;
  s.delay_cap = c.delay_cap;
  s.threshold_repetitions = c.threshold_repetitions;
  s.root_seed = c.root_seed;
  return s;
}

std::uint64_t reservoir_seed(const ExperimentConfig& config, std::size_t reservoir) {
  return derive_seed(config.root_seed, reservoir, "network");
}

QubitNetworkSpec sample_reservoir(const ExperimentConfig& config, std::size_t reservoir,
                                  double gamma) {
  return sample_network(config.n_qubits, config.coupling_strength, gamma, config.topology,
                        reservoir_seed(config, reservoir));
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) task(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  pool.clear();  // joins
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

std::size_t workers_from_environment(std::size_t fallback) {
  if (const char* env = std::getenv("QRC_WORKERS")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value >= 1) return static_cast<std::size_t>(value);
  }
  return fallback;
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  validate(config);
  SweepResult result;
  result.config = config;
  result.config_hash = config_hash(config);
  result.gamma_grid = config.gamma_grid.values();
  if (options.reservoirs.empty()) {
    result.reservoir_indices.resize(config.ensemble_size);
    std::iota(result.reservoir_indices.begin(), result.reservoir_indices.end(), std::size_t{0});
  } else {
    result.reservoir_indices = options.reservoirs;
    for (std::size_t r : options.reservoirs) {
      require(r < config.ensemble_size, "reservoir index out of range");
    }
  }
  const std::size_t n_res = result.reservoir_indices.size();
  const std::size_t n_gamma = result.gamma_grid.size();

  std::vector<QubitNetworkSpec> ensemble;
  for (std::size_t r : result.reservoir_indices) {
    result.reservoir_seeds.push_back(reservoir_seed(config, r));
    ensemble.push_back(sample_reservoir(config, r, 1.0));
  }

  const std::size_t cells = n_res * n_gamma;
  if (options.memory) {
    result.stmc.resize(cells);
    const StmcConfig stmc = stmc_config(config);
    parallel_for(cells, options.workers, [&](std::size_t i) {
      const std::size_t m = i / n_gamma;
      const std::size_t r = result.reservoir_indices[m];
      const std::size_t g = i % n_gamma;
      const double gamma = result.gamma_grid[g];
      result.stmc[i] = {r, g, gamma, stmc_cell(ensemble[m].with_gamma(gamma), r, g, stmc)};
    });
  }
  if (options.absorption) {
    result.absorption.resize(cells);
    parallel_for(cells, options.workers, [&](std::size_t i) {
      const std::size_t m = i / n_gamma;
      const std::size_t g = i % n_gamma;
      AbsorptionRow row{result.reservoir_indices[m], g, result.gamma_grid[g], {}, std::nullopt,
                        std::nullopt};
      const QubitNetworkSpec spec = ensemble[m].with_gamma(row.gamma);
      double sum = 0.0;
      bool complete = true;
      for (double s : config.s_grid) {
        try {
          const double a = resonant_absorption(spec, s);
          row.alpha0.emplace_back(a);
          sum += a;
        } catch (const std::exception& e) {
          row.alpha0.emplace_back(std::nullopt);
          row.error = e.what();
          complete = false;
        }
      }
      if (complete) row.mean = sum / static_cast<double>(config.s_grid.size());
      result.absorption[i] = std::move(row);
    });
  }
  if (options.memory && options.absorption) {
    for (int degree : config.degrees) {
      try {
        const double rho = correlate_curves(result, degree);
        result.spearman[degree] = std::isfinite(rho) ? std::optional<double>(rho) : std::nullopt;
      } catch (const std::invalid_argument&) {
        result.spearman[degree] = std::nullopt;
      }
    }
  }
  return result;
}

std::vector<double> mean_capacity(const SweepResult& result, int degree) {
  const std::size_t n_gamma = result.gamma_grid.size();
  std::vector<double> sum(n_gamma, 0.0);
  std::vector<std::size_t> count(n_gamma, 0);
  for (const StmcRow& row : result.stmc) {
    if (row.cell.error) continue;
    for (const DegreeCapacity& d : row.cell.degrees) {
      if (d.degree != degree) continue;
      sum[row.gamma_index] += d.total;
      ++count[row.gamma_index];
    }
  }
  std::vector<double> mean(n_gamma, kNaN);
  for (std::size_t g = 0; g < n_gamma; ++g) {
    if (count[g] > 0) mean[g] = sum[g] / static_cast<double>(count[g]);
  }
  return mean;
}

namespace {

template <typename Pick>
std::vector<double> mean_over_absorption(const SweepResult& result, Pick pick) {
  const std::size_t n_gamma = result.gamma_grid.size();
  std::vector<double> sum(n_gamma, 0.0);
  std::vector<std::size_t> count(n_gamma, 0);
  for (const AbsorptionRow& row : result.absorption) {
    const std::optional<double> value = pick(row);
    if (!value) continue;
    sum[row.gamma_index] += *value;
    ++count[row.gamma_index];
  }
  std::vector<double> mean(n_gamma, kNaN);
  for (std::size_t g = 0; g < n_gamma; ++g) {
    if (count[g] > 0) mean[g] = sum[g] / static_cast<double>(count[g]);
  }
  return mean;
}

}  // namespace

std::vector<double> mean_absorption(const SweepResult& result) {
  return mean_over_absorption(result, [](const AbsorptionRow& row) { return row.mean; });
}

std::vector<double> mean_resonant_absorption(const SweepResult& result, std::size_t s_index) {
  return mean_over_absorption(result, [s_index](const AbsorptionRow& row) {
    return s_index < row.alpha0.size() ? row.alpha0[s_index] : std::nullopt;
  });
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  if (a.size() < 3) throw std::invalid_argument("spearman: need at least three points");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    RealVector r(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double average = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r(static_cast<Eigen::Index>(order[k])) = average;
      i = j + 1;
    }
    return r;
  };
  const RealVector ra = ranks(a);
  const RealVector rb = ranks(b);
  const RealVector ca = ra.array() - ra.mean();
  const RealVector cb = rb.array() - rb.mean();
  const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  return denom > 0.0 ? ca.dot(cb) / denom : kNaN;
}

double correlate_curves(const SweepResult& result, int degree) {
  const std::vector<double> capacity = mean_capacity(result, degree);
  const std::vector<double> absorption = mean_absorption(result);
  std::vector<double> a, b;
  for (std::size_t g = 0; g < capacity.size() && g < absorption.size(); ++g) {
    if (std::isfinite(capacity[g]) && std::isfinite(absorption[g])) {
      a.push_back(capacity[g]);
      b.push_back(absorption[g]);
    }
  }
  if (a.size() < 3) {
    throw std::invalid_argument("correlate_curves: fewer than three shared grid points");
  }
  return spearman(a, b);
}

Timetrace run_timetrace(const QubitNetworkSpec& spec, const TimetraceConfig& protocol,
                        std::uint64_t input_seed) {
  InputSequence inputs;
  inputs.seed = input_seed;
  inputs.values.assign(protocol.zero_before, 0.0);
  if (protocol.input_steps > 0) {
    const InputSequence drive = generate_inputs(protocol.input_steps, input_seed);
    inputs.values.insert(inputs.values.end(), drive.values.begin(), drive.values.end());
  }
  inputs.values.insert(inputs.values.end(), protocol.zero_after, 0.0);

  Timetrace trace;
  trace.gammas = protocol.gammas;
  trace.substeps = protocol.substeps;
  trace.protocol = protocol;
  const std::size_t v = protocol.substeps;
  trace.times.push_back(0.0);
  trace.inputs.push_back(0.0);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t j = 0; j < v; ++j) {
      trace.times.push_back(static_cast<double>(k) +
                            static_cast<double>(j + 1) / static_cast<double>(v));
      trace.inputs.push_back(inputs.values[k]);
    }
  }

  for (double gamma : protocol.gammas) {
    const ReservoirSimulator simulator(spec.with_gamma(gamma), v);
    Rng unused(0);
    const StateCollectMatrix x = simulator.run(inputs, ShotModel::infinite(), unused);
    const ComplexMatrix z0 = embed({Pauli::Z, 0}, spec.n_qubits);
    std::vector<double> series;
    series.reserve(trace.times.size());
    series.push_back(expectation(simulator.rest_state(), z0));
    for (Eigen::Index k = 0; k < x.rows(); ++k) {
      for (std::size_t j = 0; j < v; ++j) {
        series.push_back(x.values(k, static_cast<Eigen::Index>(j * spec.n_qubits)));
      }
    }
    trace.first_z.push_back(std::move(series));
  }
  return trace;
}

void write_timetrace_csv(const Timetrace& trace, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  out << "t,input";
  for (double g : trace.gammas) out << ",sz1_gamma_" << format_double(g);
  out << '\n';
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << format_double(trace.times[i]) << ',' << format_double(trace.inputs[i]);
    for (const auto& series : trace.first_z) out << ',' << format_double(series[i]);
    out << '\n';
  }
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

json summary_json(const SweepResult& result) {
  json spearman_json = json::object();
  for (const auto& [degree, value] : result.spearman) {
    spearman_json[std::to_string(degree)] = nullable(value);
  }
  json capacity_means = json::object();
  if (!result.stmc.empty()) {
    for (int degree : result.config.degrees) {
      json series = json::array();
      for (double v : mean_capacity(result, degree)) series.push_back(nullable(v));
      capacity_means[std::to_string(degree)] = series;
    }
  }
  json absorption_means = json::array();
  if (!result.absorption.empty()) {
    for (double v : mean_absorption(result)) absorption_means.push_back(nullable(v));
  }
  std::size_t errors = 0;
  for (const auto& row : result.stmc) errors += row.cell.error ? 1 : 0;
  for (const auto& row : result.absorption) errors += row.error ? 1 : 0;

  return json{
      {"schema_version", 1},
      {"code_version", kCodeVersion},
      {"generated_at", utc_timestamp()},
      {"config", to_json(result.config)},
      {"config_hash", result.config_hash},
      {"seeds",
       {{"root_seed", result.config.root_seed},
        {"reservoir_indices", result.reservoir_indices},
        {"reservoirs", result.reservoir_seeds}}},
      {"gamma_grid", result.gamma_grid},
      {"spearman", spearman_json},
      {"ensemble_mean", {{"capacity", capacity_means}, {"absorption", absorption_means}}},
      {"cell_errors", errors},
  };
}

void emit(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out = open_for_writing(dir / "stmc.csv");
    out << "reservoir,gamma,degree,total_capacity,threshold,tau_max\n";
    for (const StmcRow& row : result.stmc) {
      for (int degree : result.config.degrees) {
        out << row.reservoir << ',' << format_double(row.gamma) << ',' << degree << ',';
        const auto it = std::find_if(row.cell.degrees.begin(), row.cell.degrees.end(),
                                     [&](const DegreeCapacity& d) { return d.degree == degree; });
        if (row.cell.error || it == row.cell.degrees.end()) {
          out << ",,\n";
        } else {
          out << format_double(it->total) << ',' << format_double(it->threshold) << ','
              << it->tau_max << '\n';
        }
      }
    }
  }
  {
    std::ofstream out = open_for_writing(dir / "absorption.csv");
    out << "reservoir,gamma,s,alpha0\n";
    for (const AbsorptionRow& row : result.absorption) {
      for (std::size_t k = 0; k < result.config.s_grid.size(); ++k) {
        const std::optional<double> a = k < row.alpha0.size() ? row.alpha0[k] : std::nullopt;
        out << row.reservoir << ',' << format_double(row.gamma) << ','
            << format_double(result.config.s_grid[k]) << ',' << optional_field(a) << '\n';
      }
      out << row.reservoir << ',' << format_double(row.gamma) << ",mean," << optional_field(row.mean)
          << '\n';
    }
  }
  {
    std::ofstream out = open_for_writing(dir / "summary.json");
    out << summary_json(result).dump(2) << '\n';
  }
}

SweepResult load_result(const std::filesystem::path& dir) {
  SweepResult result;
  std::set<double> gammas;
  std::set<int> degrees;
  std::vector<double> s_values;

  struct StmcLine {
    std::size_t reservoir;
    double gamma;
    int degree;
    std::optional<double> total, threshold, tau_max;
  };
  struct AbsLine {
    std::size_t reservoir;
    double gamma;
    std::optional<double> s;  // nullopt for the mean row
    std::optional<double> alpha;
  };
  std::vector<StmcLine> stmc_lines;
  std::vector<AbsLine> abs_lines;

  auto read_lines = [&](const std::filesystem::path& path, const std::string& header,
                        const std::function<void(const std::vector<std::string>&)>& handle) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    if (!std::getline(in, line) || line != header) {
      throw std::runtime_error(path.string() + ": unexpected header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      handle(split_csv_line(line));
    }
  };

  read_lines(dir / "stmc.csv", "reservoir,gamma,degree,total_capacity,threshold,tau_max",
             [&](const std::vector<std::string>& c) {
               if (c.size() != 6) throw std::runtime_error("stmc.csv: malformed row");
               StmcLine l{std::stoul(c[0]), std::stod(c[1]), std::stoi(c[2]),
                          parse_nullable(c[3]), parse_nullable(c[4]), parse_nullable(c[5])};
               gammas.insert(l.gamma);
               degrees.insert(l.degree);
               stmc_lines.push_back(l);
             });
  read_lines(dir / "absorption.csv", "reservoir,gamma,s,alpha0",
             [&](const std::vector<std::string>& c) {
               if (c.size() != 4) throw std::runtime_error("absorption.csv: malformed row");
               AbsLine l{std::stoul(c[0]), std::stod(c[1]),
                         c[2] == "mean" ? std::nullopt : std::optional<double>(std::stod(c[2])),
                         parse_nullable(c[3])};
               gammas.insert(l.gamma);
               if (l.s && std::find(s_values.begin(), s_values.end(), *l.s) == s_values.end()) {
                 s_values.push_back(*l.s);
               }
               abs_lines.push_back(l);
             });

  result.gamma_grid.assign(gammas.begin(), gammas.end());
  result.config.degrees.assign(degrees.begin(), degrees.end());
  if (!s_values.empty()) result.config.s_grid = s_values;
  auto gamma_index = [&](double g) {
    return static_cast<std::size_t>(
        std::lower_bound(result.gamma_grid.begin(), result.gamma_grid.end(), g) -
        result.gamma_grid.begin());
  };

  std::map<std::pair<std::size_t, std::size_t>, StmcRow> stmc_rows;
  for (const StmcLine& l : stmc_lines) {
    const std::size_t g = gamma_index(l.gamma);
    StmcRow& row = stmc_rows[{l.reservoir, g}];
    row.reservoir = l.reservoir;
    row.gamma_index = g;
    row.gamma = l.gamma;
    row.cell.gamma = l.gamma;
    if (!l.total) {
      row.cell.error = "missing";
      continue;
    }
    DegreeCapacity d;
    d.degree = l.degree;
    d.total = *l.total;
    d.threshold = l.threshold.value_or(kNaN);
    d.tau_max = static_cast<std::size_t>(l.tau_max.value_or(0.0));
    row.cell.degrees.push_back(d);
  }
  for (auto& [_, row] : stmc_rows) result.stmc.push_back(std::move(row));

  std::map<std::pair<std::size_t, std::size_t>, AbsorptionRow> abs_rows;
  for (const AbsLine& l : abs_lines) {
    const std::size_t g = gamma_index(l.gamma);
    AbsorptionRow& row = abs_rows[{l.reservoir, g}];
    row.reservoir = l.reservoir;
    row.gamma_index = g;
    row.gamma = l.gamma;
    if (l.s) {
      row.alpha0.push_back(l.alpha);
    } else {
      row.mean = l.alpha;
    }
  }
  for (auto& [_, row] : abs_rows) result.absorption.push_back(std::move(row));

  if (!result.stmc.empty() && !result.absorption.empty()) {
    for (int degree : result.config.degrees) {
      try {
        const double rho = correlate_curves(result, degree);
        result.spearman[degree] = std::isfinite(rho) ? std::optional<double>(rho) : std::nullopt;
      } catch (const std::invalid_argument&) {
        result.spearman[degree] = std::nullopt;
      }
    }
  }
  return result;
}

}  // namespace qrc
