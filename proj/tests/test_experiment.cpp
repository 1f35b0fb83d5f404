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

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qrc/experiment.hpp"

using namespace qrc;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_qubits = 2;
  c.ensemble_size = 2;
  c.gamma_grid = {-1.0, 1.0, 3};
  c.train_len = 200;
  c.test_len = 200;
  c.delay_cap = 10;
  c.threshold_repetitions = 20;
  c.s_grid = {0.5, 1.0};
  c.root_seed = 5;
  return c;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qrc-test-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("gamma grid") {
  const auto grid = GammaGridSpec{-3.0, 3.0, 25}.values();
  REQUIRE(grid.size() == 25);
  CHECK(grid.front() == doctest::Approx(1e-3));
  CHECK(grid.back() == doctest::Approx(1e3));
  CHECK(grid[12] == doctest::Approx(1.0));
  CHECK(GammaGridSpec{0.5, 0.5, 1}.values() == std::vector<double>{std::pow(10.0, 0.5)});
}

TEST_CASE("config json round-trip and validation") {
  const ExperimentConfig c = small_config();
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));

  ExperimentConfig infinite = c;
  infinite.shots = ShotModel::infinite();
  CHECK(to_json(infinite)["shots"] == "infinite");
  CHECK(config_from_json(to_json(infinite)).shots.is_infinite());

  CHECK(config_from_json(nlohmann::json::object()).ensemble_size == 15);
  CHECK_THROWS_AS(config_from_json({{"unknown", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"gamma_grid", {{"pts", 3}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"ensemble_size", 0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"degrees", {1, 4}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"shots", 0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"shots", "lots"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"topology", "star"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"n_qubits", "three"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"s_grid", {1.5}}}), ConfigError);
}

TEST_CASE("config hash tracks every field") {
  const ExperimentConfig c = small_config();
  const std::string h = config_hash(c);
  CHECK(h.size() == 16);
  const nlohmann::json base = to_json(c);
  for (const auto& [key, value] : base.items()) {
    nlohmann::json changed = base;
    if (value.is_number_integer()) {
      changed[key] = value.get<std::int64_t>() + 1;
    } else if (value.is_number()) {
      changed[key] = value.get<double>() * 0.5;
    } else if (value.is_string() && key == "topology") {
      changed[key] = "ring";
    } else if (value.is_string() && key == "shots") {
      changed[key] = 7;
    } else if (value.is_string()) {
      changed[key] = value.get<std::string>() + "x";
    } else if (value.is_array()) {
      changed[key] = nlohmann::json::array({value.front()});
      if (changed[key] == value) changed[key].push_back(value.front());
    } else if (value.is_object()) {
      const auto first = value.begin();
      changed[key][first.key()] =
          first->is_number_integer() ? nlohmann::json(first->get<std::int64_t>() + 1) : nlohmann::json(0.123);
    }
    if (key == "shots" && value.is_number()) changed[key] = "infinite";
    INFO("field " << key);
    ExperimentConfig other;
    try {
      other = config_from_json(changed);
    } catch (const ConfigError&) {
      continue;  // the mutation produced an invalid config
    }
    CHECK(config_hash(other) != h);
  }
}

TEST_CASE("spearman") {
  const std::vector<double> a = {0.1, 0.5, 0.2, 0.9, 0.7};
  CHECK(spearman(a, a) == doctest::Approx(1.0));
  std::vector<double> reversed(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) reversed[k] = -a[k];
  CHECK(spearman(a, reversed) == doctest::Approx(-1.0));
  // Monotone transforms keep the rank correlation.
  std::vector<double> cubed;
  for (double x : a) cubed.push_back(x * x * x + 3.0);
  CHECK(spearman(a, cubed) == doctest::Approx(1.0));
  // Ties use average ranks: ranks (1, 2.5, 2.5, 4) vs (1, 2, 3, 4).
  CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(0.9486832980505138));
  CHECK(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
  CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(spearman({1, 2, 3}, {1, 2}), std::invalid_argument);
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  std::atomic<int> count{0};
  parallel_for(0, 4, [&](std::size_t) { ++count; });
  CHECK(count == 0);
}

TEST_CASE("worker count from the environment") {
  ::unsetenv("QRC_WORKERS");
  CHECK(workers_from_environment(3) == 3);
  ::setenv("QRC_WORKERS", "5", 1);
  CHECK(workers_from_environment(3) == 5);
  ::setenv("QRC_WORKERS", "zero", 1);
  CHECK(workers_from_environment(3) == 3);
  ::unsetenv("QRC_WORKERS");
}

TEST_CASE("one reservoir, one decay rate") {
  ExperimentConfig c = small_config();
  c.ensemble_size = 1;
  c.gamma_grid = {0.0, 0.0, 1};
  const SweepResult r = run_sweep(c);
  REQUIRE(r.stmc.size() == 1);
  REQUIRE(r.absorption.size() == 1);
  CHECK(r.absorption[0].alpha0.size() == c.s_grid.size());
  CHECK(r.absorption[0].mean.has_value());
  CHECK_FALSE(r.stmc[0].cell.error);
  CHECK(r.stmc[0].cell.degrees.size() == 3);
  // Fewer than three grid points: no correlation.
  CHECK_FALSE(r.spearman.at(1).has_value());
}

TEST_CASE("sweep output is independent of the worker count") {
  const ExperimentConfig c = small_config();
  const fs::path one = scratch("w1");
  const fs::path three = scratch("w3");
  const SweepResult r1 = run_sweep(c, {true, true, 1, {}});
  const SweepResult r3 = run_sweep(c, {true, true, 3, {}});
  emit(r1, one);
  emit(r3, three);
  CHECK(slurp(one / "stmc.csv") == slurp(three / "stmc.csv"));
  CHECK(slurp(one / "absorption.csv") == slurp(three / "absorption.csv"));
  nlohmann::json s1 = nlohmann::json::parse(slurp(one / "summary.json"));
  nlohmann::json s3 = nlohmann::json::parse(slurp(three / "summary.json"));
  s1.erase("generated_at");
  s3.erase("generated_at");
  CHECK(s1 == s3);

  SUBCASE("every grid cell appears once per degree") {
    std::ifstream in(one / "stmc.csv");
    std::string line;
    std::getline(in, line);
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
      std::size_t cut = 0;
      for (int field = 0; field < 3; ++field) cut = line.find(',', cut) + 1;
      seen[line.substr(0, cut)]++;  // reservoir,gamma,degree,
    }
    CHECK(seen.size() == c.ensemble_size * 3 * c.degrees.size());
    for (const auto& [_, n] : seen) CHECK(n == 1);
  }
  SUBCASE("emitted CSV parses back to identical values") {
    const SweepResult back = load_result(one);
    REQUIRE(back.stmc.size() == r1.stmc.size());
    for (std::size_t i = 0; i < back.stmc.size(); ++i) {
      for (std::size_t d = 0; d < back.stmc[i].cell.degrees.size(); ++d) {
        CHECK(back.stmc[i].cell.degrees[d].total == r1.stmc[i].cell.degrees[d].total);
        CHECK(back.stmc[i].cell.degrees[d].threshold == r1.stmc[i].cell.degrees[d].threshold);
        CHECK(back.stmc[i].cell.degrees[d].tau_max == r1.stmc[i].cell.degrees[d].tau_max);
      }
      CHECK(back.stmc[i].gamma == r1.stmc[i].gamma);
    }
    REQUIRE(back.absorption.size() == r1.absorption.size());
    for (std::size_t i = 0; i < back.absorption.size(); ++i) {
      CHECK(back.absorption[i].alpha0 == r1.absorption[i].alpha0);
      CHECK(back.absorption[i].mean == r1.absorption[i].mean);
    }
    CHECK(back.gamma_grid == r1.gamma_grid);
    for (int degree : c.degrees) CHECK(back.spearman.at(degree) == r1.spearman.at(degree));
  }
}

TEST_CASE("emit of an empty result writes headers only") {
  SweepResult empty;
  empty.config = small_config();
  const fs::path dir = scratch("empty");
  emit(empty, dir);
  CHECK(slurp(dir / "stmc.csv") == "reservoir,gamma,degree,total_capacity,threshold,tau_max\n");
  CHECK(slurp(dir / "absorption.csv") == "reservoir,gamma,s,alpha0\n");
  CHECK(fs::exists(dir / "summary.json"));
}

TEST_CASE("format_double is lossless") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5e-7, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(1234567.0) == "1234567");
}

TEST_CASE("correlate_curves") {
  SweepResult r;
  r.config = small_config();
  r.config.degrees = {1};
  r.gamma_grid = {0.1, 1.0, 10.0, 100.0};
  const std::vector<double> cap = {0.1, 2.0, 1.0, 0.05};
  const std::vector<double> absn = {0.2, 0.9, 0.5, 0.01};
  for (std::size_t g = 0; g < 4; ++g) {
    StmcRow row{0, g, r.gamma_grid[g], {}};
    row.cell.degrees.push_back({1, cap[g], 0.01, 1, {}});
    r.stmc.push_back(row);
    r.absorption.push_back({0, g, r.gamma_grid[g], {absn[g]}, absn[g], std::nullopt});
  }
  CHECK(correlate_curves(r, 1) == doctest::Approx(1.0));
  for (auto& row : r.absorption) row.mean = -*row.mean;
  CHECK(correlate_curves(r, 1) == doctest::Approx(-1.0));
  r.absorption[0].mean.reset();
  r.absorption[1].mean.reset();
  CHECK_THROWS_AS(correlate_curves(r, 1), std::invalid_argument);
}

TEST_CASE("timetrace protocol") {
  const auto spec = sample_network(3, 0.5, 1.0, Topology::AllToAll, 11);
  TimetraceConfig protocol;
  const Timetrace trace = run_timetrace(spec, protocol, 77);
  const std::size_t per_step = protocol.substeps;
  const std::size_t total_steps = protocol.zero_before + protocol.input_steps + protocol.zero_after;
  REQUIRE(trace.times.size() == total_steps * per_step + 1);
  REQUIRE(trace.first_z.size() == 3);

  const auto excursion = [&](const std::vector<double>& z) {
    double worst = 0.0;
    for (std::size_t i = protocol.zero_before * per_step + 1;
         i <= (protocol.zero_before + protocol.input_steps) * per_step; ++i) {
      worst = std::max(worst, std::abs(z[i] + 1.0));
    }
    return worst;
  };
  for (const auto& z : trace.first_z) {
    for (std::size_t i = 0; i <= protocol.zero_before * per_step; ++i) CHECK(std::abs(z[i] - z[0]) < 1e-9);
  }
  CHECK(excursion(trace.first_z[2]) < excursion(trace.first_z[1]));

  TimetraceConfig silent = protocol;
  silent.input_steps = 0;
  const Timetrace flat = run_timetrace(spec, silent, 77);
  for (const auto& z : flat.first_z) {
    for (double v : z) CHECK(std::abs(v + 1.0) < 1e-12);
  }

  const fs::path dir = scratch("trace");
  fs::create_directories(dir);
  write_timetrace_csv(trace, dir / "timetrace.csv");
  std::ifstream in(dir / "timetrace.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,input,sz1_gamma_0.01,sz1_gamma_1,sz1_gamma_100");
}

TEST_CASE("sweeps record failing cells instead of aborting") {
  ExperimentConfig c = small_config();
  c.ensemble_size = 1;
  c.gamma_grid = {0.0, 0.0, 1};
  c.train_len = 2;  // too short for any delay: readout still runs
  c.test_len = 2;
  const SweepResult r = run_sweep(c);
  REQUIRE(r.stmc.size() == 1);
  const fs::path dir = scratch("fail");
  CHECK_NOTHROW(emit(r, dir));
}
