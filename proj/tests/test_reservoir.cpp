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

#include <cmath>
#include <numeric>

#include "qrc/reservoir.hpp"

using namespace qrc;

TEST_CASE("topology names round-trip") {
  CHECK(topology_from_string(to_string(Topology::AllToAll)) == Topology::AllToAll);
  CHECK(topology_from_string(to_string(Topology::Ring)) == Topology::Ring);
  CHECK_THROWS_AS(topology_from_string("star"), std::invalid_argument);
}

TEST_CASE("sample_network examples") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto two = sample_network(2, 0.5, 1.0, Topology::AllToAll, seed);
    CHECK(two.coupling(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  }

  const auto ring = sample_network(4, 0.5, 1.0, Topology::Ring, 3);
  int pairs = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) pairs += ring.coupling(i, j) != 0.0 ? 1 : 0;
  }
  CHECK(pairs == 4);

  const auto three = sample_network(3, 0.5, 1.0, Topology::AllToAll, 5);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(three.coupling);
  CHECK(std::abs(es.eigenvalues().cwiseAbs().maxCoeff() - 0.5) < 1e-12);

  const auto one = sample_network(1, 0.5, 1.0, Topology::AllToAll, 5);
  CHECK(one.coupling(0, 0) == 0.0);

  CHECK_THROWS_AS(sample_network(3, 0.0, 1.0, Topology::AllToAll, 1), std::invalid_argument);
}

TEST_CASE("topology masks hold for every sampled network") {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (Topology topology : {Topology::AllToAll, Topology::Ring}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto spec = sample_network(n, 0.7, 1.0, topology, seed);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(spec.coupling(i, i) == 0.0);
          for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const std::size_t gap = i > j ? i - j : j - i;
            const bool neighbours = gap == 1 || gap == n - 1;
            const bool allowed = topology == Topology::AllToAll || neighbours;
            CHECK((spec.coupling(i, j) != 0.0) == allowed);
            CHECK(spec.coupling(i, j) == spec.coupling(j, i));
          }
        }
      }
    }
  }
}

TEST_CASE("spectral-radius scaling is idempotent") {
  const auto spec = sample_network(4, 0.8, 1.0, Topology::AllToAll, 12);
  const RealMatrix again = scale_to_spectral_radius(spec.coupling, 0.8);
  CHECK((again - spec.coupling).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(spectral_radius(spec.coupling) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("validate rejects broken specs") {
  auto spec = sample_network(3, 0.5, 1.0, Topology::AllToAll, 1);
  CHECK_NOTHROW(validate(spec));
  auto asymmetric = spec;
  asymmetric.coupling(0, 1) += 0.1;
  CHECK_THROWS_AS(validate(asymmetric), std::invalid_argument);
  auto negative = spec.with_gamma(-1.0);
  CHECK_THROWS_AS(validate(negative), std::invalid_argument);
  auto diagonal = spec;
  diagonal.coupling(1, 1) = 0.2;
  CHECK_THROWS_AS(validate(diagonal), std::invalid_argument);
}

TEST_CASE("generate_inputs") {
  const InputSequence a = generate_inputs(1000, 99);
  CHECK(a.size() == 1000);
  for (double v : a.values) CHECK((v >= 0.0 && v <= 1.0));
  CHECK(generate_inputs(1000, 99).values == a.values);
  CHECK(generate_inputs(1000, 100).values != a.values);

  const InputSequence big = generate_inputs(100000, 5);
  const double mean = std::accumulate(big.values.begin(), big.values.end(), 0.0) / 1e5;
  CHECK(std::abs(mean - 0.5) < 0.005);
  CHECK_THROWS_AS(generate_inputs(0, 1), std::invalid_argument);
}

TEST_CASE("readout_observables") {
  const auto single = readout_observables(sample_network(1, 0.5, 1.0, Topology::AllToAll, 0));
  REQUIRE(single.size() == 1);
  CHECK((single[0] - pauli_matrix(Pauli::Z)).cwiseAbs().maxCoeff() == 0.0);

  const auto ops = readout_observables(sample_network(3, 0.5, 1.0, Topology::AllToAll, 0));
  REQUIRE(ops.size() == 3);
  for (const auto& a : ops) {
    CHECK(a.rows() == 8);
    CHECK((a * a - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& b : ops) CHECK((a * b - b * a).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("measure") {
  Rng rng(1);
  for (std::uint64_t m : {1ULL, 10ULL, 1000000ULL}) {
    CHECK(measure(-1.0, ShotModel::finite(m), rng) == -1.0);
    CHECK(measure(1.0, ShotModel::finite(m), rng) == 1.0);
  }
  CHECK(measure(0.3, ShotModel::infinite(), rng) == 0.3);
  CHECK(measure(-1.0 - 1e-12, ShotModel::infinite(), rng) == -1.0);
  CHECK_THROWS_AS(measure(1.01, ShotModel::infinite(), rng), ExpectationOutOfRange);
  CHECK_THROWS_AS(ShotModel::finite(0), std::invalid_argument);

  SUBCASE("binomial spread at one million shots") {
    const int draws = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < draws; ++k) {
      const double v = measure(0.0, ShotModel::finite(1000000), rng);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / draws;
    const double sd = std::sqrt((sum_sq - draws * mean * mean) / (draws - 1));
    CHECK(std::abs(sd - 1e-3) < 1e-4);
  }

  SUBCASE("unbiased within five standard errors") {
    const std::uint64_t shots = 1000;
    const int draws = 100000;
    for (double x : {-0.9, 0.0, 0.9}) {
      double sum = 0.0;
      for (int k = 0; k < draws; ++k) sum += measure(x, ShotModel::finite(shots), rng);
      const double stderr_ = std::sqrt((1.0 - x * x) / static_cast<double>(shots) / draws);
      CHECK(std::abs(sum / draws - x) < 5.0 * stderr_);
    }
  }
}
