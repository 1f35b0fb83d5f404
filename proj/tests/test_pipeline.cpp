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
#include <random>

#include "qrc/memory_capacity.hpp"
#include "qrc/pipeline.hpp"

using namespace qrc;

namespace {

RealMatrix random_real(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

QubitNetworkSpec reference_spec(double gamma = 1.0) {
  return sample_network(3, 0.5, gamma, Topology::AllToAll, 2024);
}

}  // namespace

TEST_CASE("zero input keeps the reservoir in its empty rest state") {
  const InputSequence zeros{std::vector<double>(50, 0.0), 0};
  for (const ShotModel& shots : {ShotModel::infinite(), ShotModel::finite(1000000)}) {
    Rng rng(3);
    const StateCollectMatrix x = run_reservoir(reference_spec(), zeros, 4, shots, rng);
    const RealMatrix features = x.values.leftCols(x.cols() - 1);
    CHECK((features.array() + 1.0).abs().maxCoeff() < 1e-12);
    CHECK((x.values.col(x.cols() - 1).array() == 1.0).all());
  }
}

TEST_CASE("state collect matrix shape") {
  Rng rng(1);
  const StateCollectMatrix x =
      run_reservoir(reference_spec(), generate_inputs(1000, 5), 4, ShotModel::infinite(), rng);
  CHECK(x.rows() == 1000);
  CHECK(x.cols() == 13);
  CHECK(x.n_qubits == 3);
  CHECK(x.multiplexing == 4);
  CHECK((x.values.array().abs() <= 1.0).all());
}

TEST_CASE("runs are bit-reproducible") {
  const InputSequence inputs = generate_inputs(200, 8);
  for (const ShotModel& shots : {ShotModel::infinite(), ShotModel::finite(1000)}) {
    Rng a(77), b(77);
    const StateCollectMatrix xa = run_reservoir(reference_spec(), inputs, 4, shots, a);
    const StateCollectMatrix xb = run_reservoir(reference_spec(), inputs, 4, shots, b);
    CHECK((xa.values.array() == xb.values.array()).all());
  }
}

TEST_CASE("fading memory: different initial states converge") {
  const ReservoirSimulator sim(reference_spec(1.0), 4);
  const InputSequence inputs = generate_inputs(80, 19);
  Rng rng(0);
  const StateCollectMatrix from_rest = sim.run(inputs, ShotModel::infinite(), rng);
  const StateCollectMatrix from_mixed =
      sim.run_from(DensityOperator::maximally_mixed(3), inputs, ShotModel::infinite(), rng);
  const double late = (from_rest.values.bottomRows(30) - from_mixed.values.bottomRows(30))
                          .cwiseAbs()
                          .maxCoeff();
  CHECK(late <= 1e-6);
  CHECK((from_rest.values.row(0) - from_mixed.values.row(0)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("more multiplexing never lowers the training-set fit") {
  const InputSequence inputs = generate_inputs(300, 21);
  const DelayedTarget target = legendre_target(inputs, 2, 1);
  const RealVector y = target.values.tail(299);
  double previous = -1.0;
  for (std::size_t v : {1U, 2U, 4U, 8U}) {
    Rng rng(0);
    const StateCollectMatrix x = run_reservoir(reference_spec(), inputs, v, ShotModel::infinite(), rng);
    const RealMatrix rows = x.values.bottomRows(299);
    const double fit = capacity(predict(rows, train_readout(rows, y)), y);
    CHECK(fit >= previous - 1e-12);
    previous = fit;
  }
}

TEST_CASE("train_readout examples") {
  std::mt19937_64 rng(5);
  const RealMatrix x0 = random_real(100, 4, rng);
  RealMatrix x(100, 5);
  x << x0, RealVector::Ones(100);

  SUBCASE("constant target is reproduced by the bias") {
    const RealVector y = RealVector::Constant(100, 2.5);
    const RealVector p = predict(x, train_readout(x, y));
    CHECK((p.array() - 2.5).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("target inside the column space fits exactly") {
    const RealVector y = x.col(2);
    CHECK(capacity(predict(x, train_readout(x, y)), y) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("residual is orthogonal to the columns") {
    const RealMatrix full = random_real(100, 5, rng);
    const RealVector y = random_real(100, 1, rng);
    const ReadoutWeights w = train_readout(full, y);
    CHECK((full.transpose() * (full * w.weights - y)).norm() <= 1e-8);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(train_readout(x, RealVector::Zero(99)), std::invalid_argument);
  }
}

TEST_CASE("predict examples") {
  std::mt19937_64 rng(6);
  RealMatrix x(50, 4);
  x << random_real(50, 3, rng), RealVector::Ones(50);
  CHECK(predict(x, {RealVector::Zero(4)}).cwiseAbs().maxCoeff() == 0.0);
  RealVector bias = RealVector::Zero(4);
  bias(3) = -0.75;
  CHECK((predict(x, {bias}).array() == -0.75).all());
  CHECK_THROWS_AS(predict(x, {RealVector::Zero(3)}), std::invalid_argument);

  SUBCASE("least-squares optimum beats random perturbations") {
    const RealVector y = random_real(50, 1, rng);
    const ReadoutWeights w = train_readout(x, y);
    const double best = (predict(x, w) - y).squaredNorm();
    std::normal_distribution<double> normal(0.0, 1e-3);
    int worse = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      RealVector p = w.weights;
      for (Eigen::Index k = 0; k < p.size(); ++k) p(k) += normal(rng);
      worse += (predict(x, {p}) - y).squaredNorm() >= best ? 1 : 0;
    }
    CHECK(worse == 1000);
  }
}

TEST_CASE("interpolated propagator matches direct exponentials") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double gamma : {1e-3, 1.0, 1e3}) {
    const PauliTransferGenerator generator(sample_network(4, 0.5, gamma, Topology::Ring, 3));
    const InterpolatedPropagator propagator(generator, 0.25, 0.0, 1.0);
    MESSAGE("gamma " << gamma << ": " << propagator.nodes() << " nodes, probe error "
                     << propagator.probe_error());
    CHECK(propagator.probe_error() <= 1e-13);
    for (double s : {0.0, 1.0, unit(rng), unit(rng), unit(rng)}) {
      const RealMatrix direct = matrix_exponential(RealMatrix(generator.at(s) * 0.25));
      CHECK((propagator.at(s) - direct).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  const PauliTransferGenerator small(sample_network(2, 0.5, 1.0, Topology::AllToAll, 3));
  const InterpolatedPropagator p(small, 0.25, 0.0, 1.0);
  CHECK_THROWS_AS(static_cast<void>(p.at(1.5)), std::out_of_range);
  CHECK_THROWS_AS(InterpolatedPropagator(small, 0.25, 1.0, 1.0), std::invalid_argument);
}
