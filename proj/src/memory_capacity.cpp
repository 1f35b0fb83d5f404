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

#include "qrc/memory_capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrc {

namespace {

void check_degree(int degree) {
  if (degree < 1 || degree > kMaxDegree) {
    throw std::invalid_argument("degree " + std::to_string(degree) + " not in [1, " +
                                std::to_string(kMaxDegree) + "]");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RealVector random_polynomial_target(Eigen::Index length, int degree, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RealVector target(length);
  for (Eigen::Index k = 0; k < length; ++k) target(k) = shifted_legendre(degree, uniform(rng));
  return target;
}

bool is_constant(const RealVector& centered, double scale) {
  const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(centered.size()));
  return !(sd > 1e-13 * std::max(1.0, scale));
}

}  // namespace

double legendre(int degree, double u) {
  switch (degree) {
    case 0:
      return 1.0;
    case 1:
      return u;
    case 2:
      return 0.5 * (3.0 * u * u - 1.0);
    case 3:
      return 0.5 * (5.0 * u * u * u - 3.0 * u);
    default:
      throw std::invalid_argument("legendre: unsupported degree " + std::to_string(degree));
  }
}

double shifted_legendre(int degree, double x) { return legendre(degree, 2.0 * x - 1.0); }

DelayedTarget legendre_target(const InputSequence& inputs, int degree, std::size_t delay) {
  check_degree(degree);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  DelayedTarget target{RealVector::Constant(n, std::numeric_limits<double>::quiet_NaN()), delay};
  for (std::size_t k = delay; k < inputs.size(); ++k) {
    target.values(static_cast<Eigen::Index>(k)) = shifted_legendre(degree, inputs.values[k - delay]);
  }
  return target;
}

double capacity(const RealVector& prediction, const RealVector& target) {
  if (prediction.size() != target.size()) {
    throw std::invalid_argument("capacity: length mismatch");
  }
  if (prediction.size() < 2) throw std::invalid_argument("capacity: need at least two samples");
  const RealVector p = prediction.array() - prediction.mean();
  const RealVector t = target.array() - target.mean();
  if (is_constant(p, prediction.cwiseAbs().maxCoeff()) ||
      is_constant(t, target.cwiseAbs().maxCoeff())) {
    throw ZeroVariance("capacity: constant sequence");
  }
  const double cov = p.dot(t);
  const double c = (cov / p.squaredNorm()) * (cov / t.squaredNorm());
  return std::clamp(c, 0.0, 1.0);
}

double capacity_or_zero(const RealVector& prediction, const RealVector& target) {
  try {
    return capacity(prediction, target);
  } catch (const ZeroVariance&) {
    return 0.0;
  }
}

double noise_threshold(const StateCollectMatrix& x_train, const StateCollectMatrix& x_test,
                       int degree, std::size_t repetitions, Rng& rng) {
  check_degree(degree);
  if (repetitions == 0) throw std::invalid_argument("noise_threshold: repetitions must be >= 1");
  const LeastSquaresReadout readout(x_train.values);
  double worst = 0.0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const RealVector train_target = random_polynomial_target(x_train.rows(), degree, rng);
    const RealVector y = predict(x_test, readout.fit(train_target));
    const RealVector test_target = random_polynomial_target(x_test.rows(), degree, rng);
    worst = std::max(worst, capacity_or_zero(y, test_target));
  }
  return worst;
}

TotalCapacity total_capacity(const StateCollectMatrix& x_train, const StateCollectMatrix& x_test,
                             const InputSequence& inputs_train, const InputSequence& inputs_test,
                             int degree, double threshold, std::size_t delay_cap) {
  check_degree(degree);
  if (static_cast<std::size_t>(x_train.rows()) != inputs_train.size() ||
      static_cast<std::size_t>(x_test.rows()) != inputs_test.size()) {
    throw std::invalid_argument("total_capacity: inputs do not match state collect matrices");
  }
  TotalCapacity result;
  for (std::size_t tau = 0; tau <= delay_cap; ++tau) {
    const auto t = static_cast<Eigen::Index>(tau);
    if (x_train.rows() - t < 2 || x_test.rows() - t < 2) break;

    const DelayedTarget train_target = legendre_target(inputs_train, degree, tau);
    const DelayedTarget test_target = legendre_target(inputs_test, degree, tau);
    const Eigen::Index n_train = x_train.rows() - t;
    const Eigen::Index n_test = x_test.rows() - t;

    const ReadoutWeights w = train_readout(RealMatrix(x_train.values.bottomRows(n_train)),
                                           train_target.values.tail(n_train));
    const RealVector y = predict(RealMatrix(x_test.values.bottomRows(n_test)), w);
    const double c = capacity_or_zero(y, test_target.values.tail(n_test));

    const bool keep = c >= threshold;
    result.records.push_back({degree, tau, c, keep});
    if (!keep) break;
    result.total += c;
    result.tau_max = tau + 1;
  }
  return result;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t reservoir, std::string_view tag,
                          std::uint64_t index) {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ reservoir);
  h = splitmix64(h ^ fnv1a(tag));
  return splitmix64(h ^ index);
}

StmcCell stmc_cell(const QubitNetworkSpec& spec, std::size_t reservoir_index,
                   std::size_t gamma_index, const StmcConfig& config) {
  StmcCell cell;
  cell.gamma = spec.gamma;
  try {
    const InputSequence train = generate_inputs(
        config.train_len, derive_seed(config.root_seed, reservoir_index, "train-inputs"));
    const InputSequence test = generate_inputs(
        config.test_len, derive_seed(config.root_seed, reservoir_index, "test-inputs"));

    const ReservoirSimulator simulator(spec, config.multiplexing);
    Rng shot_rng(derive_seed(config.root_seed, reservoir_index, "shots", gamma_index));
    const StateCollectMatrix x_train = simulator.run(train, config.shots, shot_rng);
    const StateCollectMatrix x_test = simulator.run(test, config.shots, shot_rng);

    for (int degree : config.degrees) {
      Rng threshold_rng(derive_seed(config.root_seed, reservoir_index, "threshold",
                                    gamma_index * 16 + static_cast<std::uint64_t>(degree)));
      DegreeCapacity dc;
      dc.degree = degree;
      dc.threshold =
          noise_threshold(x_train, x_test, degree, config.threshold_repetitions, threshold_rng);
      TotalCapacity total =
          total_capacity(x_train, x_test, train, test, degree, dc.threshold, config.delay_cap);
      dc.total = total.total;
      dc.tau_max = total.tau_max;
      dc.records = std::move(total.records);
      cell.degrees.push_back(std::move(dc));
    }
  } catch (const std::exception& e) {
    cell.degrees.clear();
    cell.error = e.what();
  }
  return cell;
}

std::vector<CapacityCurve> stmc_sweep(const std::vector<QubitNetworkSpec>& ensemble,
                                      const std::vector<double>& gamma_grid,
                                      const StmcConfig& config) {
  for (double g : gamma_grid) {
    if (!(g > 0.0)) throw std::invalid_argument("stmc_sweep: gamma grid must be positive");
  }
  std::vector<CapacityCurve> curves;
  for (std::size_t r = 0; r < ensemble.size(); ++r) {
    if (ensemble[r].n_qubits != ensemble.front().n_qubits ||
        ensemble[r].topology != ensemble.front().topology ||
        ensemble[r].coupling_strength != ensemble.front().coupling_strength) {
      throw std::invalid_argument("stmc_sweep: ensemble members must share N, J0 and topology");
    }
    CapacityCurve curve;
    curve.gamma_grid = gamma_grid;
    for (std::size_t g = 0; g < gamma_grid.size(); ++g) {
      curve.cells.push_back(stmc_cell(ensemble[r].with_gamma(gamma_grid[g]), r, g, config));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace qrc
