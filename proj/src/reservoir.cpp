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

#include "qrc/reservoir.hpp"

#include <algorithm>
#include <cmath>

namespace qrc {

std::string to_string(Topology topology) {
  return topology == Topology::Ring ? "ring" : "all_to_all";
}

Topology topology_from_string(std::string_view name) {
  if (name == "all_to_all" || name == "all-to-all") return Topology::AllToAll;
  if (name == "ring") return Topology::Ring;
  throw std::invalid_argument("unknown topology '" + std::string(name) + "'");
}

ShotModel ShotModel::finite(std::uint64_t shots) {
  if (shots == 0) throw std::invalid_argument("ShotModel: shots must be >= 1");
  ShotModel model;
  model.shots_ = shots;
  return model;
}

std::uint64_t ShotModel::shots() const {
  if (!shots_) throw std::logic_error("ShotModel: infinite model has no shot count");
  return *shots_;
}

namespace {

bool edge_allowed(Topology topology, std::size_t i, std::size_t j, std::size_t n) {
  if (i == j) return false;
  if (topology == Topology::AllToAll) return true;
  const std::size_t d = i > j ? i - j : j - i;
  return d == 1 || d == n - 1;
}

}  // namespace

void validate(const QubitNetworkSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.n_qubits);
  if (spec.n_qubits == 0) throw std::invalid_argument("spec: n_qubits must be >= 1");
  if (spec.coupling.rows() != n || spec.coupling.cols() != n) {
    throw std::invalid_argument("spec: coupling must be n_qubits x n_qubits");
  }
  if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) {
    throw std::invalid_argument("spec: gamma must be finite and >= 0");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (spec.coupling(i, i) != 0.0) throw std::invalid_argument("spec: nonzero coupling diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (spec.coupling(i, j) != spec.coupling(j, i)) {
        throw std::invalid_argument("spec: coupling not symmetric");
      }
      if (spec.coupling(i, j) != 0.0 &&
          !edge_allowed(spec.topology, static_cast<std::size_t>(i),
                        static_cast<std::size_t>(j), spec.n_qubits)) {
        throw std::invalid_argument("spec: coupling violates topology");
      }
    }
  }
}

double spectral_radius(const RealMatrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

RealMatrix scale_to_spectral_radius(const RealMatrix& symmetric, double target) {
  const double rho = spectral_radius(symmetric);
  if (rho == 0.0) throw std::invalid_argument("cannot rescale a zero matrix");
  return symmetric * (target / rho);
}

QubitNetworkSpec sample_network(std::size_t n_qubits, double coupling_strength,
                                double gamma, Topology topology,
                                std::uint64_t seed) {
  if (n_qubits == 0) throw std::invalid_argument("sample_network: n_qubits must be >= 1");
  if (!(coupling_strength > 0.0)) {
    throw std::invalid_argument("sample_network: coupling strength must be > 0");
  }
  const auto n = static_cast<Eigen::Index>(n_qubits);
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  RealMatrix coupling = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!edge_allowed(topology, static_cast<std::size_t>(i),
                        static_cast<std::size_t>(j), n_qubits)) {
        continue;
      }
      coupling(i, j) = uniform(rng);
      coupling(j, i) = coupling(i, j);
    }
  }
  if (n_qubits > 1) coupling = scale_to_spectral_radius(coupling, coupling_strength);

  QubitNetworkSpec spec;
  spec.n_qubits = n_qubits;
  spec.coupling = std::move(coupling);
  spec.coupling_strength = coupling_strength;
  spec.gamma = gamma;
  spec.topology = topology;
  spec.seed = seed;
  validate(spec);
  return spec;
}

InputSequence generate_inputs(std::size_t length, std::uint64_t seed) {
  if (length == 0) throw std::invalid_argument("generate_inputs: length must be >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  InputSequence inputs;
  inputs.seed = seed;
  inputs.values.resize(length);
  std::generate(inputs.values.begin(), inputs.values.end(), [&] { return uniform(rng); });
  return inputs;
}

std::vector<ComplexMatrix> readout_observables(const QubitNetworkSpec& spec) {
  std::vector<ComplexMatrix> ops;
  ops.reserve(spec.n_qubits);
  for (std::size_t q = 0; q < spec.n_qubits; ++q) {
    ops.push_back(embed({Pauli::Z, q}, spec.n_qubits));
  }
  return ops;
}

double measure(double true_expectation, const ShotModel& model, Rng& rng) {
  constexpr double kOvershoot = 1e-9;
  double x = true_expectation;
  if (!(std::abs(x) <= 1.0 + kOvershoot)) {
    throw ExpectationOutOfRange("measure: expectation " + std::to_string(x) +
                                " outside [-1, 1]");
  }
  x = std::clamp(x, -1.0, 1.0);
  if (model.is_infinite()) return x;

  const std::uint64_t shots = model.shots();
  const double p = 0.5 * (1.0 + x);
  std::binomial_distribution<std::uint64_t> binomial(shots, p);
  const auto m = static_cast<double>(binomial(rng));
  return 2.0 * m / static_cast<double>(shots) - 1.0;
}

}  // namespace qrc
