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
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qrc/operator_algebra.hpp"

namespace qrc {

using Rng = std::mt19937_64;

enum class Topology { AllToAll, Ring };

std::string to_string(Topology topology);
Topology topology_from_string(std::string_view name);

/// Static definition of a driven, dissipative qubit network.
///
/// In the lab frame the network is a transverse-field Ising model
///   H_lab = sum_{i<j} J_ij X_i X_j + h sum_i Z_i .
/// All simulations run in the rotating frame of the resonant pump, where the
/// h term drops out and the couplings reduce to flip-flop exchange
/// (see build_hamiltonian). `qubit_energy` is kept for bookkeeping only.
struct QubitNetworkSpec {
  std::size_t n_qubits = 0;
  RealMatrix coupling;  // symmetric, zero diagonal, spectral radius J0
  double coupling_strength = 0.0;
  double gamma = 0.0;
  Topology topology = Topology::AllToAll;
  double qubit_energy = 1.0;
  std::uint64_t seed = 0;

  [[nodiscard]] QubitNetworkSpec with_gamma(double new_gamma) const {
    QubitNetworkSpec copy = *this;
    copy.gamma = new_gamma;
    return copy;
  }
};

/// Throws std::invalid_argument if the spec breaks a structural invariant.
void validate(const QubitNetworkSpec& spec);

/// Piecewise-constant drive amplitudes s_k in [0, 1], one per unit input cycle.
struct InputSequence {
  std::vector<double> values;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return values.size(); }
};

class ShotModel {
 public:
  static ShotModel infinite() { return ShotModel{}; }
  static ShotModel finite(std::uint64_t shots);

  [[nodiscard]] bool is_infinite() const { return !shots_.has_value(); }
  [[nodiscard]] std::uint64_t shots() const;

  friend bool operator==(const ShotModel&, const ShotModel&) = default;

 private:
  std::optional<std::uint64_t> shots_;
};

class ExpectationOutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double spectral_radius(const RealMatrix& symmetric);

/// Rescales a symmetric matrix so its spectral radius equals `target`.
RealMatrix scale_to_spectral_radius(const RealMatrix& symmetric, double target);

/// Draws allowed couplings i.i.d. uniform on [0, 1], symmetrizes, and rescales
/// to spectral radius `coupling_strength`. Deterministic in `seed`.
/// A single qubit has no edges, so its 1x1 coupling stays zero.
QubitNetworkSpec sample_network(std::size_t n_qubits, double coupling_strength,
                                double gamma, Topology topology,
                                std::uint64_t seed);

InputSequence generate_inputs(std::size_t length, std::uint64_t seed);

/// Embedded sigma_z for each qubit, in qubit-index order.
std::vector<ComplexMatrix> readout_observables(const QubitNetworkSpec& spec);

/// Applies the measurement model to an exact expectation value. Finite shot
/// counts draw m ~ Binomial(M, (1 + x) / 2) and return 2 m / M - 1.
double measure(double true_expectation, const ShotModel& model, Rng& rng);

}  // namespace qrc
