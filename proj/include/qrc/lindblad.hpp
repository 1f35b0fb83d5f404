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

#include <cstddef>
#include <vector>

#include "qrc/operator_algebra.hpp"
#include "qrc/reservoir.hpp"

namespace qrc {

class DegenerateSteadyState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonHermitianObservable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a quantity that must be real picks up an imaginary part.
class NumericalDegradation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct DensityOperator {
  ComplexMatrix matrix;

  static DensityOperator ground(std::size_t n_qubits);
  static DensityOperator maximally_mixed(std::size_t n_qubits);
};

/// Hermitian to `tol`, unit trace to `tol`, eigenvalues >= -positivity_tol.
bool is_physical(const DensityOperator& rho, double tol = 1e-10,
                 double positivity_tol = 1e-10);

/// Superoperator acting on column-stacked density matrices:
/// vec(A rho B) = (B^T (x) A) vec(rho).
struct Liouvillian {
  ComplexMatrix matrix;
  double signal = 0.0;
  double gamma = 0.0;
  std::size_t n_qubits = 0;
};

ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v);

/// Rotating-frame Hamiltonian
///   H = sum_{i<j} J_ij (s+_i s-_j + s-_i s+_j) + s sum_i Y_i .
ComplexMatrix build_hamiltonian(const QubitNetworkSpec& spec, double signal);

/// Generator of d rho/dt = -i[H, rho] + gamma sum_i D[s-_i] rho.
Liouvillian build_liouvillian(const QubitNetworkSpec& spec, double signal);

DensityOperator steady_state(const Liouvillian& liouvillian);

DensityOperator propagate(const Liouvillian& liouvillian, const DensityOperator& rho,
                          double dt);

double expectation(const DensityOperator& rho, const ComplexMatrix& observable);

/// The same dynamics written on real Pauli-string coordinates
/// r_a = Tr(P_a rho), so that dr/dt = (A0 + s A1) r with real A0, A1.
///
/// Pauli strings are indexed in base 4 with site 0 as the most significant
/// digit and digits I=0, X=1, Y=2, Z=3. The generator is affine in the drive
/// amplitude, so one instance serves every input value of a run.
class PauliTransferGenerator {
 public:
  explicit PauliTransferGenerator(const QubitNetworkSpec& spec);

  [[nodiscard]] RealMatrix at(double signal) const { return drift_ + signal * drive_; }
  [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(drift_.rows()); }

  [[nodiscard]] RealVector coordinates(const DensityOperator& rho) const;
  [[nodiscard]] DensityOperator density(const RealVector& coords) const;

  /// Coordinate index holding <Z_site>.
  [[nodiscard]] std::size_t z_index(std::size_t site) const;

 private:
  std::size_t n_qubits_;
  ComplexMatrix basis_;  // columns vec(P_a)
  RealMatrix drift_;
  RealMatrix drive_;
};

}  // namespace qrc
