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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Base class for failures of the numerical kernels (as opposed to bad
/// arguments, which raise std::invalid_argument).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoNullSpace : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateNullSpace : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Single-qubit basis: index 0 is the excited state |e>, index 1 the ground
// state |g>. sigma_z = diag(+1, -1) and sigma_minus |e> = |g>.
enum class Pauli { Identity, X, Y, Z, Plus, Minus };

struct PauliSite {
  Pauli kind;
  std::size_t site;
};

ComplexMatrix pauli_matrix(Pauli kind);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// I (x) ... (x) op (x) ... (x) I with op at position `op.site`; site 0 is the
/// leftmost (most significant) tensor factor.
ComplexMatrix embed(const PauliSite& op, std::size_t n_qubits);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

/// e^m by scaling and squaring with a [13/13] Pade approximant.
ComplexMatrix matrix_exponential(const ComplexMatrix& m);
RealMatrix matrix_exponential(const RealMatrix& m);

/// Unit-norm kernel vector of a square matrix, found from its singular value
/// decomposition. Singular values below `rel_tol * sigma_max` count as zero;
/// the kernel must be exactly one-dimensional.
ComplexVector nullspace_vector(const ComplexMatrix& m, double rel_tol = 1e-10);

/// Solves (shift * I - m) x = rhs.
ComplexVector solve_shifted(const ComplexMatrix& m, Complex shift,
                            const ComplexVector& rhs);

}  // namespace qrc
