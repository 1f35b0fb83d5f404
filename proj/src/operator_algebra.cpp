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

#include "qrc/operator_algebra.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qrc {

ComplexMatrix pauli_matrix(Pauli kind) {
  const Complex i{0.0, 1.0};
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (kind) {
    case Pauli::Identity:
      m << 1.0, 0.0, 0.0, 1.0;
      break;
    case Pauli::X:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case Pauli::Y:
      m << 0.0, -i, i, 0.0;
      break;
    case Pauli::Z:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
    case Pauli::Plus:  // |e><g|
      m(0, 1) = 1.0;
      break;
    case Pauli::Minus:  // |g><e|
      m(1, 0) = 1.0;
      break;
  }
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexMatrix embed(const PauliSite& op, std::size_t n_qubits) {
  if (op.site >= n_qubits) {
    throw std::invalid_argument("embed: site " + std::to_string(op.site) +
                                " out of range for " + std::to_string(n_qubits) +
                                " qubits");
  }
  ComplexMatrix result = ComplexMatrix::Identity(1, 1);
  const ComplexMatrix id = pauli_matrix(Pauli::Identity);
  const ComplexMatrix local = pauli_matrix(op.kind);
  for (std::size_t q = 0; q < n_qubits; ++q) {
    result = kron(result, q == op.site ? local : id);
  }
  return result;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

template <typename Matrix>
Matrix checked_exponential(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  }
  if (m.size() == 0) return m;
  return m.exp();
}

}  // namespace

ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
  return checked_exponential(m);
}

RealMatrix matrix_exponential(const RealMatrix& m) {
  return checked_exponential(m);
}

ComplexVector nullspace_vector(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("nullspace_vector: matrix must be square");
  }
  Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();  // descending
  const double cutoff = rel_tol * sv(0);
  Eigen::Index zero_count = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cutoff) ++zero_count;
  }
  if (zero_count == 0) {
    throw NoNullSpace("nullspace_vector: smallest singular value " +
                      std::to_string(sv(sv.size() - 1)) +
                      " is above the tolerance");
  }
  if (zero_count > 1) {
    throw DegenerateNullSpace("nullspace_vector: null space has dimension " +
                              std::to_string(zero_count));
  }
  ComplexVector v = svd.matrixV().col(m.cols() - 1);
  return v / v.norm();
}

ComplexVector solve_shifted(const ComplexMatrix& m, Complex shift,
                            const ComplexVector& rhs) {
  if (m.rows() != m.cols() || m.rows() != rhs.size()) {
    throw std::invalid_argument("solve_shifted: dimension mismatch");
  }
  ComplexMatrix a = -m;
  a.diagonal().array() += shift;
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  // rcond() is an estimate; treat anything near machine precision as singular.
  if (!(lu.rcond() > 64.0 * std::numeric_limits<double>::epsilon())) {
    throw SingularSystem("solve_shifted: shifted matrix is numerically singular");
  }
  ComplexVector x = lu.solve(rhs);
  if (!x.allFinite()) {
    throw SingularSystem("solve_shifted: non-finite solution");
  }
  return x;
}

}  // namespace qrc
