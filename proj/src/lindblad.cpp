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

#include "qrc/lindblad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace qrc {

namespace {

std::size_t hilbert_dimension(std::size_t n_qubits) { return std::size_t{1} << n_qubits; }

ComplexMatrix hermitized(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

DensityOperator DensityOperator::ground(std::size_t n_qubits) {
  const auto d = static_cast<Eigen::Index>(hilbert_dimension(n_qubits));
  DensityOperator rho{ComplexMatrix::Zero(d, d)};
  // |g...g> is the last basis state because |g> has index 1 on every site.
  rho.matrix(d - 1, d - 1) = 1.0;
  return rho;
}

DensityOperator DensityOperator::maximally_mixed(std::size_t n_qubits) {
  const auto d = static_cast<Eigen::Index>(hilbert_dimension(n_qubits));
  return {ComplexMatrix::Identity(d, d) / static_cast<double>(d)};
}

bool is_physical(const DensityOperator& rho, double tol, double positivity_tol) {
  const ComplexMatrix& m = rho.matrix;
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!is_hermitian(m, tol)) return false;
  if (std::abs(m.trace() - Complex{1.0, 0.0}) > tol) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -positivity_tol;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw std::invalid_argument("unvectorize: length is not a square");
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix build_hamiltonian(const QubitNetworkSpec& spec, double signal) {
  validate(spec);
  if (!(signal >= 0.0)) throw std::invalid_argument("build_hamiltonian: signal must be >= 0");
  const std::size_t n = spec.n_qubits;
  const auto d = static_cast<Eigen::Index>(hilbert_dimension(n));
  ComplexMatrix h = ComplexMatrix::Zero(d, d);

  std::vector<ComplexMatrix> raise, lower;
  for (std::size_t q = 0; q < n; ++q) {
    raise.push_back(embed({Pauli::Plus, q}, n));
    lower.push_back(embed({Pauli::Minus, q}, n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double jij = spec.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (jij == 0.0) continue;
      h += jij * (raise[i] * lower[j] + lower[i] * raise[j]);
    }
  }
  if (signal != 0.0) {
    for (std::size_t q = 0; q < n; ++q) h += signal * embed({Pauli::Y, q}, n);
  }
  return h;
}

Liouvillian build_liouvillian(const QubitNetworkSpec& spec, double signal) {
  const ComplexMatrix h = build_hamiltonian(spec, signal);
  const Eigen::Index d = h.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const Complex i{0.0, 1.0};

  ComplexMatrix l = -i * (kron(id, h) - kron(h.transpose(), id));
  if (spec.gamma != 0.0) {
    for (std::size_t q = 0; q < spec.n_qubits; ++q) {
      const ComplexMatrix lower = embed({Pauli::Minus, q}, spec.n_qubits);
      const ComplexMatrix number = lower.adjoint() * lower;
      // s- rho s+  ->  (s+)^T (x) s-  ;  anticommutator with n = s+ s-.
      l += spec.gamma * (kron(lower.adjoint().transpose(), lower) -
                         0.5 * kron(id, number) - 0.5 * kron(number.transpose(), id));
    }
  }
  return {std::move(l), signal, spec.gamma, spec.n_qubits};
}

DensityOperator steady_state(const Liouvillian& liouvillian) {
  if (!(liouvillian.gamma > 0.0)) {
    throw DegenerateSteadyState("steady_state: gamma = 0 has no unique steady state");
  }
  ComplexVector kernel;
  try {
    kernel = nullspace_vector(liouvillian.matrix);
  } catch (const DegenerateNullSpace& e) {
    throw DegenerateSteadyState(std::string("steady_state: ") + e.what());
  }
  ComplexMatrix rho = unvectorize(kernel);
  rho /= rho.trace();
  return {hermitized(rho)};
}

DensityOperator propagate(const Liouvillian& liouvillian, const DensityOperator& rho,
                          double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("propagate: dt must be >= 0");
  if (liouvillian.matrix.rows() != rho.matrix.size()) {
    throw std::invalid_argument("propagate: dimension mismatch");
  }
  if (dt == 0.0) return rho;
  const ComplexMatrix step = matrix_exponential(ComplexMatrix(liouvillian.matrix * dt));
  return {hermitized(unvectorize(step * vectorize(rho.matrix)))};
}

double expectation(const DensityOperator& rho, const ComplexMatrix& observable) {
  if (observable.rows() != rho.matrix.rows() || observable.cols() != rho.matrix.cols()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  if (!is_hermitian(observable, 1e-10)) {
    throw NonHermitianObservable("expectation: observable is not Hermitian");
  }
  const Complex value = (observable * rho.matrix).trace();
  if (std::abs(value.imag()) > 1e-10) {
    throw NumericalDegradation("expectation: trace has imaginary part " +
                               std::to_string(value.imag()));
  }
  return value.real();
}

PauliTransferGenerator::PauliTransferGenerator(const QubitNetworkSpec& spec)
    : n_qubits_(spec.n_qubits) {
  const std::size_t d = hilbert_dimension(n_qubits_);
  const std::size_t count = d * d;
  const std::array<ComplexMatrix, 4> local = {
      pauli_matrix(Pauli::Identity), pauli_matrix(Pauli::X), pauli_matrix(Pauli::Y),
      pauli_matrix(Pauli::Z)};

  basis_.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  for (std::size_t a = 0; a < count; ++a) {
    ComplexMatrix p = ComplexMatrix::Identity(1, 1);
    for (std::size_t q = 0; q < n_qubits_; ++q) {
      const std::size_t digit = (a >> (2 * (n_qubits_ - 1 - q))) & 3U;
      p = kron(p, local[digit]);
    }
    basis_.col(static_cast<Eigen::Index>(a)) = vectorize(p);
  }

  const ComplexMatrix l0 = build_liouvillian(spec, 0.0).matrix;
  const ComplexMatrix l1 = build_liouvillian(spec, 1.0).matrix - l0;
  const double norm = 1.0 / static_cast<double>(d);
  const ComplexMatrix a0 = norm * (basis_.adjoint() * l0 * basis_);
  const ComplexMatrix a1 = norm * (basis_.adjoint() * l1 * basis_);
  const double leak = std::max(a0.imag().cwiseAbs().maxCoeff(), a1.imag().cwiseAbs().maxCoeff());
  if (leak > 1e-10 * std::max(1.0, a0.cwiseAbs().maxCoeff())) {
    throw NumericalDegradation("PauliTransferGenerator: generator is not real");
  }
  drift_ = a0.real();
  drive_ = a1.real();
}

RealVector PauliTransferGenerator::coordinates(const DensityOperator& rho) const {
  if (rho.matrix.size() != basis_.rows()) {
    throw std::invalid_argument("PauliTransferGenerator: dimension mismatch");
  }
  return (basis_.adjoint() * vectorize(rho.matrix)).real();
}

DensityOperator PauliTransferGenerator::density(const RealVector& coords) const {
  const double d = std::sqrt(static_cast<double>(basis_.rows()));
  return {unvectorize(basis_ * coords.cast<Complex>()) / d};
}

std::size_t PauliTransferGenerator::z_index(std::size_t site) const {
  if (site >= n_qubits_) throw std::invalid_argument("z_index: site out of range");
  return std::size_t{3} << (2 * (n_qubits_ - 1 - site));
}

}  // namespace qrc
