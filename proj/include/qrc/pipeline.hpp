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
#include <optional>
#include <vector>

#include "qrc/lindblad.hpp"
#include "qrc/reservoir.hpp"

namespace qrc {

/// Recorded readouts, one row per input cycle.
///
/// Row k holds <Z_q> after sub-step j of cycle k at column j * N + q
/// (j = 0 .. V-1), followed by a trailing bias column of ones.
struct StateCollectMatrix {
  RealMatrix values;
  std::size_t n_qubits = 0;
  std::size_t multiplexing = 1;

  [[nodiscard]] Eigen::Index rows() const { return values.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return values.cols(); }
};

struct ReadoutWeights {
  RealVector weights;
};

/// exp(A(s) h) for s in [lo, hi], interpolated in s through Chebyshev-Lobatto
/// nodes that are exponentiated exactly. The node count doubles (reusing the
/// previous nodes) until three off-node probes agree with a direct exponential
/// to `tol` in every entry; throws NumericalDegradation past `max_nodes`.
class InterpolatedPropagator {
 public:
  InterpolatedPropagator(const PauliTransferGenerator& generator, double step, double lo, double hi,
                         double tol = 1e-13, std::size_t max_nodes = 129);

  [[nodiscard]] RealMatrix at(double signal) const;
  [[nodiscard]] bool covers(double signal) const { return signal >= lo_ && signal <= hi_; }
  [[nodiscard]] std::size_t nodes() const { return values_.size(); }
  [[nodiscard]] double probe_error() const { return probe_error_; }

 private:
  double lo_, hi_;
  std::vector<double> points_;   // increasing
  std::vector<double> weights_;  // barycentric
  std::vector<RealMatrix> values_;
  double probe_error_ = 0.0;
};

/// Drives one network with piecewise-constant inputs.
///
/// Propagation happens on real Pauli-string coordinates; each input cycle
/// applies exp(A(s_k) / V) V times, where A is the Liouvillian in that basis.
/// From 4 qubits on, propagators for inputs in [0, 1] come from an
/// InterpolatedPropagator instead of one exponential per distinct input.
class ReservoirSimulator {
 public:
  ReservoirSimulator(const QubitNetworkSpec& spec, std::size_t multiplexing);

  /// Starts from the zero-input steady state.
  [[nodiscard]] StateCollectMatrix run(const InputSequence& inputs, const ShotModel& shots,
                                       Rng& rng) const;
  [[nodiscard]] StateCollectMatrix run_from(const DensityOperator& initial,
                                            const InputSequence& inputs,
                                            const ShotModel& shots, Rng& rng) const;

  [[nodiscard]] const DensityOperator& rest_state() const { return rest_state_; }
  [[nodiscard]] const QubitNetworkSpec& spec() const { return spec_; }
  [[nodiscard]] std::size_t multiplexing() const { return multiplexing_; }

 private:
  QubitNetworkSpec spec_;
  std::size_t multiplexing_;
  PauliTransferGenerator generator_;
  DensityOperator rest_state_;
  std::optional<InterpolatedPropagator> interpolated_;
};

StateCollectMatrix run_reservoir(const QubitNetworkSpec& spec, const InputSequence& inputs,
                                 std::size_t multiplexing, const ShotModel& shots, Rng& rng);

/// Minimum-norm least-squares solver for a fixed feature matrix. The
/// pseudo-inverse is formed once so that many targets can be fitted cheaply.
class LeastSquaresReadout {
 public:
  explicit LeastSquaresReadout(const RealMatrix& features, double rel_cutoff = 1e-10);

  [[nodiscard]] ReadoutWeights fit(const RealVector& target) const;
  [[nodiscard]] Eigen::Index rows() const { return pseudo_inverse_.cols(); }

 private:
  RealMatrix pseudo_inverse_;
};

ReadoutWeights train_readout(const StateCollectMatrix& x, const RealVector& target);
ReadoutWeights train_readout(const RealMatrix& x, const RealVector& target);

RealVector predict(const StateCollectMatrix& x, const ReadoutWeights& w);
RealVector predict(const RealMatrix& x, const ReadoutWeights& w);

}  // namespace qrc
