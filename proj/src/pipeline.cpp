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

#include "qrc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <stdexcept>

namespace qrc {

namespace {

// Dimension from which per-input exponentials are replaced by interpolation.
constexpr std::size_t kInterpolationMinDimension = 256;

}  // namespace

InterpolatedPropagator::InterpolatedPropagator(const PauliTransferGenerator& generator, double step,
                                               double lo, double hi, double tol,
                                               std::size_t max_nodes)
    : lo_(lo), hi_(hi) {
  if (!(hi > lo)) throw std::invalid_argument("InterpolatedPropagator: empty interval");
  const auto exact = [&](double s) { return matrix_exponential(RealMatrix(generator.at(s) * step)); };
  const double centre = 0.5 * (lo + hi), half = 0.5 * (hi - lo);

  std::vector<double> probes;
  std::vector<RealMatrix> probe_values;
  for (double u : {-0.713, 0.091, 0.587}) {
    probes.push_back(centre + half * u);
    probe_values.push_back(exact(probes.back()));
  }

  // Lobatto node j of n sits at cos(pi j / n); doubling n keeps every old node.
  std::vector<RealMatrix> by_angle;  // index j of the current n
  std::size_t n = 8;
  for (std::size_t j = 0; j <= n; ++j) {
    by_angle.push_back(exact(centre + half * std::cos(std::numbers::pi * static_cast<double>(j) / n)));
  }
  while (true) {
    points_.assign(n + 1, 0.0);
    weights_.assign(n + 1, 0.0);
    values_.clear();
    for (std::size_t i = 0; i <= n; ++i) {
      const std::size_t j = n - i;  // ascending in s
      points_[i] = centre + half * std::cos(std::numbers::pi * static_cast<double>(j) / n);
      weights_[i] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
      values_.push_back(by_angle[j]);
    }
    probe_error_ = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      probe_error_ = std::max(probe_error_, (at(probes[p]) - probe_values[p]).cwiseAbs().maxCoeff());
    }
    if (probe_error_ <= tol) return;
    if (2 * n + 1 > max_nodes) {
      throw NumericalDegradation("InterpolatedPropagator: no convergence with " +
                                 std::to_string(n + 1) + " nodes");
    }
    std::vector<RealMatrix> refined;
    for (std::size_t j = 0; j <= 2 * n; ++j) {
      refined.push_back(j % 2 == 0 ? std::move(by_angle[j / 2])
                                   : exact(centre + half * std::cos(std::numbers::pi *
                                                                    static_cast<double>(j) / (2 * n))));
    }
    by_angle = std::move(refined);
    n *= 2;
  }
}

RealMatrix InterpolatedPropagator::at(double signal) const {
  if (!covers(signal)) throw std::out_of_range("InterpolatedPropagator: signal outside interval");
  double denominator = 0.0;
  RealMatrix numerator = RealMatrix::Zero(values_.front().rows(), values_.front().cols());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double gap = signal - points_[i];
    if (gap == 0.0) return values_[i];
    const double c = weights_[i] / gap;
    numerator += c * values_[i];
    denominator += c;
  }
  return numerator / denominator;
}

ReservoirSimulator::ReservoirSimulator(const QubitNetworkSpec& spec, std::size_t multiplexing)
    : spec_(spec),
      multiplexing_(multiplexing),
      generator_(spec),
      rest_state_(steady_state(build_liouvillian(spec, 0.0))) {
  if (multiplexing == 0) throw std::invalid_argument("ReservoirSimulator: V must be >= 1");
  if (generator_.dimension() >= kInterpolationMinDimension) {
    interpolated_.emplace(generator_, 1.0 / static_cast<double>(multiplexing), 0.0, 1.0);
  }
}

StateCollectMatrix ReservoirSimulator::run(const InputSequence& inputs, const ShotModel& shots,
                                           Rng& rng) const {
  return run_from(rest_state_, inputs, shots, rng);
}

StateCollectMatrix ReservoirSimulator::run_from(const DensityOperator& initial,
                                                const InputSequence& inputs,
                                                const ShotModel& shots, Rng& rng) const {
  const std::size_t n = spec_.n_qubits;
  const std::size_t v = multiplexing_;
  const auto k_rows = static_cast<Eigen::Index>(inputs.size());
  const auto width = static_cast<Eigen::Index>(n * v + 1);

  std::vector<Eigen::Index> z_rows;
  for (std::size_t q = 0; q < n; ++q) {
    z_rows.push_back(static_cast<Eigen::Index>(generator_.z_index(q)));
  }

  StateCollectMatrix out{RealMatrix::Ones(k_rows, width), n, v};
  RealVector state = generator_.coordinates(initial);
  RealVector next(state.size());

  // Consecutive equal inputs (e.g. zero stretches) reuse the propagator.
  double cached_signal = -1.0;
  RealMatrix step;
  for (Eigen::Index k = 0; k < k_rows; ++k) {
    const double s = inputs.values[static_cast<std::size_t>(k)];
    if (s != cached_signal) {
      step = interpolated_ && interpolated_->covers(s)
                 ? interpolated_->at(s)
                 : matrix_exponential(RealMatrix(generator_.at(s) / static_cast<double>(v)));
      cached_signal = s;
    }
    for (std::size_t j = 0; j < v; ++j) {
      next.noalias() = step * state;
      state.swap(next);
      for (std::size_t q = 0; q < n; ++q) {
        out.values(k, static_cast<Eigen::Index>(j * n + q)) =
            measure(state(z_rows[q]), shots, rng);
      }
    }
  }
  return out;
}

StateCollectMatrix run_reservoir(const QubitNetworkSpec& spec, const InputSequence& inputs,
                                 std::size_t multiplexing, const ShotModel& shots, Rng& rng) {
  return ReservoirSimulator(spec, multiplexing).run(inputs, shots, rng);
}

LeastSquaresReadout::LeastSquaresReadout(const RealMatrix& features, double rel_cutoff) {
  if (features.rows() == 0 || features.cols() == 0) {
    throw std::invalid_argument("LeastSquaresReadout: empty feature matrix");
  }
  Eigen::JacobiSVD<RealMatrix> svd(features, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = rel_cutoff * sv(0);
  RealVector inverse = RealVector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inverse(i) = 1.0 / sv(i);
  }
  pseudo_inverse_ = svd.matrixV() * inverse.asDiagonal() * svd.matrixU().transpose();
}

ReadoutWeights LeastSquaresReadout::fit(const RealVector& target) const {
  if (target.size() != rows()) {
    throw std::invalid_argument("train_readout: target length does not match row count");
  }
  return {pseudo_inverse_ * target};
}

ReadoutWeights train_readout(const RealMatrix& x, const RealVector& target) {
  if (target.size() != x.rows()) {
    throw std::invalid_argument("train_readout: target length does not match row count");
  }
  return LeastSquaresReadout(x).fit(target);
}

ReadoutWeights train_readout(const StateCollectMatrix& x, const RealVector& target) {
  return train_readout(x.values, target);
}

RealVector predict(const RealMatrix& x, const ReadoutWeights& w) {
  if (w.weights.size() != x.cols()) {
    throw std::invalid_argument("predict: weight length does not match column count");
  }
  return x * w.weights;
}

RealVector predict(const StateCollectMatrix& x, const ReadoutWeights& w) {
  return predict(x.values, w);
}

}  // namespace qrc
