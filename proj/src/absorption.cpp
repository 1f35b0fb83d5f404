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

#include "qrc/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qrc {

namespace {

/// Everything the correlation needs from one (spec, s) point.
struct StationaryDipole {
  Liouvillian liouvillian;
  DensityOperator rho;
  ComplexMatrix dipole;
  Eigen::RowVectorXcd trace_with_dipole;  // v -> Tr[X_tot unvec(v)]
  double norm = 0.0;                      // Tr[X_tot^2 rho_ss]
  Complex mean_dipole;                    // Tr[X_tot rho_ss]
};

StationaryDipole stationary_dipole(const QubitNetworkSpec& spec, double signal) {
  if (!(spec.gamma > 0.0)) {
    throw std::invalid_argument("absorption: gamma must be > 0");
  }
  StationaryDipole sd{build_liouvillian(spec, signal), {}, dipole_operator(spec.n_qubits), {}, 0.0, {}};
  sd.rho = steady_state(sd.liouvillian);
  // Tr[A B] = vec(A^T)^T vec(B)
  sd.trace_with_dipole = vectorize(sd.dipole.transpose()).transpose();
  sd.norm = (sd.dipole * sd.dipole * sd.rho.matrix).trace().real();
  sd.mean_dipole = (sd.dipole * sd.rho.matrix).trace();
  if (!(sd.norm > 0.0)) {
    throw NumericalError("absorption: dipole variance Tr[X^2 rho] vanishes");
  }
  return sd;
}

}  // namespace

ComplexMatrix dipole_operator(std::size_t n_qubits) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t q = 0; q < n_qubits; ++q) sum += embed({Pauli::X, q}, n_qubits);
  return sum;
}

TimeGrid default_time_grid(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("default_time_grid: gamma must be > 0");
  return {40.0 / gamma, std::min(0.01 / gamma, 0.05)};
}

std::vector<double> default_omega_grid(const QubitNetworkSpec& spec, std::size_t points) {
  if (points < 2) throw std::invalid_argument("default_omega_grid: need at least two points");
  const double half_width = 10.0 * std::max(spec.gamma, spec.coupling_strength);
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = -half_width + 2.0 * half_width * static_cast<double>(k) /
                                static_cast<double>(points - 1);
  }
  return grid;
}

std::vector<double> default_signal_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) grid.push_back(0.1 * k);
  return grid;
}

CorrelationTrace correlation_trace(const QubitNetworkSpec& spec, double signal, double t_max,
                                   double dt) {
  if (!(t_max > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("correlation_trace: t_max and dt must be > 0");
  }
  const StationaryDipole sd = stationary_dipole(spec, signal);
  const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
  const ComplexMatrix propagator =
      matrix_exponential(ComplexMatrix(sd.liouvillian.matrix * dt));

  CorrelationTrace trace;
  trace.signal = signal;
  trace.gamma = spec.gamma;
  trace.tail = sd.mean_dipole * sd.mean_dipole / sd.norm;
  trace.times.reserve(steps + 1);
  trace.values.reserve(steps + 1);

  ComplexVector b = vectorize(sd.dipole * sd.rho.matrix);
  ComplexVector next(b.size());
  for (std::size_t n = 0; n <= steps; ++n) {
    if (n > 0) {
      next.noalias() = propagator * b;
      b.swap(next);
    }
    trace.times.push_back(static_cast<double>(n) * dt);
    trace.values.push_back(n == 0 ? Complex{1.0, 0.0} : (sd.trace_with_dipole * b).value() / sd.norm);
  }
  const double mismatch = std::abs(trace.values.back() - trace.tail);
  if (mismatch > 1e-6) {
    throw TailMismatch("correlation_trace: late-time value differs from tail by " +
                       std::to_string(mismatch));
  }
  return trace;
}

CorrelationTrace converged_correlation_trace(const QubitNetworkSpec& spec, double signal,
                                             TimeGrid grid, int max_doublings) {
  for (int attempt = 0;; ++attempt) {
    try {
      return correlation_trace(spec, signal, grid.t_max, grid.dt);
    } catch (const TailMismatch&) {
      if (attempt >= max_doublings) throw;
      grid.t_max *= 2.0;
    }
  }
}

AbsorptionSpectrum spectrum_time_domain(const CorrelationTrace& trace,
                                        const std::vector<double>& omega_grid) {
  const std::size_t n = trace.times.size();
  if (n < 2 || trace.values.size() != n) {
    throw std::invalid_argument("spectrum_time_domain: trace needs at least two samples");
  }
  AbsorptionSpectrum spectrum{omega_grid, std::vector<double>(omega_grid.size()), trace.signal,
                              trace.gamma};
  std::vector<Complex> centred(n);
  for (std::size_t k = 0; k < n; ++k) centred[k] = trace.values[k] - trace.tail;
  for (std::size_t w = 0; w < omega_grid.size(); ++w) {
    const double omega = omega_grid[w];
    // e^{-i w t_k} by running rotation; re-evaluated only when the step changes.
    Complex phase = std::polar(1.0, -omega * trace.times[0]);
    double last_step = -1.0;
    Complex rotation{1.0, 0.0};
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double h = trace.times[k + 1] - trace.times[k];
      if (h != last_step) {
        rotation = std::polar(1.0, -omega * h);
        last_step = h;
      }
      const Complex next_phase = phase * rotation;
      sum += 0.5 * h * (phase * centred[k] + next_phase * centred[k + 1]);
      phase = next_phase;
    }
    spectrum.alpha[w] = sum.real();
  }
  return spectrum;
}

AbsorptionSpectrum spectrum_resolvent(const QubitNetworkSpec& spec, double signal,
                                      const std::vector<double>& omega_grid) {
  const StationaryDipole sd = stationary_dipole(spec, signal);
  const Eigen::Index d = sd.rho.matrix.rows();

  const ComplexVector stationary = vectorize(sd.rho.matrix);
  const ComplexVector identity = vectorize(ComplexMatrix::Identity(d, d));
  const ComplexMatrix deflated = sd.liouvillian.matrix - stationary * identity.transpose();
  const ComplexVector source =
      vectorize(sd.dipole * sd.rho.matrix - sd.mean_dipole * sd.rho.matrix);

  AbsorptionSpectrum spectrum{omega_grid, std::vector<double>(omega_grid.size()), signal,
                              spec.gamma};
  for (std::size_t w = 0; w < omega_grid.size(); ++w) {
    const ComplexVector x = solve_shifted(deflated, Complex{0.0, omega_grid[w]}, source);
    spectrum.alpha[w] = (sd.trace_with_dipole * x).value().real() / sd.norm;
  }
  return spectrum;
}

double resonant_absorption(const QubitNetworkSpec& spec, double signal) {
  return spectrum_resolvent(spec, signal, {0.0}).alpha.front();
}

double average_absorption(const QubitNetworkSpec& spec, const std::vector<double>& signal_grid) {
  if (signal_grid.empty()) throw std::invalid_argument("average_absorption: empty signal grid");
  double sum = 0.0;
  for (double s : signal_grid) sum += resonant_absorption(spec, s);
  return sum / static_cast<double>(signal_grid.size());
}

}  // namespace qrc
