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

#include "qrc/lindblad.hpp"
#include "qrc/reservoir.hpp"

namespace qrc {

// Linear-response absorption of the driven network.
//
// With the total dipole X_tot = sum_i X_i and the driven steady state rho_ss of
// L[s, gamma], the normalized dipole correlation is
//
//   g(t) = Tr[X_tot e^{L t} (X_tot rho_ss)] / Tr[X_tot^2 rho_ss] ,
//
// which tends to g_inf = Tr[X_tot rho_ss]^2 / Tr[X_tot^2 rho_ss]. The constant
// tail is the elastically scattered pump and is removed before transforming:
//
//   alpha(w) = Re int_0^inf e^{-i w t} (g(t) - g_inf) dt .
//
// Frequencies are in the frame rotating with the pump, so w = 0 is resonance.

class TailMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

ComplexMatrix dipole_operator(std::size_t n_qubits);

struct CorrelationTrace {
  std::vector<double> times;
  std::vector<Complex> values;
  Complex tail;
  double signal = 0.0;
  double gamma = 0.0;
};

struct AbsorptionSpectrum {
  std::vector<double> omega;
  std::vector<double> alpha;
  double signal = 0.0;
  double gamma = 0.0;
};

struct TimeGrid {
  double t_max = 0.0;
  double dt = 0.0;
};

/// t_max = 40 / gamma, dt = min(0.01 / gamma, 0.05).
TimeGrid default_time_grid(double gamma);

/// 801 points on [-W, W] with W = 10 max(gamma, J0).
std::vector<double> default_omega_grid(const QubitNetworkSpec& spec, std::size_t points = 801);

/// {0.1, 0.2, ..., 1.0}
std::vector<double> default_signal_grid();

/// Samples g(t) on t = 0, dt, ..., t_max by repeated application of e^{L dt}.
/// Throws TailMismatch when the last sample is not within 1e-6 of g_inf.
CorrelationTrace correlation_trace(const QubitNetworkSpec& spec, double signal, double t_max,
                                   double dt);

/// correlation_trace() that doubles t_max on TailMismatch, at most
/// `max_doublings` times.
CorrelationTrace converged_correlation_trace(const QubitNetworkSpec& spec, double signal,
                                             TimeGrid grid, int max_doublings = 4);

/// Trapezoidal quadrature of the tail-subtracted correlation.
AbsorptionSpectrum spectrum_time_domain(const CorrelationTrace& trace,
                                        const std::vector<double>& omega_grid);

/// Exact one-sided transform via the resolvent,
///   alpha(w) = Re Tr[X_tot (i w - L + P)^{-1} (X_tot rho_ss - rho_ss Tr[X_tot rho_ss])] / D,
/// where P = |rho_ss>><<I| deflates the stationary mode.
AbsorptionSpectrum spectrum_resolvent(const QubitNetworkSpec& spec, double signal,
                                      const std::vector<double>& omega_grid);

double resonant_absorption(const QubitNetworkSpec& spec, double signal);

double average_absorption(const QubitNetworkSpec& spec, const std::vector<double>& signal_grid);

}  // namespace qrc
