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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qrc/pipeline.hpp"

namespace qrc {

inline constexpr int kMaxDegree = 3;

class ZeroVariance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Legendre polynomial P_degree on [-1, 1].
double legendre(int degree, double u);

/// P_degree rescaled to inputs on [0, 1]: P_degree(2x - 1).
double shifted_legendre(int degree, double x);

/// Delayed polynomial target; entries before `first_valid` (= delay) are NaN.
struct DelayedTarget {
  RealVector values;
  std::size_t first_valid = 0;
};

DelayedTarget legendre_target(const InputSequence& inputs, int degree, std::size_t delay);

/// Squared Pearson correlation. Throws ZeroVariance when either side is
/// constant.
double capacity(const RealVector& prediction, const RealVector& target);

/// capacity() with ZeroVariance mapped to 0.
double capacity_or_zero(const RealVector& prediction, const RealVector& target);

/// Largest spurious capacity over `repetitions` fits against independent
/// random polynomial targets (one for training, a fresh one for evaluation).
double noise_threshold(const StateCollectMatrix& x_train, const StateCollectMatrix& x_test,
                       int degree, std::size_t repetitions, Rng& rng);

struct CapacityRecord {
  int degree = 1;
  std::size_t delay = 0;
  double capacity = 0.0;
  bool above_threshold = false;
};

struct TotalCapacity {
  double total = 0.0;
  /// Number of leading delays retained (delays 0 .. tau_max - 1).
  std::size_t tau_max = 0;
  std::vector<CapacityRecord> records;
};

/// Scans delays 0, 1, ... up to `delay_cap` and sums capacities until the
/// first one falls below `threshold`.
TotalCapacity total_capacity(const StateCollectMatrix& x_train, const StateCollectMatrix& x_test,
                             const InputSequence& inputs_train, const InputSequence& inputs_test,
                             int degree, double threshold, std::size_t delay_cap);

struct StmcConfig {
  std::size_t multiplexing = 4;
  ShotModel shots = ShotModel::finite(1'000'000);
  std::size_t train_len = 1000;
  std::size_t test_len = 1000;
  std::vector<int> degrees = {1, 2, 3};
  std::size_t delay_cap = 50;
  std::size_t threshold_repetitions = 500;
  std::uint64_t root_seed = 0;
};

struct DegreeCapacity {
  int degree = 1;
  double total = 0.0;
  double threshold = 0.0;
  std::size_t tau_max = 0;
  std::vector<CapacityRecord> records;
};

/// Memory capacities of one reservoir at one decay rate.
struct StmcCell {
  double gamma = 0.0;
  std::vector<DegreeCapacity> degrees;
  std::optional<std::string> error;
};

struct CapacityCurve {
  std::vector<double> gamma_grid;
  std::vector<StmcCell> cells;  // parallel to gamma_grid
};

/// Derives an independent stream seed from a root seed and a key path.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t reservoir, std::string_view tag,
                          std::uint64_t index = 0);

/// One (reservoir, gamma) cell. Input sequences depend only on the reservoir
/// index, so all gamma points of a reservoir see the same inputs.
StmcCell stmc_cell(const QubitNetworkSpec& spec, std::size_t reservoir_index,
                   std::size_t gamma_index, const StmcConfig& config);

std::vector<CapacityCurve> stmc_sweep(const std::vector<QubitNetworkSpec>& ensemble,
                                      const std::vector<double>& gamma_grid,
                                      const StmcConfig& config);

}  // namespace qrc
