// Copyright 2026 The voicemark Authors
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
#include <span>
#include <vector>

namespace voicemark::lpc {

inline constexpr int kDefaultOrder = 20;
inline constexpr double kSilenceEnergy = 1e-12;

// Prediction polynomial convention throughout:
//   A(z) = 1 - sum_{i=1..M} c(i) z^-i,   s(n) = sum c(i) s(n-i) + e(n).

/// Biased autocorrelation r(0..max_lag).
std::vector<double> autocorrelate(std::span<const double> frame,
                                  std::size_t max_lag);

struct LevinsonResult {
  std::vector<double> coeffs;      // c(1..order), zero-padded past effective_order
  std::vector<double> reflection;  // k(1..effective_order)
  double gain = 0.0;               // final prediction-error energy
  int effective_order = 0;
  bool truncated = false;          // recursion stopped at |k| >= 1
};

/// Throws kNumerical when r(0) <= 0 and kInvalidArgument when order exceeds
/// the available lags.
LevinsonResult levinson_durbin(std::span<const double> r, int order);

/// e(n) = s(n) - sum c(i) s(n-i), zero initial state.
std::vector<double> inverse_filter(std::span<const double> frame,
                                   std::span<const double> coeffs);

/// s(n) = e(n) + sum c(i) s(n-i), zero initial state. Throws kNumerical
/// unless A(z) has all roots strictly inside the unit circle.
std::vector<double> synthesis_filter(std::span<const double> residual,
                                     std::span<const double> coeffs);

/// Skips the stability check. For callers that already know A(z) is stable.
std::vector<double> synthesis_filter_unchecked(std::span<const double> residual,
                                               std::span<const double> coeffs);

/// Step-down (backward Levinson) test: minimum phase iff every reflection
/// coefficient has magnitude < 1.
bool is_minimum_phase(std::span<const double> coeffs);

struct LpcModel {
  std::vector<double> coeffs;
  std::vector<double> residual;
  double gain = 0.0;
  int order() const noexcept { return static_cast<int>(coeffs.size()); }
};

/// Autocorrelation-method analysis of a raw (unwindowed) frame.
LpcModel analyze(std::span<const double> frame, int order = kDefaultOrder);

}  // namespace voicemark::lpc
