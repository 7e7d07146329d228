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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "voicemark/audio_buffer.hpp"

namespace voicemark::mcadams {

using Complex = std::complex<double>;

/// Roots of A(z). Non-real poles appear in exact conjugate pairs.
struct PoleSet {
  std::vector<Complex> poles;
  std::size_t order() const noexcept { return poles.size(); }
};

/// Poles with |imag| at or below this are snapped onto the real axis.
inline constexpr double kRealPoleTolerance = 1e-12;

/// Roots of A(z) = 1 - sum c(i) z^-i from the eigenvalues of the balanced
/// companion matrix, conjugate-paired.
PoleSet find_poles(std::span<const double> coeffs);

/// Angle warp phi -> phi^alpha on the upper half-plane, mirrored below.
/// Real poles and poles whose warped angle reaches pi are left as they are.
PoleSet warp_poles(const PoleSet& poles, double alpha);

/// Expands prod(1 - p z^-1) back to c(1..M). Throws kNumerical if the
/// imaginary residue exceeds 1e-6 (broken conjugate symmetry).
std::vector<double> poles_to_coeffs(const PoleSet& poles);

struct McAdamsParams {
  double alpha = 0.8;
  double subframe_ms = 20.0;
  double hop_ms = 10.0;
  int order = 20;

  void validate() const;
};

struct AnonymizeStats {
  std::size_t subframes = 0;
  std::size_t silent = 0;          // passed through, r(0) below threshold
  std::size_t solver_failures = 0;  // passed through, root finding failed
};

/// Sub-frame LPC, pole warp, resynthesis from the original residual, and
/// Hann overlap-add. Output has the input's length.
AudioBuffer anonymize(const AudioBuffer& buffer, const McAdamsParams& params,
                      AnonymizeStats* stats = nullptr);

/// Single-frame transform (no windowing): returns the resynthesized frame or
/// the input unchanged when the frame is silent or the solver fails.
std::vector<double> transform_frame(std::span<const double> frame,
                                    double alpha, int order,
                                    AnonymizeStats* stats = nullptr);

}  // namespace voicemark::mcadams
