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
#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>

#include "voicemark/dsp.hpp"
#include "voicemark/error.hpp"

namespace voicemark::dsp {

namespace {

constexpr double kKaiserBeta = 8.0;
constexpr double kCutoffFraction = 0.45;
// Half the kernel length, counted in samples of the lower of the two rates.
constexpr int kHalfTapsAtLowRate = 32;
// Above this many phases the kernel is evaluated on the fly.
constexpr std::int64_t kMaxTabulatedPhases = 4096;

class Kernel {
 public:
  Kernel(int fs_in, int fs_out) {
    const double ratio = static_cast<double>(fs_in) / fs_out;
    half_width_ = static_cast<int>(std::ceil(kHalfTapsAtLowRate * std::max(1.0, ratio)));
    fcut_ = kCutoffFraction * std::min(fs_in, fs_out) / fs_in;
    i0_beta_ = std::cyl_bessel_i(0.0, kKaiserBeta);
  }

  int half_width() const { return half_width_; }

  // tau is the distance, in input samples, from the tap to the output instant.
  double operator()(double tau) const {
    const double x = tau / half_width_;
    if (std::abs(x) >= 1.0) return 0.0;
    const double w = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - x * x)) / i0_beta_;
    const double arg = 2.0 * fcut_ * tau;
    const double s = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    return 2.0 * fcut_ * s * w;
  }

 private:
  int half_width_ = 0;
  double fcut_ = 0.0;
  double i0_beta_ = 1.0;
};

}  // namespace

AudioBuffer resample(const AudioBuffer& buffer, int new_fs) {
  if (new_fs <= 0 || buffer.sample_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "sample rates must be positive");
  }
  if (new_fs == buffer.sample_rate) return buffer;

  const std::int64_t g = std::gcd(buffer.sample_rate, new_fs);
  const std::int64_t up = new_fs / g;                // L
  const std::int64_t down = buffer.sample_rate / g;  // M
  const auto n_in = static_cast<std::int64_t>(buffer.size());
  const auto n_out = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n_in) * new_fs / buffer.sample_rate));

  const Kernel kernel(buffer.sample_rate, new_fs);
  const int hw = kernel.half_width();
  const int taps = 2 * hw;

  // Phase p covers output instants at fractional input offset p / L. Tap j of
  // that phase multiplies x[n0 - hw + 1 + j].
  const bool tabulate = up <= kMaxTabulatedPhases;
  std::vector<double> table;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up * taps));
    for (std::int64_t p = 0; p < up; ++p) {
      const double frac = static_cast<double>(p) / static_cast<double>(up);
      for (int j = 0; j < taps; ++j) {
        table[static_cast<std::size_t>(p * taps + j)] = kernel(frac + hw - 1 - j);
      }
    }
  }

  AudioBuffer out;
  out.sample_rate = new_fs;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);
  for (std::int64_t m = 0; m < n_out; ++m) {
    const std::int64_t pos = m * down;
    const std::int64_t n0 = pos / up;
    const std::int64_t phase = pos % up;
    const double frac = static_cast<double>(phase) / static_cast<double>(up);
    double acc = 0.0;
    for (int j = 0; j < taps; ++j) {
      const std::int64_t k = n0 - hw + 1 + j;
      if (k < 0 || k >= n_in) continue;
      const double h = tabulate ? table[static_cast<std::size_t>(phase * taps + j)]
                                : kernel(frac + hw - 1 - j);
      acc += h * buffer.samples[static_cast<std::size_t>(k)];
    }
    out.samples[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

}  // namespace voicemark::dsp
