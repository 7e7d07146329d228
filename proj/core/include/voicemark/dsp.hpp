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

#include "voicemark/audio_buffer.hpp"

namespace voicemark::dsp {

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

struct Frame {
  std::vector<double> samples;
  std::size_t index = 0;  // ordinal k
  std::size_t start = 0;  // offset of samples[0] in the source
};

/// Splits into ceil(N / frame_len) equal frames; the last one is zero-padded.
std::vector<Frame> segment(std::span<const double> samples,
                           std::size_t frame_len);
std::vector<Frame> segment(const AudioBuffer& buffer, std::size_t frame_len);

/// Linear-phase FIR. Odd length, symmetric taps.
struct FirFilter {
  std::vector<double> taps;
  std::size_t group_delay() const noexcept {
    return taps.empty() ? 0 : (taps.size() - 1) / 2;
  }
};

inline constexpr std::size_t kDefaultBandpassTaps = 513;

/// Hamming-windowed sinc band-pass, normalized to unit gain at the geometric
/// band centre.
FirFilter design_bandpass(double low_hz, double high_hz, double fs,
                          std::size_t num_taps = kDefaultBandpassTaps);

/// Complex frequency response magnitude of the taps at freq_hz.
double fir_magnitude(const FirFilter& filter, double freq_hz, double fs);

/// Zero-delay filtering: output[n] = sum_k taps[k] * x[n + delay - k].
std::vector<double> apply_fir(std::span<const double> samples,
                              const FirFilter& filter);
AudioBuffer apply_fir(const AudioBuffer& buffer, const FirFilter& filter);

double peak_abs(std::span<const double> samples) noexcept;

/// Scales so that max |x| == 10^(target_dbfs / 20). Throws on all-zero input.
AudioBuffer peak_normalize(const AudioBuffer& buffer, double target_dbfs);

struct PowerSpectrum {
  std::vector<double> values;  // |X(k)|^2, k = 0 .. fft_size/2
  double bin_hz = 0.0;
  double sample_rate = 0.0;
  std::size_t fft_size = 0;
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

/// One-sided squared magnitude of the zero-padded frame.
PowerSpectrum power_spectrum(std::span<const double> frame,
                             std::size_t fft_size, double fs);

/// Sum of bins whose centre lies in [band.low_hz, band.high_hz].
double band_energy(const PowerSpectrum& spectrum, Band band);

/// band_energy(band) / total energy; 0 when the spectrum is silent.
double band_power(const PowerSpectrum& spectrum, double low_hz,
                  double high_hz);

/// band_energy(band) / energy of (band union reference), so the ratio stays
/// in [0, 1] for any pair; equals band_energy(band) / band_energy(reference)
/// when the reference contains the band. 0 when both are silent.
double band_ratio(const PowerSpectrum& spectrum, Band band, Band reference);

/// Kaiser-windowed sinc polyphase resampler. Output length is
/// round(N * new_fs / fs); identical copy when new_fs == fs.
AudioBuffer resample(const AudioBuffer& buffer, int new_fs);

}  // namespace voicemark::dsp
