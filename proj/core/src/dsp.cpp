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
#include "voicemark/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "voicemark/error.hpp"

namespace voicemark::dsp {

std::vector<Frame> segment(std::span<const double> samples, std::size_t frame_len) {
  if (frame_len == 0) {
    throw Error(ErrorKind::kInvalidArgument, "frame length must be positive");
  }
  std::vector<Frame> frames;
  const std::size_t count = (samples.size() + frame_len - 1) / frame_len;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Frame f;
    f.index = k;
    f.start = k * frame_len;
    f.samples.assign(frame_len, 0.0);
    const std::size_t n = std::min(frame_len, samples.size() - f.start);
    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(f.start), n, f.samples.begin());
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<Frame> segment(const AudioBuffer& buffer, std::size_t frame_len) {
  return segment(buffer.view(), frame_len);
}

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

FirFilter design_bandpass(double low_hz, double high_hz, double fs, std::size_t num_taps) {
  if (!(fs > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < fs / 2.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "band edges must satisfy 0 < low < high < fs/2");
  }
  if (num_taps < 3 || num_taps % 2 == 0) {
    throw Error(ErrorKind::kInvalidArgument, "tap count must be odd and >= 3");
  }
  const double fl = low_hz / fs;
  const double fh = high_hz / fs;
  const auto centre = static_cast<double>(num_taps - 1) / 2.0;

  FirFilter filter;
  filter.taps.resize(num_taps);
  for (std::size_t i = 0; i < num_taps; ++i) {
    const double t = static_cast<double>(i) - centre;
    const double ideal = 2.0 * fh * sinc(2.0 * fh * t) - 2.0 * fl * sinc(2.0 * fl * t);
    const double window =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(num_taps - 1));
    filter.taps[i] = ideal * window;
  }
  // Enforce exact symmetry, then unit gain at the geometric centre.
  for (std::size_t i = 0; i < num_taps / 2; ++i) {
    const double m = 0.5 * (filter.taps[i] + filter.taps[num_taps - 1 - i]);
    filter.taps[i] = filter.taps[num_taps - 1 - i] = m;
  }
  const double gain = fir_magnitude(filter, std::sqrt(low_hz * high_hz), fs);
  for (double& t : filter.taps) t /= gain;
  return filter;
}

double fir_magnitude(const FirFilter& filter, double freq_hz, double fs) {
  const double w = 2.0 * std::numbers::pi * freq_hz / fs;
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < filter.taps.size(); ++i) {
    acc += filter.taps[i] * std::polar(1.0, -w * static_cast<double>(i));
  }
  return std::abs(acc);
}

std::vector<double> apply_fir(std::span<const double> samples, const FirFilter& filter) {
  if (samples.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot filter an empty buffer");
  }
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  const auto taps = static_cast<std::ptrdiff_t>(filter.taps.size());
  const auto delay = static_cast<std::ptrdiff_t>(filter.group_delay());
  std::vector<double> out(samples.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // y[i] = sum_k h[k] x[i + delay - k]
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, i + delay - (n - 1));
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(taps - 1, i + delay);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      acc += filter.taps[static_cast<std::size_t>(k)] *
             samples[static_cast<std::size_t>(i + delay - k)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

AudioBuffer apply_fir(const AudioBuffer& buffer, const FirFilter& filter) {
  return AudioBuffer(apply_fir(buffer.view(), filter), buffer.sample_rate);
}

double peak_abs(std::span<const double> samples) noexcept {
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  return peak;
}

AudioBuffer peak_normalize(const AudioBuffer& buffer, double target_dbfs) {
  const double peak = peak_abs(buffer.view());
  if (peak == 0.0) {
    throw Error(ErrorKind::kNumerical, "cannot peak-normalize an all-zero buffer");
  }
  const double scale = std::pow(10.0, target_dbfs / 20.0) / peak;
  AudioBuffer out = buffer;
  for (double& s : out.samples) s *= scale;
  return out;
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

PowerSpectrum power_spectrum(std::span<const double> frame, std::size_t fft_size, double fs) {
  if (!is_power_of_two(fft_size)) {
    throw Error(ErrorKind::kInvalidArgument,
                "FFT size must be a power of two, got " + std::to_string(fft_size));
  }
  if (frame.size() > fft_size) {
    throw Error(ErrorKind::kInvalidArgument, "frame longer than FFT size");
  }
  std::vector<double> padded(fft_size, 0.0);
  std::copy(frame.begin(), frame.end(), padded.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> bins;
  fft.fwd(bins, padded);

  PowerSpectrum spectrum;
  spectrum.fft_size = fft_size;
  spectrum.sample_rate = fs;
  spectrum.bin_hz = fs / static_cast<double>(fft_size);
  spectrum.values.resize(fft_size / 2 + 1);
  for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
    spectrum.values[k] = std::norm(bins[k]);
  }
  return spectrum;
}

namespace {

// Sum of bins whose centre lies in the closed interval [low, high].
double closed_energy(const PowerSpectrum& spectrum, double low, double high) {
  double acc = 0.0;
  for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
    const double f = static_cast<double>(k) * spectrum.bin_hz;
    if (f >= low && f <= high) acc += spectrum.values[k];
  }
  return acc;
}

void check_band(const PowerSpectrum& spectrum, Band band) {
  if (!(band.low_hz >= 0.0) || !(band.low_hz < band.high_hz) ||
      band.high_hz > spectrum.sample_rate / 2.0 + 1e-9) {
    throw Error(ErrorKind::kInvalidArgument, "band must satisfy 0 <= low < high <= fs/2");
  }
}

}  // namespace

double band_energy(const PowerSpectrum& spectrum, Band band) {
  check_band(spectrum, band);
  return closed_energy(spectrum, band.low_hz, band.high_hz);
}

double band_power(const PowerSpectrum& spectrum, double low_hz, double high_hz) {
  const double part = band_energy(spectrum, {low_hz, high_hz});
  double total = 0.0;
  for (double v : spectrum.values) total += v;
  return total > 0.0 ? part / total : 0.0;
}

double band_ratio(const PowerSpectrum& spectrum, Band band, Band reference) {
  check_band(spectrum, reference);
  const double part = band_energy(spectrum, band);
  const double lo = std::max(band.low_hz, reference.low_hz);
  const double hi = std::min(band.high_hz, reference.high_hz);
  const double overlap = lo <= hi ? closed_energy(spectrum, lo, hi) : 0.0;
  const double whole = part + closed_energy(spectrum, reference.low_hz, reference.high_hz) - overlap;
  return whole > 0.0 ? part / whole : 0.0;
}

}  // namespace voicemark::dsp
