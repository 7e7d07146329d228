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
#include "voicemark/watermark.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "voicemark/dsp.hpp"
#include "voicemark/error.hpp"
#include "voicemark/mcadams.hpp"

namespace voicemark::watermark {

BitStream::BitStream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw Error(ErrorKind::kInvalidArgument, "bit values must be 0 or 1");
  }
}

BitStream BitStream::prefix(std::size_t n) const {
  n = std::min(n, bits_.size());
  return BitStream(std::vector<std::uint8_t>(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(n)));
}

std::string BitStream::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

BitStream BitStream::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  for (char ch : text) {
    if (ch == '0' || ch == '1') {
      bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      throw Error(ErrorKind::kFormat, std::string("invalid character in bit-stream: '") + ch + "'");
    }
  }
  return BitStream(std::move(bits));
}

BitStream read_bitstream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return BitStream::parse(ss.str());
}

void write_bitstream(const BitStream& bits, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << bits.to_string() << '\n';
}

BitStream random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return BitStream(std::move(bits));
}

AudioBuffer bit_stream_carrier(const AudioBuffer& buffer, double alpha,
                               const WatermarkConfig& config) {
  mcadams::McAdamsParams params;
  params.alpha = alpha;
  AudioBuffer anon = mcadams::anonymize(buffer, params);
  if (dsp::peak_abs(anon.view()) > 0.0) anon = dsp::peak_normalize(anon, config.target_dbfs);
  if (anon.empty()) return anon;
  const auto bpf = dsp::design_bandpass(config.bpf.low_hz, config.bpf.high_hz,
                                        anon.sample_rate, config.bpf_taps);
  return dsp::apply_fir(anon, bpf);
}

namespace {

void require_pipeline_rate(const AudioBuffer& buffer) {
  if (buffer.sample_rate != kPipelineRate) {
    throw Error(ErrorKind::kInvalidArgument,
                "watermarking expects 16 kHz audio, got " + std::to_string(buffer.sample_rate) +
                    " Hz (resample first)");
  }
}

}  // namespace

AudioBuffer embed_from_carriers(const AudioBuffer& carrier0, const AudioBuffer& carrier1,
                                const BitStream& bits, const WatermarkConfig& config) {
  config.validate();
  require_pipeline_rate(carrier0);
  if (carrier0.size() != carrier1.size() || carrier0.sample_rate != carrier1.sample_rate) {
    throw Error(ErrorKind::kInvalidArgument, "carrier streams differ in length or rate");
  }
  const std::size_t capacity = config.capacity(carrier0);
  if (bits.size() > capacity) {
    throw Error(ErrorKind::kCapacity, std::to_string(bits.size()) + " bits exceed capacity of " +
                                          std::to_string(capacity) + " bits");
  }
  const std::size_t frame_len = config.frame_len(carrier0.sample_rate);
  AudioBuffer out = carrier0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (!bits[k]) continue;
    const std::size_t begin = k * frame_len;
    const std::size_t end = std::min(begin + frame_len, out.size());
    std::copy(carrier1.samples.begin() + static_cast<std::ptrdiff_t>(begin),
              carrier1.samples.begin() + static_cast<std::ptrdiff_t>(end),
              out.samples.begin() + static_cast<std::ptrdiff_t>(begin));
  }
  return out;
}

AudioBuffer embed(const AudioBuffer& buffer, const BitStream& bits,
                  const WatermarkConfig& config) {
  config.validate();
  buffer.validate();
  require_pipeline_rate(buffer);
  const std::size_t capacity = config.capacity(buffer);
  if (bits.size() > capacity) {
    throw Error(ErrorKind::kCapacity, std::to_string(bits.size()) + " bits exceed capacity of " +
                                          std::to_string(capacity) + " bits");
  }
  const auto carrier0 = bit_stream_carrier(buffer, config.alpha0, config);
  const auto carrier1 = bit_stream_carrier(buffer, config.alpha1, config);
  return embed_from_carriers(carrier0, carrier1, bits, config);
}

std::vector<dsp::PowerSpectrum> frame_spectra(const AudioBuffer& buffer,
                                              const WatermarkConfig& config,
                                              std::size_t num_frames) {
  config.validate();
  std::vector<dsp::PowerSpectrum> spectra;
  if (num_frames == 0) return spectra;
  const std::size_t frame_len = config.frame_len(buffer.sample_rate);
  const auto bpf = dsp::design_bandpass(config.bpf.low_hz, config.bpf.high_hz,
                                        buffer.sample_rate, config.bpf_taps);
  const auto filtered = dsp::apply_fir(buffer.view(), bpf);
  const std::size_t fft_size = dsp::next_power_of_two(frame_len);
  spectra.reserve(num_frames);
  std::vector<double> frame(frame_len);
  for (std::size_t k = 0; k < num_frames; ++k) {
    std::fill(frame.begin(), frame.end(), 0.0);
    const std::size_t begin = k * frame_len;
    if (begin < filtered.size()) {
      const std::size_t n = std::min(frame_len, filtered.size() - begin);
      std::copy_n(filtered.begin() + static_cast<std::ptrdiff_t>(begin), n, frame.begin());
    }
    spectra.push_back(dsp::power_spectrum(frame, fft_size, buffer.sample_rate));
  }
  return spectra;
}

std::vector<double> frame_statistics(const AudioBuffer& buffer, const WatermarkConfig& config,
                                     std::size_t num_frames) {
  std::vector<double> stats;
  for (const auto& spectrum : frame_spectra(buffer, config, num_frames)) {
    stats.push_back(dsp::band_ratio(spectrum, config.band, config.reference_band()));
  }
  return stats;
}

DetectionReport detect(const AudioBuffer& buffer, const WatermarkConfig& config,
                       std::size_t num_bits) {
  config.validate();
  buffer.validate();
  require_pipeline_rate(buffer);
  const std::size_t capacity = config.capacity(buffer);
  if (num_bits > capacity) {
    throw Error(ErrorKind::kProtocol, "requested " + std::to_string(num_bits) +
                                          " bits but the signal carries at most " +
                                          std::to_string(capacity));
  }
  DetectionReport report;
  report.theta = config.theta;
  report.frame_len = config.frame_len(buffer.sample_rate);
  report.statistics = frame_statistics(buffer, config, num_bits);
  std::vector<std::uint8_t> bits(num_bits);
  for (std::size_t k = 0; k < num_bits; ++k) {
    bits[k] = report.statistics[k] > config.theta ? 1 : 0;
  }
  report.bits = BitStream(std::move(bits));
  return report;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string DetectionReport::to_text() const {
  std::ostringstream out;
  out << "# voicemark detection report\n";
  out << "frame_len = " << frame_len << '\n';
  out << "theta = " << fmt_double(theta) << '\n';
  out << "num_bits = " << bits.size() << '\n';
  out << "bits = " << bits.to_string() << '\n';
  out << "[frames]\n";
  for (std::size_t k = 0; k < statistics.size(); ++k) {
    out << "frame." << k << " = " << fmt_double(statistics[k]) << ' '
        << static_cast<int>(bits[k]) << '\n';
  }
  return out.str();
}

double balanced_error(std::span<const double> stat0, std::span<const double> stat1,
                      double theta) {
  if (stat0.empty() || stat1.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "both classes need at least one statistic");
  }
  const auto fa = std::count_if(stat0.begin(), stat0.end(), [&](double s) { return s > theta; });
  const auto fr = std::count_if(stat1.begin(), stat1.end(), [&](double s) { return s <= theta; });
  return 0.5 * (static_cast<double>(fa) / static_cast<double>(stat0.size()) +
                static_cast<double>(fr) / static_cast<double>(stat1.size()));
}

Calibration calibrate_threshold(std::span<const double> stat0, std::span<const double> stat1) {
  if (stat0.empty() || stat1.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "calibration needs statistics for both bit values");
  }
  std::vector<double> s0(stat0.begin(), stat0.end());
  std::vector<double> s1(stat1.begin(), stat1.end());
  std::sort(s0.begin(), s0.end());
  std::sort(s1.begin(), s1.end());

  Calibration result;
  if (s0.back() < s1.front()) {
    result.theta = 0.5 * (s0.back() + s1.front());
    result.balanced_error = 0.0;
    result.separable = true;
    return result;
  }

  std::vector<double> pooled;
  pooled.reserve(s0.size() + s1.size());
  std::merge(s0.begin(), s0.end(), s1.begin(), s1.end(), std::back_inserter(pooled));

  auto error_at = [&](double theta) {
    const auto above0 = s0.end() - std::upper_bound(s0.begin(), s0.end(), theta);
    const auto below1 = std::upper_bound(s1.begin(), s1.end(), theta) - s1.begin();
    return 0.5 * (static_cast<double>(above0) / static_cast<double>(s0.size()) +
                  static_cast<double>(below1) / static_cast<double>(s1.size()));
  };

  std::vector<double> candidates;
  for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
    if (pooled[i] < pooled[i + 1]) candidates.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  }
  double best = 1.0;
  std::vector<double> best_thetas;
  for (double theta : candidates) {
    const double e = error_at(theta);
    if (e < best - 1e-15) {
      best = e;
      best_thetas.assign(1, theta);
    } else if (std::abs(e - best) <= 1e-15) {
      best_thetas.push_back(theta);
    }
  }

  if (best_thetas.empty() || best >= 0.5 - 1e-12) {
    const std::size_t n = pooled.size();
    result.theta = n % 2 ? pooled[n / 2] : 0.5 * (pooled[n / 2 - 1] + pooled[n / 2]);
    result.balanced_error = error_at(result.theta);
    result.separable = false;
    return result;
  }
  result.theta = best_thetas[best_thetas.size() / 2];
  result.balanced_error = best;
  result.separable = false;
  return result;
}

std::vector<double> default_band_edges() {
  return {125, 200, 300, 400, 500, 600, 700, 800, 1000, 1200, 1500, 2000, 2500, 3000, 4000};
}

namespace {

// Cumulative bin energies so any band sum is two lookups.
struct CumulativeSpectrum {
  std::vector<double> prefix;  // prefix[k] = sum of values[0..k-1]
  double bin_hz = 0.0;

  explicit CumulativeSpectrum(const dsp::PowerSpectrum& s) : bin_hz(s.bin_hz) {
    prefix.resize(s.values.size() + 1, 0.0);
    for (std::size_t k = 0; k < s.values.size(); ++k) prefix[k + 1] = prefix[k] + s.values[k];
  }

  // Same inclusion rule as dsp::band_energy: bin centre in [low, high].
  double energy(dsp::Band band) const {
    const auto n = static_cast<double>(prefix.size() - 1);
    const double first = std::clamp(std::ceil(band.low_hz / bin_hz - 1e-9), 0.0, n);
    const double last = std::clamp(std::floor(band.high_hz / bin_hz + 1e-9) + 1.0, 0.0, n);
    if (last <= first) return 0.0;
    return prefix[static_cast<std::size_t>(last)] - prefix[static_cast<std::size_t>(first)];
  }
};

}  // namespace

BandSearch search_bands(std::span<const dsp::PowerSpectrum> class0,
                        std::span<const dsp::PowerSpectrum> class1,
                        std::span<const double> edges_hz) {
  if (class0.empty() || class1.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "band search needs frames of both classes");
  }
  if (edges_hz.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "band search needs at least two edges");
  }
  std::vector<CumulativeSpectrum> c0(class0.begin(), class0.end());
  std::vector<CumulativeSpectrum> c1(class1.begin(), class1.end());
  std::vector<double> s0(c0.size()), s1(c1.size());

  BandSearch best;
  bool have = false;
  for (std::size_t a = 0; a < edges_hz.size(); ++a) {
    for (std::size_t b = a + 1; b < edges_hz.size(); ++b) {
      const dsp::Band band{edges_hz[a], edges_hz[b]};
      for (std::size_t c = 0; c < edges_hz.size(); ++c) {
        for (std::size_t d = c + 1; d < edges_hz.size(); ++d) {
          const dsp::Band ref{edges_hz[c], edges_hz[d]};
          if (a == c && b == d) continue;  // ratio would be constant
          const double lo = std::max(band.low_hz, ref.low_hz);
          const double hi = std::min(band.high_hz, ref.high_hz);
          auto fill = [&](const std::vector<CumulativeSpectrum>& src, std::vector<double>& dst) {
            for (std::size_t i = 0; i < src.size(); ++i) {
              const double part = src[i].energy(band);
              const double overlap = lo <= hi ? src[i].energy({lo, hi}) : 0.0;
              const double whole = part + src[i].energy(ref) - overlap;
              dst[i] = whole > 0.0 ? part / whole : 0.0;
            }
          };
          fill(c0, s0);
          fill(c1, s1);
          const Calibration cal = calibrate_threshold(s0, s1);
          if (!have || cal.balanced_error < best.calibration.balanced_error - 1e-12) {
            best = {band, ref, cal};
            have = true;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace voicemark::watermark
