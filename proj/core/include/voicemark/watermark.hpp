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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voicemark/audio_buffer.hpp"
#include "voicemark/dsp.hpp"

namespace voicemark::watermark {

/// Sequence of {0, 1}. Construction validates the alphabet.
class BitStream {
 public:
  BitStream() = default;
  explicit BitStream(std::vector<std::uint8_t> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  BitStream prefix(std::size_t n) const;

  std::string to_string() const;
  static BitStream parse(std::string_view text);  // '0'/'1', whitespace ignored

  friend bool operator==(const BitStream&, const BitStream&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

BitStream read_bitstream(const std::filesystem::path& path);
void write_bitstream(const BitStream& bits, const std::filesystem::path& path);

/// Seeded uniform random bits (std::mt19937_64).
BitStream random_bits(std::size_t n, std::uint64_t seed);

struct WatermarkConfig {
  double alpha0 = 0.6;
  double alpha1 = 0.8;
  int payload_bps = 4;
  double theta = 0.09;
  dsp::Band band{125.0, 1000.0};  // detection numerator band
  dsp::Band bpf{125.0, 4000.0};   // embedding/detection band-pass edges
  std::optional<dsp::Band> reference;  // statistic denominator; bpf when unset
  double target_dbfs = -3.0;
  std::size_t bpf_taps = dsp::kDefaultBandpassTaps;

  /// Published per-payload thresholds (2, 4, 8, 16, 32 bps); nullopt elsewhere.
  static std::optional<double> default_theta(int payload_bps);
  /// Defaults with theta taken from default_theta when available.
  static WatermarkConfig for_payload(int payload_bps);

  dsp::Band reference_band() const { return reference.value_or(bpf); }
  std::size_t frame_len(int fs) const;
  std::size_t capacity(const AudioBuffer& buffer) const;
  void validate() const;
};

/// key=value text form: alpha0, alpha1, payload_bps, theta, band_low_hz,
/// band_high_hz, target_dbfs, plus the optional bpf_low_hz, bpf_high_hz,
/// ref_low_hz and ref_high_hz. Unknown keys are rejected.
std::string format_config(const WatermarkConfig& config);
WatermarkConfig parse_config(std::string_view text);
WatermarkConfig load_config(const std::filesystem::path& path);
void save_config(const WatermarkConfig& config,
                 const std::filesystem::path& path);

/// BPF(normalize(anonymize(x, alpha))), the stream carrying one bit value.
AudioBuffer bit_stream_carrier(const AudioBuffer& buffer, double alpha,
                               const WatermarkConfig& config);

/// Frame-wise switch between the alpha0 and alpha1 carriers. Frames past the
/// bit-stream come from the alpha0 carrier.
AudioBuffer embed(const AudioBuffer& buffer, const BitStream& bits,
                  const WatermarkConfig& config);

/// Same switch given precomputed carriers (both must match in length).
AudioBuffer embed_from_carriers(const AudioBuffer& carrier0,
                                const AudioBuffer& carrier1,
                                const BitStream& bits,
                                const WatermarkConfig& config);

struct DetectionReport {
  BitStream bits;
  std::vector<double> statistics;  // per-frame band-power ratio
  double theta = 0.0;
  std::size_t frame_len = 0;

  std::string to_text() const;
};

/// Power spectra of the first num_frames watermark frames after band-pass
/// filtering. FFT size is the next power of two at or above the frame length.
std::vector<dsp::PowerSpectrum> frame_spectra(const AudioBuffer& buffer,
                                              const WatermarkConfig& config,
                                              std::size_t num_frames);

/// Per-frame statistic: energy in config.band over energy in the reference
/// band (config.bpf unless overridden). Reads only the given buffer.
std::vector<double> frame_statistics(const AudioBuffer& buffer,
                                     const WatermarkConfig& config,
                                     std::size_t num_frames);

/// Blind detection: bit k is 1 when statistic(k) > theta.
DetectionReport detect(const AudioBuffer& buffer,
                       const WatermarkConfig& config, std::size_t num_bits);

struct Calibration {
  double theta = 0.0;
  double balanced_error = 0.0;  // (FAR + FRR) / 2 at theta
  bool separable = false;       // max(stat0) < min(stat1)
};

/// Chooses theta minimizing (FAR + FRR) / 2 among midpoints of the pooled
/// sorted statistics. Returns the gap midpoint for separable classes and the
/// pooled median (separable = false) when no threshold beats chance.
Calibration calibrate_threshold(std::span<const double> stat0,
                                std::span<const double> stat1);

/// Balanced error of the rule "stat > theta means 1".
double balanced_error(std::span<const double> stat0,
                      std::span<const double> stat1, double theta);

struct BandSearch {
  dsp::Band band;
  dsp::Band reference;
  Calibration calibration;
};

/// Grid search over numerator and reference bands with edges drawn from
/// edges_hz, calibrating theta for each pair and keeping the lowest balanced
/// error (first in grid order on ties). class0/class1 hold frame spectra of
/// the alpha0 and alpha1 carriers.
BandSearch search_bands(std::span<const dsp::PowerSpectrum> class0,
                        std::span<const dsp::PowerSpectrum> class1,
                        std::span<const double> edges_hz);

/// Default edge grid for search_bands, 125 Hz .. 4 kHz.
std::vector<double> default_band_edges();

struct BitImage {
  BitStream bits;  // row-major, black = 1
  std::size_t width = 0;
  std::size_t height = 0;
};

/// Netpbm bitmap, plain (P1) or raw (P4).
BitImage parse_pbm(std::string_view data);
BitImage bits_from_image(const std::filesystem::path& path);

/// Plain P1 when binary is false, packed P4 otherwise.
std::string format_pbm(const BitStream& bits, std::size_t width,
                       std::size_t height, bool binary = false);
void image_from_bits(const BitStream& bits, std::size_t width,
                     std::size_t height, const std::filesystem::path& path,
                     bool binary = false);

}  // namespace voicemark::watermark
