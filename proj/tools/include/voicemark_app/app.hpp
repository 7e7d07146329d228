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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voicemark/audio_buffer.hpp"
#include "voicemark/audio_io.hpp"
#include "voicemark/dsp.hpp"
#include "voicemark/error.hpp"
#include "voicemark/watermark.hpp"

namespace voicemark::app {

namespace fs = std::filesystem;

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitProtocol = 4;
inline constexpr int kExitUnavailable = 5;

int exit_code(ErrorKind kind) noexcept;

/// "LO:HI" in Hz.
dsp::Band parse_band(const std::string& text);
/// "WxH".
std::pair<std::size_t, std::size_t> parse_geometry(const std::string& text);

/// Reads a WAV and converts it to the 16 kHz pipeline rate.
AudioBuffer load_pipeline_audio(const fs::path& path);

struct NamedAudio {
  std::string name;  // file name relative to the corpus directory
  AudioBuffer audio;
};

/// Every *.wav directly inside dir, sorted by name, at 16 kHz. Throws
/// kIo for a missing directory and kInvalidArgument for an empty one.
std::vector<NamedAudio> load_corpus(const fs::path& dir);

// ---- single-file commands ------------------------------------------------

struct AnonymizeOptions {
  fs::path input{};
  fs::path output{};
  double alpha = 0.8;
  SampleFormat format = SampleFormat::kPcm16;
};
int cmd_anonymize(const AnonymizeOptions& opt, std::ostream& out, std::ostream& err);

struct EmbedOptions {
  fs::path input{};
  fs::path output{};
  std::optional<fs::path> bits_file{};
  std::optional<fs::path> image_file{};
  std::optional<fs::path> config_file{};
  std::optional<int> payload_bps{};
  std::optional<double> alpha0{};
  std::optional<double> alpha1{};
  SampleFormat format = SampleFormat::kPcm16;
};
int cmd_embed(const EmbedOptions& opt, std::ostream& out, std::ostream& err);

struct DetectOptions {
  fs::path input{};
  std::optional<fs::path> config_file{};
  std::optional<int> payload_bps{};
  std::optional<double> theta{};
  std::optional<std::size_t> num_bits{};  // capacity when unset
  std::optional<dsp::Band> band{};
  std::optional<dsp::Band> reference{};
  std::optional<fs::path> report_file{};
  std::optional<std::pair<std::size_t, std::size_t>> image{};  // WxH
  std::optional<fs::path> image_out{};
};
int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err);

struct AttackOptions {
  fs::path input{};
  fs::path output{};
  std::string attack = "normal";
  std::optional<double> snr_db{};
  std::uint64_t seed = 0;
  std::optional<std::string> command{};  // overrides the codec template
  SampleFormat format = SampleFormat::kPcm16;
};
int cmd_attack(const AttackOptions& opt, std::ostream& out, std::ostream& err);

// ---- corpus commands -----------------------------------------------------

/// The two anonymized carriers of one utterance. They depend on the alphas,
/// band-pass and level only, not on payload or detection band.
struct CarrierPair {
  AudioBuffer c0;
  AudioBuffer c1;
};
CarrierPair make_carriers(const AudioBuffer& audio, const watermark::WatermarkConfig& config);

struct CorpusCalibration {
  watermark::WatermarkConfig config;  // base config with theta (and bands) filled in
  watermark::Calibration calibration;
  std::size_t frames0 = 0;
  std::size_t frames1 = 0;
};

/// Embeds seeded random bits into every carrier pair at base.payload_bps,
/// pools the per-frame statistics by bit value and picks theta; with search,
/// also picks band and reference.
CorpusCalibration calibrate_carriers(const std::vector<CarrierPair>& carriers,
                                     const watermark::WatermarkConfig& base, bool search,
                                     std::uint64_t seed = 0);

struct CalibrateOptions {
  fs::path corpus_dir{};
  std::optional<fs::path> config_file{};
  int payload_bps = 4;
  std::optional<dsp::Band> band{};
  std::optional<dsp::Band> reference{};
  bool search_bands = false;
  std::uint64_t seed = 0;
  fs::path output{};
};
int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err);

struct EvaluateSettings {
  std::vector<int> payloads{2, 4, 8, 16, 32};
  std::vector<std::string> attacks;  // standard_attack_names() when empty
  std::uint64_t seed = 0;
  watermark::WatermarkConfig base;
  /// Fixed per-payload configs; payloads without an entry use the base
  /// config with the default theta for that payload.
  std::map<int, watermark::WatermarkConfig> configs;
  std::string theta_source = "default";
};

struct Record {
  std::string file;
  int payload_bps = 0;
  std::string attack;
  bool skipped = false;
  std::size_t bits = 0;
  double ber = 0.0;
  std::optional<double> far{}, frr{}, f1{}, macro_f1{};
  double stat_mean = 0.0;
  double stat_min = 0.0;
  double stat_max = 0.0;
};

struct Aggregate {
  int payload_bps = 0;
  std::string attack;
  std::size_t records = 0;  // scored (not skipped) records
  double ber = 0.0;
  // Means over the records where the rate is defined.
  std::optional<double> far{}, frr{}, f1{}, macro_f1{};
};

struct RunReport {
  std::string version;
  std::uint64_t seed = 0;
  std::vector<std::string> files;
  std::vector<int> payloads;
  std::vector<std::string> attacks{};
  std::string theta_source;
  std::map<int, watermark::WatermarkConfig> configs;
  std::vector<Record> records;  // sorted by file, payload, attack order
  std::vector<Aggregate> aggregates;
  std::vector<std::string> skipped;  // attacks skipped for lack of a codec

  const Aggregate* find(int payload_bps, const std::string& attack) const;
  std::string to_text() const;
};

/// Bit and noise seeds per (utterance, payload, stream): splitmix64 chained
/// over the run seed, so results never depend on processing order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t utterance, std::uint64_t payload,
                          std::uint64_t stream);

RunReport evaluate(const std::vector<NamedAudio>& corpus, const EvaluateSettings& settings,
                   std::ostream* progress = nullptr);

/// Recomputes aggregates from records (the report invariant).
std::vector<Aggregate> aggregate(const std::vector<Record>& records,
                                 const std::vector<int>& payloads,
                                 const std::vector<std::string>& attacks);

struct EvaluateOptions {
  fs::path corpus_dir{};
  std::vector<int> payloads{2, 4, 8, 16, 32};
  std::vector<std::string> attacks{};
  std::uint64_t seed = 0;
  std::optional<fs::path> config_file{};
  std::optional<fs::path> calibration_dir{};  // calibrate theta per payload first
  bool search_bands = false;
  bool require_codecs = false;
  fs::path report_file{};
  bool verbose = false;
};
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace voicemark::app
