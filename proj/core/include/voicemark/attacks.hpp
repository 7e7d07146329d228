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
#include <limits>
#include <string>
#include <vector>

#include "voicemark/audio_buffer.hpp"

namespace voicemark::attacks {

enum class AttackKind { kNormal, kAwgn, kResample, kRequantize, kExternalCodec };

struct AttackSpec {
  AttackKind kind = AttackKind::kNormal;
  double snr_db = 40.0;            // kAwgn; +inf disables noise
  int intermediate_fs = 8000;      // kResample
  int bits = 8;                    // kRequantize
  std::string command;             // kExternalCodec, with {in} and {out}
  std::uint64_t seed = 0;          // kAwgn
  std::string label;               // display name, e.g. "resample-8"

  static AttackSpec normal();
  static AttackSpec awgn(double snr_db, std::uint64_t seed = 0);
  static AttackSpec resample(int intermediate_fs);
  static AttackSpec requantize(int bits);
  static AttackSpec external(std::string command, std::string label = "external");

  /// One of: normal, awgn, resample-8, resample-24, requant-8, requant-24,
  /// mp3, flv, g723.1.
  static AttackSpec named(const std::string& name);

  std::string name() const;
  void validate() const;
};

/// The nine robustness cases in their usual order.
std::vector<std::string> standard_attack_names();
/// Subset runnable without external binaries.
std::vector<std::string> native_attack_names();

/// Reference command templates for the codec cases. Binaries are looked up
/// in VOICEMARK_CODEC_DIR first, then PATH.
std::string reference_command(const std::string& name);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Output is 16 kHz with the input's length. kExternalCodec throws
/// ErrorKind::kUnavailable when the binary cannot be found.
AudioBuffer apply_attack(const AudioBuffer& buffer, const AttackSpec& spec);

/// Seeded zero-mean white Gaussian noise at the given whole-utterance SNR.
AudioBuffer awgn(const AudioBuffer& buffer, double snr_db, std::uint64_t seed);

/// Round trip through intermediate_fs and back to the source rate.
AudioBuffer resample_attack(const AudioBuffer& buffer, int intermediate_fs);

/// round(x * 2^(bits-1)) / 2^(bits-1), clipped to [-1, 1 - 2^-(bits-1)].
AudioBuffer requantize(const AudioBuffer& buffer, int bits);

/// Substitutes temporary WAV paths for {in}/{out}, runs through /bin/sh,
/// reads the result back at the source rate and length.
AudioBuffer external_codec(const AudioBuffer& buffer,
                           const std::string& command_template);

/// True if the first word of the command resolves to an executable.
bool command_available(const std::string& command_template);

double snr_db(const AudioBuffer& clean, const AudioBuffer& noisy);

}  // namespace voicemark::attacks
