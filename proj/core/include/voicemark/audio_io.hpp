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
#include <span>
#include <vector>

#include "voicemark/audio_buffer.hpp"

namespace voicemark {

enum class SampleFormat { kPcm16, kPcm24, kFloat32 };

struct WriteReport {
  std::size_t clipped = 0;  // samples with |x| > 1 that were clipped
};

/// Decodes a RIFF/WAVE image. Accepts PCM 8/16/24/32-bit integer and IEEE
/// float 32/64, including WAVE_FORMAT_EXTENSIBLE. Channels are averaged.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

/// Encodes a mono WAV image. Out-of-range samples are clipped and counted.
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer,
                                     SampleFormat format,
                                     WriteReport* report = nullptr);

AudioBuffer read_wav(const std::filesystem::path& path);
WriteReport write_wav(const AudioBuffer& buffer,
                      const std::filesystem::path& path,
                      SampleFormat format = SampleFormat::kPcm16);

// 16 -> kPcm16, 24 -> kPcm24, 32 -> kFloat32; anything else throws.
SampleFormat sample_format_from_bits(int bits);

}  // namespace voicemark
