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
#include "voicemark/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "voicemark/error.hpp"

namespace voicemark {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kUnavailable: return "unavailable";
  }
  return "unknown";
}

void AudioBuffer::validate() const {
  if (sample_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "sample rate must be positive, got " + std::to_string(sample_rate));
  }
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw Error(ErrorKind::kInvalidArgument, "buffer contains non-finite samples");
    }
  }
}

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  bool has(std::size_t n) const { return pos_ + n <= data_.size(); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  void skip(std::size_t n) { pos_ = std::min(data_.size(), pos_ + n); }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = data_[pos_] | (data_[pos_ + 1] << 8) |
                      (data_[pos_ + 2] << 16) |
                      (static_cast<std::uint32_t>(data_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    need(4);
    std::string t(reinterpret_cast<const char*>(data_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (!has(n)) throw Error(ErrorKind::kFormat, "truncated WAV data");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

double decode_sample(const std::uint8_t* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
                        (static_cast<std::uint32_t>(p[3]) << 24);
      std::memcpy(&f, &u, 4);
      return f;
    }
    double d;
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) u = (u << 8) | p[i];
    std::memcpy(&d, &u, 8);
    return d;
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: {
      auto v = static_cast<std::int32_t>(
          p[0] | (p[1] << 8) | (p[2] << 16) |
          (static_cast<std::uint32_t>(p[3]) << 24));
      return v / 2147483648.0;
    }
  }
  throw Error(ErrorKind::kFormat, "unsupported PCM bit depth " + std::to_string(bits));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  if (!in.has(12)) throw Error(ErrorKind::kFormat, "file too short for a RIFF header");
  if (in.tag() != "RIFF") throw Error(ErrorKind::kFormat, "missing RIFF tag");
  in.u32();
  if (in.tag() != "WAVE") throw Error(ErrorKind::kFormat, "missing WAVE tag");

  bool have_fmt = false;
  std::uint16_t format = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  std::uint16_t block_align = 0;

  while (in.has(8)) {
    std::string id = in.tag();
    std::uint32_t size = in.u32();
    if (id == "fmt ") {
      if (size < 16) throw Error(ErrorKind::kFormat, "fmt chunk too small");
      auto body = in.bytes(size);
      Reader fmt(body);
      format = fmt.u16();
      channels = fmt.u16();
      sample_rate = static_cast<int>(fmt.u32());
      fmt.u32();
      block_align = fmt.u16();
      bits = fmt.u16();
      if (format == kFormatExtensible) {
        if (size < 40) throw Error(ErrorKind::kFormat, "extensible fmt chunk too small");
        fmt.u16();
        fmt.u16();
        fmt.u32();
        format = fmt.u16();  // first two bytes of the subformat GUID
      }
      have_fmt = true;
      if (size & 1) in.skip(1);
    } else if (id == "data") {
      if (!have_fmt) throw Error(ErrorKind::kFormat, "data chunk before fmt chunk");
      if (format != kFormatPcm && format != kFormatFloat) {
        throw Error(ErrorKind::kFormat,
                    "unsupported WAV codec tag " + std::to_string(format));
      }
      if (format == kFormatFloat && bits != 32 && bits != 64) {
        throw Error(ErrorKind::kFormat, "unsupported float bit depth");
      }
      if (format == kFormatPcm && bits != 8 && bits != 16 && bits != 24 && bits != 32) {
        throw Error(ErrorKind::kFormat, "unsupported PCM bit depth " + std::to_string(bits));
      }
      if (channels <= 0 || sample_rate <= 0) {
        throw Error(ErrorKind::kFormat, "invalid channel count or sample rate");
      }
      const std::size_t bytes_per_sample = static_cast<std::size_t>(bits) / 8;
      const std::size_t frame_bytes = bytes_per_sample * static_cast<std::size_t>(channels);
      if (block_align != 0 && block_align != frame_bytes) {
        throw Error(ErrorKind::kFormat, "block alignment does not match format");
      }
      // Tolerate writers that leave the data size unset or oversized.
      std::size_t available = std::min<std::size_t>(size, in.remaining());
      auto data = in.bytes(available - available % frame_bytes);
      const std::size_t frames = data.size() / frame_bytes;

      AudioBuffer out;
      out.sample_rate = sample_rate;
      out.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        double sum = 0.0;
        for (int c = 0; c < channels; ++c) {
          double v = decode_sample(data.data() + f * frame_bytes + c * bytes_per_sample,
                                   format, bits);
          sum += std::isfinite(v) ? v : 0.0;
        }
        out.samples[f] = sum / channels;
      }
      return out;
    } else {
      in.skip(size + (size & 1));
    }
  }
  throw Error(ErrorKind::kFormat, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, SampleFormat format,
                                     WriteReport* report) {
  buffer.validate();
  const int bits = format == SampleFormat::kPcm16 ? 16 : format == SampleFormat::kPcm24 ? 24 : 32;
  const std::uint16_t tag = format == SampleFormat::kFloat32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t bytes_per_sample = static_cast<std::uint32_t>(bits / 8);
  const auto data_size = static_cast<std::uint32_t>(buffer.size() * bytes_per_sample);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(bytes_per_sample));
  put_u16(out, static_cast<std::uint16_t>(bits));
  put_tag(out, "data");
  put_u32(out, data_size);

  std::size_t clipped = 0;
  const double scale = std::ldexp(1.0, bits - 1);
  const double max_code = scale - 1.0;
  for (double s : buffer.samples) {
    if (std::abs(s) > 1.0) ++clipped;
    if (format == SampleFormat::kFloat32) {
      float f = static_cast<float>(std::clamp(s, -1.0, 1.0));
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      put_u32(out, u);
      continue;
    }
    double code = std::clamp(std::round(s * scale), -scale, max_code);
    auto v = static_cast<std::int32_t>(code);
    for (std::uint32_t b = 0; b < bytes_per_sample; ++b) {
      out.push_back(static_cast<std::uint8_t>((static_cast<std::uint32_t>(v) >> (8 * b)) & 0xFF));
    }
  }
  if (report) report->clipped = clipped;
  return out;
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

WriteReport write_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
                      SampleFormat format) {
  WriteReport report;
  auto bytes = encode_wav(buffer, format, &report);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
  return report;
}

SampleFormat sample_format_from_bits(int bits) {
  switch (bits) {
    case 16: return SampleFormat::kPcm16;
    case 24: return SampleFormat::kPcm24;
    case 32: return SampleFormat::kFloat32;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "bit depth must be 16, 24 or 32 (float), got " + std::to_string(bits));
}

}  // namespace voicemark
