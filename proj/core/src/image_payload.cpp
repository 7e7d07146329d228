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
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "voicemark/error.hpp"
#include "voicemark/watermark.hpp"

namespace voicemark::watermark {

namespace {

class PbmScanner {
 public:
  explicit PbmScanner(std::string_view data) : data_(data) {}

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      const char ch = data_[pos_];
      if (ch == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number() {
    skip_space_and_comments();
    std::size_t v = 0;
    bool any = false;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(data_[pos_] - '0');
      ++pos_;
      any = true;
    }
    if (!any) throw Error(ErrorKind::kFormat, "malformed PBM header");
    return v;
  }

  std::string_view rest() const { return data_.substr(pos_); }
  std::size_t& pos() { return pos_; }
  std::string_view data() const { return data_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

BitImage parse_pbm(std::string_view data) {
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '1' && data[1] != '4')) {
    throw Error(ErrorKind::kFormat, "unsupported image format (expected PBM P1 or P4)");
  }
  const bool raw = data[1] == '4';
  PbmScanner scan(data.substr(2));
  BitImage image;
  image.width = scan.number();
  image.height = scan.number();
  if (image.width == 0 || image.height == 0) {
    throw Error(ErrorKind::kFormat, "PBM dimensions must be positive");
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(image.width * image.height);
  if (raw) {
    // exactly one whitespace byte separates the header from the raster
    auto& pos = scan.pos();
    if (pos >= scan.data().size() || !std::isspace(static_cast<unsigned char>(scan.data()[pos]))) {
      throw Error(ErrorKind::kFormat, "malformed PBM header");
    }
    ++pos;
    const std::string_view raster = scan.rest();
    const std::size_t row_bytes = (image.width + 7) / 8;
    if (raster.size() < row_bytes * image.height) {
      throw Error(ErrorKind::kFormat, "truncated PBM raster");
    }
    for (std::size_t y = 0; y < image.height; ++y) {
      for (std::size_t x = 0; x < image.width; ++x) {
        const auto byte = static_cast<unsigned char>(raster[y * row_bytes + x / 8]);
        bits.push_back(static_cast<std::uint8_t>((byte >> (7 - x % 8)) & 1));
      }
    }
  } else {
    auto& pos = scan.pos();
    const std::string_view body = scan.data();
    while (bits.size() < image.width * image.height) {
      scan.skip_space_and_comments();
      if (pos >= body.size()) throw Error(ErrorKind::kFormat, "truncated PBM raster");
      const char ch = body[pos++];
      if (ch != '0' && ch != '1') throw Error(ErrorKind::kFormat, "invalid PBM pixel");
      bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
  }
  image.bits = BitStream(std::move(bits));
  return image;
}

BitImage bits_from_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pbm(ss.str());
}

std::string format_pbm(const BitStream& bits, std::size_t width, std::size_t height,
                       bool binary) {
  if (width == 0 || height == 0 || bits.size() != width * height) {
    throw Error(ErrorKind::kInvalidArgument,
                "bit count " + std::to_string(bits.size()) + " does not match " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  std::string out = binary ? "P4\n" : "P1\n";
  out += std::to_string(width) + " " + std::to_string(height) + "\n";
  for (std::size_t y = 0; y < height; ++y) {
    if (binary) {
      for (std::size_t x0 = 0; x0 < width; x0 += 8) {
        unsigned byte = 0;
        for (std::size_t b = 0; b < 8; ++b) {
          const std::size_t x = x0 + b;
          if (x < width && bits[y * width + x]) byte |= 0x80u >> b;
        }
        out.push_back(static_cast<char>(byte));
      }
    } else {
      for (std::size_t x = 0; x < width; ++x) {
        if (x) out.push_back(' ');
        out.push_back(bits[y * width + x] ? '1' : '0');
      }
      out.push_back('\n');
    }
  }
  return out;
}

void image_from_bits(const BitStream& bits, std::size_t width, std::size_t height,
                     const std::filesystem::path& path, bool binary) {
  const std::string data = format_pbm(bits, width, height, binary);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace voicemark::watermark
