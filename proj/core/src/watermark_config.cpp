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
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "voicemark/error.hpp"
#include "voicemark/watermark.hpp"

namespace voicemark::watermark {

std::optional<double> WatermarkConfig::default_theta(int payload_bps) {
  switch (payload_bps) {
    case 2: return 0.15;
    case 4: return 0.09;
    case 8: return 0.05;
    case 16: return 0.02;
    case 32: return 0.01;
  }
  return std::nullopt;
}

WatermarkConfig WatermarkConfig::for_payload(int payload_bps) {
  WatermarkConfig config;
  config.payload_bps = payload_bps;
  if (auto theta = default_theta(payload_bps)) config.theta = *theta;
  return config;
}

std::size_t WatermarkConfig::frame_len(int fs) const {
  if (payload_bps <= 0 || fs <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "payload and sample rate must be positive");
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(fs) / payload_bps));
}

std::size_t WatermarkConfig::capacity(const AudioBuffer& buffer) const {
  if (payload_bps <= 0 || buffer.sample_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "payload and sample rate must be positive");
  }
  // floor(duration * payload) in exact integer arithmetic
  return buffer.size() * static_cast<std::size_t>(payload_bps) /
         static_cast<std::size_t>(buffer.sample_rate);
}

void WatermarkConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kInvalidArgument, msg); };
  if (!(alpha0 > 0.0) || !(alpha1 > 0.0)) fail("McAdams coefficients must be positive");
  if (alpha0 == alpha1) fail("alpha0 and alpha1 must differ");
  if (payload_bps < 1) fail("payload must be at least 1 bps");
  if (!(theta > 0.0 && theta < 1.0)) fail("theta must lie in (0, 1)");
  if (!(band.low_hz >= 0.0 && band.low_hz < band.high_hz)) fail("invalid detection band");
  if (!(bpf.low_hz > 0.0 && bpf.low_hz < bpf.high_hz)) fail("invalid band-pass edges");
  if (reference && !(reference->low_hz >= 0.0 && reference->low_hz < reference->high_hz)) {
    fail("invalid reference band");
  }
  if (!std::isfinite(target_dbfs)) fail("target level must be finite");
  // 16 kHz / payload must leave room for at least one 20 ms LPC sub-frame.
  if (frame_len(kPipelineRate) < 320) fail("payload too high for 20 ms LPC sub-frames");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw Error(ErrorKind::kFormat, "config key '" + key + "': not a number: " + value);
  }
  return v;
}

}  // namespace

std::string format_config(const WatermarkConfig& config) {
  std::ostringstream out;
  out << "alpha0=" << fmt_double(config.alpha0) << '\n';
  out << "alpha1=" << fmt_double(config.alpha1) << '\n';
  out << "payload_bps=" << config.payload_bps << '\n';
  out << "theta=" << fmt_double(config.theta) << '\n';
  out << "band_low_hz=" << fmt_double(config.band.low_hz) << '\n';
  out << "band_high_hz=" << fmt_double(config.band.high_hz) << '\n';
  out << "target_dbfs=" << fmt_double(config.target_dbfs) << '\n';
  out << "bpf_low_hz=" << fmt_double(config.bpf.low_hz) << '\n';
  out << "bpf_high_hz=" << fmt_double(config.bpf.high_hz) << '\n';
  if (config.reference) {
    out << "ref_low_hz=" << fmt_double(config.reference->low_hz) << '\n';
    out << "ref_high_hz=" << fmt_double(config.reference->high_hz) << '\n';
  }
  return out.str();
}

WatermarkConfig parse_config(std::string_view text) {
  WatermarkConfig config;
  bool have_theta = false;
  std::optional<double> ref_low, ref_high;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kFormat, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "alpha0") config.alpha0 = to_double(key, value);
    else if (key == "alpha1") config.alpha1 = to_double(key, value);
    else if (key == "payload_bps") {
      const double p = to_double(key, value);
      if (p != std::floor(p)) throw Error(ErrorKind::kFormat, "payload_bps must be an integer");
      config.payload_bps = static_cast<int>(p);
    } else if (key == "theta") {
      config.theta = to_double(key, value);
      have_theta = true;
    } else if (key == "band_low_hz") config.band.low_hz = to_double(key, value);
    else if (key == "band_high_hz") config.band.high_hz = to_double(key, value);
    else if (key == "target_dbfs") config.target_dbfs = to_double(key, value);
    else if (key == "bpf_low_hz") config.bpf.low_hz = to_double(key, value);
    else if (key == "bpf_high_hz") config.bpf.high_hz = to_double(key, value);
    else if (key == "ref_low_hz") ref_low = to_double(key, value);
    else if (key == "ref_high_hz") ref_high = to_double(key, value);
    else throw Error(ErrorKind::kFormat, "unknown config key '" + key + "'");
  }
  if (ref_low.has_value() != ref_high.has_value()) {
    throw Error(ErrorKind::kFormat, "ref_low_hz and ref_high_hz must be given together");
  }
  if (ref_low) config.reference = dsp::Band{*ref_low, *ref_high};
  if (!have_theta) {
    if (auto theta = WatermarkConfig::default_theta(config.payload_bps)) config.theta = *theta;
  }
  config.validate();
  return config;
}

WatermarkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const WatermarkConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << format_config(config);
}

}  // namespace voicemark::watermark
