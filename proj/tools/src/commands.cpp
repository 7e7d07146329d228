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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include "voicemark/attacks.hpp"
#include "voicemark/mcadams.hpp"
#include "voicemark_app/app.hpp"

namespace voicemark::app {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kIo:
    case ErrorKind::kFormat: return kExitIo;
    case ErrorKind::kCapacity:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kNumerical: return kExitValidation;
    case ErrorKind::kProtocol: return kExitProtocol;
    case ErrorKind::kUnavailable: return kExitUnavailable;
  }
  return kExitValidation;
}

namespace {

double parse_number(std::string_view text, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kInvalidArgument, "invalid " + what + ": '" + std::string(text) + "'");
  }
  return v;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "voicemark: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    err << "voicemark: out of memory\n";
    return kExitIo;
  }
}

void report_clipping(const WriteReport& rep, const fs::path& path, std::ostream& err) {
  if (rep.clipped > 0) {
    err << "voicemark: warning: " << rep.clipped << " samples clipped writing " << path.string()
        << '\n';
  }
}

watermark::WatermarkConfig base_config(const std::optional<fs::path>& file) {
  return file ? watermark::load_config(*file) : watermark::WatermarkConfig{};
}

// Payload override keeps a consistent theta: the file's theta only applies
// to the payload it was written for.
void apply_payload(watermark::WatermarkConfig& cfg, std::optional<int> payload) {
  if (!payload || *payload == cfg.payload_bps) return;
  cfg.payload_bps = *payload;
  const auto theta = watermark::WatermarkConfig::default_theta(*payload);
  if (!theta) {
    throw Error(ErrorKind::kInvalidArgument, "no default threshold for " +
                                                 std::to_string(*payload) +
                                                 " bps; pass --theta or a calibrated config");
  }
  cfg.theta = *theta;
}

}  // namespace

dsp::Band parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument, "band must be LO:HI in Hz, got '" + text + "'");
  }
  const dsp::Band band{parse_number(std::string_view(text).substr(0, colon), "band edge"),
                       parse_number(std::string_view(text).substr(colon + 1), "band edge")};
  if (!(band.low_hz >= 0.0 && band.low_hz < band.high_hz)) {
    throw Error(ErrorKind::kInvalidArgument, "band needs 0 <= LO < HI, got '" + text + "'");
  }
  return band;
}

std::pair<std::size_t, std::size_t> parse_geometry(const std::string& text) {
  const auto x = text.find_first_of("xX");
  auto parse = [&](std::string_view s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0) {
      throw Error(ErrorKind::kInvalidArgument, "image geometry must be WxH, got '" + text + "'");
    }
    return v;
  };
  if (x == std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument, "image geometry must be WxH, got '" + text + "'");
  }
  return {parse(std::string_view(text).substr(0, x)), parse(std::string_view(text).substr(x + 1))};
}

AudioBuffer load_pipeline_audio(const fs::path& path) {
  AudioBuffer audio = read_wav(path);
  if (audio.sample_rate != kPipelineRate) audio = dsp::resample(audio, kPipelineRate);
  return audio;
}

std::vector<NamedAudio> load_corpus(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::kIo, "corpus directory not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  if (files.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no .wav files in " + dir.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedAudio> corpus;
  corpus.reserve(files.size());
  for (const auto& f : files) corpus.push_back({f.filename().string(), load_pipeline_audio(f)});
  return corpus;
}

int cmd_anonymize(const AnonymizeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const AudioBuffer audio = load_pipeline_audio(opt.input);
    mcadams::AnonymizeStats stats;
    AudioBuffer result = mcadams::anonymize(audio, {.alpha = opt.alpha}, &stats);
    // Warped resonances can stack and raise the peak well past full scale.
    const double in_peak = dsp::peak_abs(audio.samples);
    const double out_peak = dsp::peak_abs(result.samples);
    if (out_peak > 1.0 && in_peak > 0.0) {
      const double gain = in_peak / out_peak;
      for (double& v : result.samples) v *= gain;
      err << "voicemark: note: output rescaled by " << gain << " to the input peak level\n";
    }
    report_clipping(write_wav(result, opt.output, opt.format), opt.output, err);
    out << "anonymized " << result.duration_seconds() << " s with alpha " << opt.alpha << " ("
        << stats.subframes << " sub-frames, " << stats.silent << " silent, "
        << stats.solver_failures << " solver failures)\n";
    return kExitOk;
  });
}

int cmd_embed(const EmbedOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.bits_file.has_value() == opt.image_file.has_value()) {
      throw Error(ErrorKind::kInvalidArgument, "give exactly one of --bits or --image");
    }
    auto cfg = base_config(opt.config_file);
    apply_payload(cfg, opt.payload_bps);
    if (opt.alpha0) cfg.alpha0 = *opt.alpha0;
    if (opt.alpha1) cfg.alpha1 = *opt.alpha1;
    cfg.validate();

    watermark::BitStream bits;
    if (opt.image_file) {
      const auto image = watermark::bits_from_image(*opt.image_file);
      out << "image " << image.width << 'x' << image.height << " serialized row-major\n";
      bits = image.bits;
    } else {
      bits = watermark::read_bitstream(*opt.bits_file);
    }
    const AudioBuffer audio = load_pipeline_audio(opt.input);
    const std::size_t capacity = cfg.capacity(audio);
    if (bits.size() > capacity) {
      throw Error(ErrorKind::kCapacity, std::to_string(bits.size()) + " bits exceed capacity of " +
                                            std::to_string(capacity) + " bits (" +
                                            std::to_string(cfg.payload_bps) + " bps, " +
                                            std::to_string(audio.duration_seconds()) + " s)");
    }
    const AudioBuffer marked = watermark::embed(audio, bits, cfg);
    report_clipping(write_wav(marked, opt.output, opt.format), opt.output, err);
    out << bits.size() << '/' << capacity << " bits embedded\n";
    return kExitOk;
  });
}

int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = base_config(opt.config_file);
    apply_payload(cfg, opt.payload_bps);
    if (opt.theta) cfg.theta = *opt.theta;
    if (opt.band) cfg.band = *opt.band;
    if (opt.reference) cfg.reference = *opt.reference;
    cfg.validate();

    const AudioBuffer audio = load_pipeline_audio(opt.input);
    std::size_t num_bits = opt.num_bits.value_or(cfg.capacity(audio));
    if (opt.image) {
      const std::size_t pixels = opt.image->first * opt.image->second;
      if (opt.num_bits && *opt.num_bits != pixels) {
        throw Error(ErrorKind::kInvalidArgument, "--num-bits disagrees with --image geometry");
      }
      num_bits = pixels;
    }
    const auto report = watermark::detect(audio, cfg, num_bits);
    out << report.bits.to_string() << '\n';
    if (opt.report_file) {
      std::ofstream file(*opt.report_file, std::ios::binary);
      file << report.to_text();
      if (!file) throw Error(ErrorKind::kIo, "cannot write " + opt.report_file->string());
    }
    if (opt.image) {
      const fs::path path = opt.image_out.value_or("detected.pbm");
      watermark::image_from_bits(report.bits, opt.image->first, opt.image->second, path);
      err << "voicemark: image written to " << path.string() << '\n';
    }
    return kExitOk;
  });
}

int cmd_attack(const AttackOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto spec = attacks::AttackSpec::named(opt.attack);
    if (opt.snr_db) {
      if (spec.kind != attacks::AttackKind::kAwgn) {
        throw Error(ErrorKind::kInvalidArgument, "--snr applies to awgn only");
      }
      spec.snr_db = *opt.snr_db;
    }
    spec.seed = opt.seed;
    if (opt.command) {
      if (spec.kind != attacks::AttackKind::kExternalCodec) {
        throw Error(ErrorKind::kInvalidArgument, "--command applies to codec attacks only");
      }
      spec.command = *opt.command;
    }
    const AudioBuffer audio = load_pipeline_audio(opt.input);
    const AudioBuffer attacked = attacks::apply_attack(audio, spec);
    report_clipping(write_wav(attacked, opt.output, opt.format), opt.output, err);
    out << "applied " << spec.name() << '\n';
    return kExitOk;
  });
}

}  // namespace voicemark::app
