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
#include "voicemark/attacks.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "voicemark/audio_io.hpp"
#include "voicemark/dsp.hpp"
#include "voicemark/error.hpp"

namespace voicemark::attacks {

namespace fs = std::filesystem;

AttackSpec AttackSpec::normal() {
  AttackSpec s;
  s.kind = AttackKind::kNormal;
  s.label = "normal";
  return s;
}

AttackSpec AttackSpec::awgn(double snr_db, std::uint64_t seed) {
  AttackSpec s;
  s.kind = AttackKind::kAwgn;
  s.snr_db = snr_db;
  s.seed = seed;
  s.label = "awgn";
  return s;
}

AttackSpec AttackSpec::resample(int intermediate_fs) {
  AttackSpec s;
  s.kind = AttackKind::kResample;
  s.intermediate_fs = intermediate_fs;
  s.label = "resample-" + std::to_string(intermediate_fs / 1000);
  return s;
}

AttackSpec AttackSpec::requantize(int bits) {
  AttackSpec s;
  s.kind = AttackKind::kRequantize;
  s.bits = bits;
  s.label = "requant-" + std::to_string(bits);
  return s;
}

AttackSpec AttackSpec::external(std::string command, std::string label) {
  AttackSpec s;
  s.kind = AttackKind::kExternalCodec;
  s.command = std::move(command);
  s.label = std::move(label);
  return s;
}

AttackSpec AttackSpec::named(const std::string& name) {
  if (name == "normal") return normal();
  if (name == "awgn") return awgn(40.0);
  if (name == "resample-8") return resample(8000);
  if (name == "resample-24") return resample(24000);
  if (name == "requant-8") return requantize(8);
  if (name == "requant-24") return requantize(24);
  if (name == "mp3" || name == "flv" || name == "g723.1") {
    return external(reference_command(name), name);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown attack '" + name + "'");
}

std::string AttackSpec::name() const {
  if (!label.empty()) return label;
  switch (kind) {
    case AttackKind::kNormal: return "normal";
    case AttackKind::kAwgn: return "awgn";
    case AttackKind::kResample: return "resample-" + std::to_string(intermediate_fs / 1000);
    case AttackKind::kRequantize: return "requant-" + std::to_string(bits);
    case AttackKind::kExternalCodec: return "external";
  }
  return "unknown";
}

void AttackSpec::validate() const {
  switch (kind) {
    case AttackKind::kNormal:
      return;
    case AttackKind::kAwgn:
      if (std::isnan(snr_db) || snr_db == -kNoNoise) {
        throw Error(ErrorKind::kInvalidArgument, "AWGN SNR must be a number or +inf");
      }
      return;
    case AttackKind::kResample:
      if (intermediate_fs <= 0) {
        throw Error(ErrorKind::kInvalidArgument, "intermediate rate must be positive");
      }
      return;
    case AttackKind::kRequantize:
      if (bits != 8 && bits != 24) {
        throw Error(ErrorKind::kInvalidArgument, "requantization depth must be 8 or 24");
      }
      return;
    case AttackKind::kExternalCodec:
      if (command.find("{in}") == std::string::npos || command.find("{out}") == std::string::npos) {
        throw Error(ErrorKind::kInvalidArgument,
                    "codec command needs {in} and {out} placeholders");
      }
      return;
  }
}

std::vector<std::string> standard_attack_names() {
  return {"normal", "awgn", "resample-8", "resample-24", "requant-8",
          "requant-24", "mp3", "flv", "g723.1"};
}

std::vector<std::string> native_attack_names() {
  return {"normal", "awgn", "resample-8", "resample-24", "requant-8", "requant-24"};
}

std::string reference_command(const std::string& name) {
  const std::string ff = "ffmpeg -nostdin -y -loglevel error ";
  if (name == "mp3") {
    return ff + "-i {in} -c:a libmp3lame -b:a 240k {out}.mp3 && " + ff +
           "-i {out}.mp3 -ar 16000 -ac 1 {out} && rm -f {out}.mp3";
  }
  if (name == "flv") {
    return ff + "-i {in} -c:a adpcm_swf -ar 22050 -f flv {out}.flv && " + ff +
           "-i {out}.flv -ar 16000 -ac 1 {out} && rm -f {out}.flv";
  }
  if (name == "g723.1") {
    // ffmpeg's encoder only offers the 6.3 kbps mode; use an external
    // reference coder for 5.3 kbps.
    return ff + "-i {in} -ar 8000 -ac 1 -c:a g723_1 -b:a 6300 -f g723_1 {out}.g723 && " + ff +
           "-f g723_1 -i {out}.g723 -ar 16000 -ac 1 {out} && rm -f {out}.g723";
  }
  throw Error(ErrorKind::kInvalidArgument, "no reference command for '" + name + "'");
}

namespace {

void require_pipeline_rate(const AudioBuffer& buffer) {
  if (buffer.sample_rate != kPipelineRate) {
    throw Error(ErrorKind::kInvalidArgument,
                "attacks expect 16 kHz input, got " + std::to_string(buffer.sample_rate));
  }
}

void fit_length(std::vector<double>& samples, std::size_t n) { samples.resize(n, 0.0); }

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "'\\''";
    else out.push_back(ch);
  }
  out += "'";
  return out;
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos;
       pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

std::string codec_dir() {
  const char* dir = std::getenv("VOICEMARK_CODEC_DIR");
  return dir ? std::string(dir) : std::string();
}

bool is_executable(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::string first_word(const std::string& command) {
  std::istringstream in(command);
  std::string word;
  in >> word;
  return word;
}

fs::path unique_temp_dir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    const fs::path p = fs::temp_directory_path() /
                       ("voicemark-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++) + "-" + std::to_string(rd()));
    std::error_code ec;
    if (fs::create_directory(p, ec)) return p;
  }
  throw Error(ErrorKind::kIo, "cannot create a temporary directory");
}

}  // namespace

bool command_available(const std::string& command_template) {
  const std::string word = first_word(command_template);
  if (word.empty()) return false;
  if (word.find('/') != std::string::npos) return is_executable(word);
  const std::string dir = codec_dir();
  if (!dir.empty() && is_executable(fs::path(dir) / word)) return true;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::istringstream in(path);
  std::string entry;
  while (std::getline(in, entry, ':')) {
    if (!entry.empty() && is_executable(fs::path(entry) / word)) return true;
  }
  return false;
}

AudioBuffer awgn(const AudioBuffer& buffer, double snr, std::uint64_t seed) {
  if (snr == kNoNoise) return buffer;
  double signal_energy = 0.0;
  for (double s : buffer.samples) signal_energy += s * s;
  if (!(signal_energy > 0.0)) {
    throw Error(ErrorKind::kNumerical, "SNR is undefined for a zero-energy buffer");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(buffer.size());
  double noise_energy = 0.0;
  for (double& v : noise) {
    v = gauss(rng);
    noise_energy += v * v;
  }
  // Scale the realized noise so the whole-utterance SNR is exact.
  const double target = signal_energy / std::pow(10.0, snr / 10.0);
  const double scale = std::sqrt(target / noise_energy);
  AudioBuffer out = buffer;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += scale * noise[i];
  return out;
}

AudioBuffer resample_attack(const AudioBuffer& buffer, int intermediate_fs) {
  AudioBuffer mid = dsp::resample(buffer, intermediate_fs);
  AudioBuffer back = dsp::resample(mid, buffer.sample_rate);
  fit_length(back.samples, buffer.size());
  return back;
}

AudioBuffer requantize(const AudioBuffer& buffer, int bits) {
  if (bits < 2 || bits > 31) {
    throw Error(ErrorKind::kInvalidArgument, "requantization depth out of range");
  }
  const double scale = std::ldexp(1.0, bits - 1);
  const double hi = 1.0 - 1.0 / scale;
  AudioBuffer out = buffer;
  for (double& s : out.samples) s = std::clamp(std::round(s * scale) / scale, -1.0, hi);
  return out;
}

AudioBuffer external_codec(const AudioBuffer& buffer, const std::string& command_template) {
  AttackSpec::external(command_template).validate();
  if (!command_available(command_template)) {
    throw Error(ErrorKind::kUnavailable,
                "codec binary '" + first_word(command_template) + "' not found");
  }
  const fs::path dir = unique_temp_dir();
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{dir};

  const fs::path in = dir / "in.wav";
  const fs::path out = dir / "out.wav";
  write_wav(buffer, in, SampleFormat::kPcm16);

  std::string command = substitute(command_template, "{in}", shell_quote(in.string()));
  command = substitute(command, "{out}", shell_quote(out.string()));
  std::string shell = "/bin/sh -c " + shell_quote(command) + " </dev/null";
  const std::string dir_env = codec_dir();
  if (!dir_env.empty()) {
    shell = "PATH=" + shell_quote(dir_env) + ":\"$PATH\" " + shell;
  }
  const int status = std::system(shell.c_str());
  if (status == -1) throw Error(ErrorKind::kIo, "failed to spawn codec command");
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  if (code == 127) throw Error(ErrorKind::kUnavailable, "codec command not found");
  if (code != 0) {
    throw Error(ErrorKind::kIo, "codec command exited with status " + std::to_string(code));
  }
  AudioBuffer decoded;
  try {
    decoded = read_wav(out);
  } catch (const Error& e) {
    throw Error(ErrorKind::kIo, std::string("unreadable codec output: ") + e.what());
  }
  if (decoded.sample_rate != buffer.sample_rate) {
    decoded = dsp::resample(decoded, buffer.sample_rate);
  }
  fit_length(decoded.samples, buffer.size());
  return decoded;
}

AudioBuffer apply_attack(const AudioBuffer& buffer, const AttackSpec& spec) {
  spec.validate();
  require_pipeline_rate(buffer);
  switch (spec.kind) {
    case AttackKind::kNormal: return buffer;
    case AttackKind::kAwgn: return awgn(buffer, spec.snr_db, spec.seed);
    case AttackKind::kResample: return resample_attack(buffer, spec.intermediate_fs);
    case AttackKind::kRequantize: return requantize(buffer, spec.bits);
    case AttackKind::kExternalCodec: return external_codec(buffer, spec.command);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown attack kind");
}

double snr_db(const AudioBuffer& clean, const AudioBuffer& noisy) {
  if (clean.size() != noisy.size()) {
    throw Error(ErrorKind::kInvalidArgument, "SNR needs equal-length buffers");
  }
  double sig = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    sig += clean.samples[i] * clean.samples[i];
    const double d = noisy.samples[i] - clean.samples[i];
    err += d * d;
  }
  if (err == 0.0) return kNoNoise;
  return 10.0 * std::log10(sig / err);
}

}  // namespace voicemark::attacks
