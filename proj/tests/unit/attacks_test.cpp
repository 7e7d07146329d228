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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "speech_synth.hpp"
#include "voicemark/dsp.hpp"
#include "voicemark/error.hpp"

namespace voicemark::attacks {
namespace {

constexpr double kPi = std::numbers::pi;

AudioBuffer sine(double freq, double amp, std::size_t n) {
  AudioBuffer b;
  for (std::size_t i = 0; i < n; ++i) b.samples.push_back(amp * std::sin(2 * kPi * freq * static_cast<double>(i) / 16000));
  return b;
}

AudioBuffer speech() { return testing::synthesize_utterance(4, {.duration_s = 1.5}); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no voicemark::Error thrown";
  return ErrorKind::kIo;
}

TEST(AttackSpecTest, NamedAttacks) {
  for (const auto& name : standard_attack_names()) EXPECT_EQ(AttackSpec::named(name).name(), name);
  EXPECT_EQ(standard_attack_names().size(), 9u);
  EXPECT_EQ(native_attack_names(),
            (std::vector<std::string>{"normal", "awgn", "resample-8", "resample-24", "requant-8", "requant-24"}));
  EXPECT_EQ(AttackSpec::named("resample-24").intermediate_fs, 24000);
  EXPECT_EQ(AttackSpec::named("requant-8").bits, 8);
  EXPECT_EQ(AttackSpec::named("awgn").snr_db, 40.0);
  EXPECT_EQ(AttackSpec::named("mp3").kind, AttackKind::kExternalCodec);
  EXPECT_THROW(AttackSpec::named("echo"), Error);
}

TEST(AttackSpecTest, Validation) {
  EXPECT_THROW(AttackSpec::requantize(16).validate(), Error);
  EXPECT_THROW(AttackSpec::resample(0).validate(), Error);
  EXPECT_THROW(AttackSpec::awgn(NAN).validate(), Error);
  EXPECT_THROW(AttackSpec::external("cp {in} out.wav").validate(), Error);
  EXPECT_NO_THROW(AttackSpec::awgn(kNoNoise).validate());
}

TEST(Normal, BitIdentical) {
  const auto x = speech();
  EXPECT_EQ(apply_attack(x, AttackSpec::normal()).samples, x.samples);
  EXPECT_THROW(apply_attack(AudioBuffer(x.samples, 8000), AttackSpec::normal()), Error);
}

TEST(Awgn, HitsTargetSnr) {
  const auto x = speech();
  for (double target : {10.0, 20.0, 40.0}) {
    const auto y = apply_attack(x, AttackSpec::awgn(target, 7));
    ASSERT_EQ(y.size(), x.size());
    // Direct measurement, independent of the library helper.
    double s = 0, n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += x.samples[i] * x.samples[i];
      n += (y.samples[i] - x.samples[i]) * (y.samples[i] - x.samples[i]);
    }
    EXPECT_NEAR(10.0 * std::log10(s / n), target, 0.5);
    EXPECT_NEAR(snr_db(x, y), target, 1e-9);
  }
}

TEST(Awgn, UnitPowerNoiseVariance) {
  // Unit-power square wave: noise power must be 1e-4 at 40 dB.
  AudioBuffer x;
  for (int i = 0; i < 32000; ++i) x.samples.push_back(i % 2 ? 1.0 : -1.0);
  const auto y = awgn(x, 40.0, 3);
  double n = 0, mean = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y.samples[i] - x.samples[i];
    n += d * d;
    mean += d;
  }
  EXPECT_NEAR(n / x.size(), 1e-4, 1e-12);
  EXPECT_NEAR(mean / x.size(), 0.0, 5.0 * std::sqrt(1e-4 / x.size()));
}

TEST(Awgn, DeterministicAndSentinel) {
  const auto x = speech();
  EXPECT_EQ(awgn(x, 40, 11).samples, awgn(x, 40, 11).samples);
  EXPECT_NE(awgn(x, 40, 11).samples, awgn(x, 40, 12).samples);
  EXPECT_EQ(awgn(x, kNoNoise, 11).samples, x.samples);
  EXPECT_EQ(kind_of([] { awgn(AudioBuffer(std::vector<double>(100, 0.0), 16000), 40, 1); }),
            ErrorKind::kNumerical);
}

TEST(Requantize, BoundsAndIdempotence) {
  std::mt19937_64 rng(2);
  // Rounding bound holds inside the representable range; clipping is checked below.
  std::uniform_real_distribution<double> u(-1.0, 1.0 - 1.0 / 128.0);
  AudioBuffer x;
  for (int i = 0; i < 10000; ++i) x.samples.push_back(u(rng));
  const auto y = requantize(x, 8);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_LE(std::abs(y.samples[i] - x.samples[i]), std::ldexp(1.0, -8) + 1e-15);
    EXPECT_LE(y.samples[i], 1.0 - 1.0 / 128.0);
    EXPECT_GE(y.samples[i], -1.0);
    EXPECT_EQ(std::round(y.samples[i] * 128.0), y.samples[i] * 128.0);
  }
  EXPECT_EQ(requantize(y, 8).samples, y.samples);
  EXPECT_EQ(apply_attack(x, AttackSpec::requantize(8)).samples, y.samples);
  const auto clipped = requantize(AudioBuffer({1.0, -1.0, 0.999}, 16000), 8);
  EXPECT_EQ(clipped.samples, (std::vector<double>{127.0 / 128.0, -1.0, 127.0 / 128.0}));
}

TEST(Requantize, TwentyFourBitsKeepsSixteenBitAudio) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(-32768, 32767);
  AudioBuffer x;
  for (int i = 0; i < 5000; ++i) x.samples.push_back(u(rng) / 32768.0);
  EXPECT_EQ(requantize(x, 24).samples, x.samples);
}

TEST(Resample, TwentyFourKilohertzRoundTrip) {
  const auto x = sine(1000, 0.5, 16000);
  const auto y = apply_attack(x, AttackSpec::resample(24000));
  ASSERT_EQ(y.size(), x.size());
  EXPECT_EQ(y.sample_rate, 16000);
  double xy = 0, xx = 0, yy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x.samples[i] * y.samples[i];
    xx += x.samples[i] * x.samples[i];
    yy += y.samples[i] * y.samples[i];
  }
  EXPECT_GT(xy / std::sqrt(xx * yy), 0.99);
}

TEST(Resample, EightKilohertzRemovesUpperBand) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.2);
  AudioBuffer x;
  for (int i = 0; i < 16384; ++i) x.samples.push_back(g(rng));
  const auto y = apply_attack(x, AttackSpec::resample(8000));
  ASSERT_EQ(y.size(), x.size());
  const auto ps = dsp::power_spectrum(y.samples, 16384, 16000);
  EXPECT_LT(dsp::band_power(ps, 4000.5, 8000), 0.01);
  const auto before = dsp::power_spectrum(x.samples, 16384, 16000);
  EXPECT_GT(dsp::band_power(before, 4000.5, 8000), 0.4);
}

TEST(Resample, LengthPreservedForOddSizes) {
  for (std::size_t n : {1u, 3u, 1001u, 16001u}) {
    const auto x = sine(300, 0.3, n);
    for (int fs : {8000, 24000, 11025}) EXPECT_EQ(resample_attack(x, fs).size(), n);
  }
}

class ExternalCodec : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("voicemark_codec_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override {
    ::unsetenv("VOICEMARK_CODEC_DIR");
    std::filesystem::remove_all(dir_);
  }
  std::filesystem::path dir_;
};

TEST_F(ExternalCodec, CopyIsIdentityWithinPcm16) {
  const auto x = speech();
  const auto y = apply_attack(x, AttackSpec::external("cp {in} {out}"));
  ASSERT_EQ(y.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LE(std::abs(y.samples[i] - x.samples[i]), 1.0 / 32768.0);
}

TEST_F(ExternalCodec, IntermediateExtension) {
  const auto x = sine(500, 0.4, 4000);
  const auto y = external_codec(x, "cp {in} {out}.tmp && mv {out}.tmp {out}");
  EXPECT_EQ(y.size(), x.size());
}

TEST_F(ExternalCodec, MissingBinaryIsUnavailable) {
  const auto x = sine(500, 0.4, 4000);
  EXPECT_FALSE(command_available("voicemark-no-such-codec {in} {out}"));
  EXPECT_EQ(kind_of([&] { external_codec(x, "voicemark-no-such-codec {in} {out}"); }),
            ErrorKind::kUnavailable);
  EXPECT_EQ(kind_of([&] { external_codec(x, "cp {in} {out} && voicemark-no-such-codec"); }),
            ErrorKind::kUnavailable);
  EXPECT_EQ(kind_of([&] { external_codec(x, "false {in} {out}"); }), ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { external_codec(x, "true {in} {out}"); }), ErrorKind::kIo);
}

TEST_F(ExternalCodec, CodecDirIsSearchedFirst) {
  const auto script = dir_ / "vmcodec";
  {
    std::ofstream out(script);
    // Wrapper resolving a sibling helper through the prepended PATH.
    out << "#!/bin/sh\nexec sox_stub \"$@\"\n";
  }
  std::ofstream(dir_ / "sox_stub") << "#!/bin/sh\ncp \"$1\" \"$2\"\n";
  std::filesystem::permissions(script, std::filesystem::perms::owner_all);
  std::filesystem::permissions(dir_ / "sox_stub", std::filesystem::perms::owner_all);
  const auto x = sine(500, 0.4, 4000);
  EXPECT_FALSE(command_available("vmcodec {in} {out}"));
  ::setenv("VOICEMARK_CODEC_DIR", dir_.c_str(), 1);
  EXPECT_TRUE(command_available("vmcodec {in} {out}"));
  const auto y = external_codec(x, "vmcodec {in} {out}");
  EXPECT_EQ(y.size(), x.size());
}

TEST_F(ExternalCodec, ResamplesForeignRateOutput) {
  // The "codec" writes an 8 kHz file; the result comes back at 16 kHz.
  const auto x = sine(500, 0.4, 16000);
  std::ofstream(dir_ / "downsample") << "#!/bin/sh\n"
                                       "cp \"$1\" \"$2\"\n"
                                       "printf '\\100\\037\\000\\000' | dd of=\"$2\" bs=1 seek=24 conv=notrunc 2>/dev/null\n"
                                       "printf '\\200\\076\\000\\000' | dd of=\"$2\" bs=1 seek=28 conv=notrunc 2>/dev/null\n";
  std::filesystem::permissions(dir_ / "downsample", std::filesystem::perms::owner_all);
  ::setenv("VOICEMARK_CODEC_DIR", dir_.c_str(), 1);
  const auto y = external_codec(x, "downsample {in} {out}");
  EXPECT_EQ(y.size(), x.size());
  EXPECT_EQ(y.sample_rate, 16000);
}

}  // namespace
}  // namespace voicemark::attacks
