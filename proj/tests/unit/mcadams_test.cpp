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

#include "voicemark/mcadams.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "speech_synth.hpp"
#include "voicemark/error.hpp"
#include "voicemark/lpc.hpp"

namespace voicemark::mcadams {
namespace {

constexpr double kPi = std::numbers::pi;

// Largest distance between matched poles under greedy nearest matching.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const auto& p : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](const Complex& x, const Complex& y) {
      return std::abs(x - p) < std::abs(y - p);
    });
    worst = std::max(worst, std::abs(*it - p));
    b.erase(it);
  }
  return worst;
}

double snr(const std::vector<double>& ref, const std::vector<double>& test) {
  double s = 0, e = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    s += ref[i] * ref[i];
    e += (test[i] - ref[i]) * (test[i] - ref[i]);
  }
  return 10.0 * std::log10(s / e);
}

TEST(FindPoles, DoubleRoot) {
  const std::vector<double> c{1.0, -0.25};
  const auto set = find_poles(c);
  ASSERT_EQ(set.order(), 2u);
  for (const auto& p : set.poles) {
    EXPECT_NEAR(std::abs(p - 0.5), 0.0, 1e-6);
    EXPECT_LT(std::abs(testing::monic_residual(c, p)), 1e-8);
  }
}

TEST(FindPoles, KnownConjugatePair) {
  const auto p = std::polar(0.9, kPi / 4);
  const std::vector<double> c{2.0 * p.real(), -std::norm(p)};
  const auto set = find_poles(c);
  ASSERT_EQ(set.order(), 2u);
  EXPECT_LT(multiset_distance(set.poles, {p, std::conj(p)}), 1e-12);
  // Pairs are exact mirrors, upper first.
  EXPECT_GT(set.poles[0].imag(), 0.0);
  EXPECT_EQ(set.poles[1], std::conj(set.poles[0]));
}

TEST(FindPoles, RandomOrder20Residuals) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const auto truth = testing::random_stable_poles(rng, 20, trial % 3 * 2);
    const auto c = testing::coeffs_from_poles(truth);
    const auto set = find_poles(c);
    ASSERT_EQ(set.order(), 20u);
    for (const auto& root : set.poles) EXPECT_LT(std::abs(testing::monic_residual(c, root)), 1e-8);
    EXPECT_LT(multiset_distance(set.poles, truth), 1e-6);
  }
}

TEST(FindPoles, ConjugateClosure) {
  std::mt19937_64 rng(5);
  const auto c = testing::coeffs_from_poles(testing::random_stable_poles(rng, 20, 4));
  const auto set = find_poles(c);
  for (const auto& p : set.poles) {
    const auto mirror = std::find(set.poles.begin(), set.poles.end(), std::conj(p));
    EXPECT_NE(mirror, set.poles.end());
  }
}

TEST(FindPoles, DegenerateInputs) {
  EXPECT_TRUE(find_poles(std::vector<double>{}).poles.empty());
  const auto single = find_poles(std::vector<double>{0.3});
  ASSERT_EQ(single.order(), 1u);
  EXPECT_NEAR(single.poles[0].real(), 0.3, 1e-15);
  // Trailing zero coefficients put roots at the origin.
  const auto zeros = find_poles(std::vector<double>{0.5, 0.0, 0.0});
  EXPECT_LT(multiset_distance(zeros.poles, {0.5, 0.0, 0.0}), 1e-12);
  EXPECT_THROW(find_poles(std::vector<double>{NAN, 0.1}), Error);
}

TEST(WarpPoles, Examples) {
  PoleSet set{{std::polar(0.7, 0.5), std::polar(0.7, -0.5), Complex(0.95, 0.0)}};
  const auto warped = warp_poles(set, 0.6);
  EXPECT_NEAR(std::arg(warped.poles[0]), std::pow(0.5, 0.6), 1e-12);
  EXPECT_NEAR(std::pow(0.5, 0.6), 0.6598, 1e-4);
  EXPECT_NEAR(std::abs(warped.poles[0]), 0.7, 1e-12);
  EXPECT_EQ(warped.poles[1], std::conj(warped.poles[0]));
  EXPECT_EQ(warped.poles[2], Complex(0.95, 0.0));
  const auto same = warp_poles(set, 1.0);
  EXPECT_EQ(same.poles, set.poles);
}

TEST(WarpPoles, ClampsWhenAngleWouldPassPi) {
  // 3.0^1.1 > pi, so the pole stays put; 3.0^0.9 < pi is warped.
  PoleSet set{{std::polar(0.8, 3.0), std::polar(0.8, -3.0)}};
  EXPECT_EQ(warp_poles(set, 1.1).poles, set.poles);
  EXPECT_NEAR(std::arg(warp_poles(set, 0.9).poles[0]), std::pow(3.0, 0.9), 1e-12);
  EXPECT_THROW(warp_poles(set, 0.0), Error);
  EXPECT_THROW(warp_poles(set, -1.0), Error);
}

TEST(WarpPoles, RealAxisPolesUntouched) {
  PoleSet set{{Complex(-0.6, 0.0), Complex(0.95, 0.0), Complex(0.0, 0.0)}};
  for (double a : {0.3, 0.6, 0.8, 1.5}) EXPECT_EQ(warp_poles(set, a).poles, set.poles);
}

TEST(WarpPoles, InvariantsOnGrid) {
  for (double phi = 0.05; phi < 1.0; phi += 0.05) {
    for (double a1 = 0.1; a1 < 0.95; a1 += 0.05) {
      const double a2 = a1 + 0.05;
      const PoleSet set{{std::polar(0.9, phi), std::polar(0.9, -phi)}};
      const auto w1 = warp_poles(set, a1), w2 = warp_poles(set, a2);
      EXPECT_NEAR(std::abs(w1.poles[0]), 0.9, 1e-12);
      EXPECT_EQ(w1.poles[1], std::conj(w1.poles[0]));
      EXPECT_GT(std::arg(w1.poles[0]), std::arg(w2.poles[0]));
      EXPECT_GT(std::arg(w2.poles[0]), phi);
    }
  }
}

TEST(PolesToCoeffs, Examples) {
  const auto c = poles_to_coeffs(PoleSet{{0.5, 0.5}});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 1.0, 1e-15);
  EXPECT_NEAR(c[1], -0.25, 1e-15);
  EXPECT_TRUE(poles_to_coeffs(PoleSet{}).empty());
  EXPECT_THROW(poles_to_coeffs(PoleSet{{Complex(0.5, 0.3)}}), Error);
}

TEST(PolesToCoeffs, MatchesQuadraticExpansionAndRoundTrips) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const auto truth = testing::random_stable_poles(rng, 20, trial % 2 * 2);
    const auto oracle = testing::coeffs_from_poles(truth);
    const auto c = poles_to_coeffs(PoleSet{truth});
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], oracle[i], 1e-10);
    const auto back = poles_to_coeffs(find_poles(c));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(back[i], c[i], 1e-6);
  }
}

TEST(PolesToCoeffs, RoundTripWithClusteredRealPoles) {
  // Up to six real poles crowd the axis and make clusters with nearby pairs.
  std::mt19937_64 rng(707);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = testing::coeffs_from_poles(testing::random_stable_poles(rng, 20, trial % 4 * 2));
    const auto back = poles_to_coeffs(find_poles(c));
    for (std::size_t i = 0; i < c.size(); ++i) ASSERT_NEAR(back[i], c[i], 1e-6) << "trial " << trial;
  }
}

TEST(Params, Validation) {
  McAdamsParams p;
  EXPECT_NO_THROW(p.validate());
  p.alpha = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.hop_ms = 25.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.order = 1;
  EXPECT_THROW(p.validate(), Error);
}

TEST(TransformFrame, SilentFramePassesThrough) {
  AnonymizeStats stats;
  const std::vector<double> quiet(320, 1e-9);
  EXPECT_EQ(transform_frame(quiet, 0.6, 20, &stats), quiet);
  EXPECT_EQ(stats.silent, 1u);
}

TEST(TransformFrame, IdentityWarpIsExact) {
  const auto speech = testing::synthesize_utterance(3, {.duration_s = 1.0});
  const std::vector<double> frame(speech.samples.begin() + 4000, speech.samples.begin() + 4320);
  const auto out = transform_frame(frame, 1.0, 20);
  EXPECT_GT(snr(frame, out), 100.0);
}

TEST(Anonymize, IdentityWarpAbove40dB) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto x = testing::synthesize_utterance(seed, {.duration_s = 2.0});
    const auto y = anonymize(x, {.alpha = 1.0});
    ASSERT_EQ(y.size(), x.size());
    EXPECT_GE(snr(x.samples, y.samples), 40.0);
  }
}

TEST(Anonymize, ZerosStayZero) {
  AnonymizeStats stats;
  const AudioBuffer zero(std::vector<double>(8000, 0.0), 16000);
  const auto y = anonymize(zero, {}, &stats);
  EXPECT_EQ(y.samples, zero.samples);
  EXPECT_EQ(stats.silent, stats.subframes);
  EXPECT_GT(stats.subframes, 0u);
}

TEST(Anonymize, PreservesLengthAndFiniteness) {
  const auto x = testing::synthesize_utterance(9, {.duration_s = 1.37});
  for (double a : {0.5, 0.6, 0.8, 1.2}) {
    const auto y = anonymize(x, {.alpha = a});
    ASSERT_EQ(y.size(), x.size());
    EXPECT_EQ(y.sample_rate, 16000);
    for (double v : y.samples) ASSERT_TRUE(std::isfinite(v));
    EXPECT_LT(snr(x.samples, y.samples), 20.0);  // something actually changed
  }
  EXPECT_THROW(anonymize(AudioBuffer(x.samples, 8000), {}), Error);
  EXPECT_TRUE(anonymize(AudioBuffer({}, 16000), {}).empty());
}

TEST(Anonymize, ShiftsSingleResonance) {
  const auto src = testing::single_resonance(0.8, 0.99, 10.0, 17);
  const std::size_t nfft = 1024;
  const double bin = 2.0 * kPi / nfft;
  EXPECT_NEAR(testing::averaged_peak_angle(src.samples, nfft), 0.8, 2 * bin);
  double prev = 0.8;
  for (double a : {0.9, 0.7, 0.5}) {
    const auto y = anonymize(src, {.alpha = a});
    const double peak = testing::averaged_peak_angle(y.samples, nfft);
    EXPECT_NEAR(peak, std::pow(0.8, a), 2 * bin) << "alpha " << a;
    EXPECT_GT(peak, prev);
    prev = peak;
  }
}

}  // namespace
}  // namespace voicemark::mcadams
