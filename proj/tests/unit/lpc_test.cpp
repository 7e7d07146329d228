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

#include "voicemark/lpc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "voicemark/error.hpp"

namespace voicemark::lpc {
namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

// Random frame from a random stable order-20 model, which keeps r(0..20)
// positive definite and well enough conditioned to compare solvers.
std::vector<double> random_ar_frame(std::mt19937_64& rng, std::size_t n) {
  const auto poles = testing::random_stable_poles(rng, 20, 0, 0.3, 0.9);
  const auto c = testing::coeffs_from_poles(poles);
  return synthesis_filter_unchecked(noise(n, rng()), c);
}

TEST(Autocorrelate, Examples) {
  std::vector<double> impulse(16, 0.0);
  impulse[0] = 1.0;
  const auto r = autocorrelate(impulse, 4);
  EXPECT_EQ(r, (std::vector<double>{1, 0, 0, 0, 0}));
  const auto ones = autocorrelate(std::vector<double>(10, 1.0), 3);
  EXPECT_EQ(ones, (std::vector<double>{10, 9, 8, 7}));
  EXPECT_THROW(autocorrelate(impulse, 16), Error);
}

TEST(Autocorrelate, ZeroLagDominates) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = noise(64 + trial, rng());
    const auto r = autocorrelate(x, 20);
    for (double v : r) EXPECT_GE(r[0], std::abs(v));
  }
}

TEST(Levinson, WhiteSpectrumGivesZeroCoeffs) {
  std::vector<double> r(21, 0.0);
  r[0] = 2.5;
  const auto res = levinson_durbin(r, 20);
  for (double c : res.coeffs) EXPECT_EQ(c, 0.0);
  EXPECT_DOUBLE_EQ(res.gain, 2.5);
  EXPECT_EQ(res.effective_order, 20);
  EXPECT_FALSE(res.truncated);
}

TEST(Levinson, RecoversAr2) {
  auto x = noise(64000, 99);
  for (std::size_t n = 0; n < x.size(); ++n)
    x[n] += (n >= 1 ? 0.9 * x[n - 1] : 0.0) - (n >= 2 ? 0.2 * x[n - 2] : 0.0);
  const auto r = autocorrelate(x, 2);
  const auto res = levinson_durbin(r, 2);
  // Normal equations from the same sample autocorrelation
  const auto oracle = testing::solve_dense({{r[0], r[1]}, {r[1], r[0]}}, {r[1], r[2]});
  EXPECT_NEAR(res.coeffs[0], oracle[0], 1e-12);
  EXPECT_NEAR(res.coeffs[1], oracle[1], 1e-12);
  EXPECT_NEAR(res.coeffs[0], 0.9, 0.02);
  EXPECT_NEAR(res.coeffs[1], -0.2, 0.02);
}

TEST(Levinson, MatchesToeplitzSolveAtOrder20) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_ar_frame(rng, 320);
    const auto r = autocorrelate(x, 20);
    const auto res = levinson_durbin(r, 20);
    const auto oracle = testing::toeplitz_solve(r, 20);
    ASSERT_FALSE(res.truncated);
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(res.coeffs[i], oracle[i], 1e-8);
    for (double k : res.reflection) EXPECT_LT(std::abs(k), 1.0);
    EXPECT_TRUE(is_minimum_phase(res.coeffs));
  }
}

TEST(Levinson, GainEqualsResidualEnergyOfOptimalPredictor) {
  const auto x = noise(400, 5);
  const auto r = autocorrelate(x, 10);
  const auto res = levinson_durbin(r, 10);
  // E = r0 - sum c(i) r(i) is the minimized error of the normal equations.
  double e = r[0];
  for (int i = 0; i < 10; ++i) e -= res.coeffs[i] * r[i + 1];
  EXPECT_NEAR(res.gain, e, 1e-9 * r[0]);
  EXPECT_GT(res.gain, 0.0);
}

TEST(Levinson, Errors) {
  EXPECT_THROW(levinson_durbin(std::vector<double>{0.0, 0.0, 0.0}, 2), Error);
  EXPECT_THROW(levinson_durbin(std::vector<double>{1.0, 0.5}, 2), Error);
}

TEST(Levinson, IndefiniteInputTruncates) {
  // k1 = 0.5, then k2 = (1.2 - 0.25) / 0.75 > 1
  const auto res = levinson_durbin(std::vector<double>{1.0, 0.5, 1.2}, 2);
  EXPECT_TRUE(res.truncated);
  EXPECT_EQ(res.effective_order, 1);
  EXPECT_EQ(res.coeffs, (std::vector<double>{0.5, 0.0}));
  EXPECT_DOUBLE_EQ(res.gain, 0.75);
  EXPECT_TRUE(is_minimum_phase(res.coeffs));
}

TEST(InverseFilter, ZeroCoeffsPassThrough) {
  const auto x = noise(50, 3);
  EXPECT_EQ(inverse_filter(x, std::vector<double>(5, 0.0)), x);
}

TEST(InverseFilter, RecoversExcitation) {
  std::mt19937_64 rng(17);
  const auto c = testing::coeffs_from_poles(testing::random_stable_poles(rng, 20));
  const auto e = noise(500, 4);
  const auto s = synthesis_filter(e, c);
  const auto back = inverse_filter(s, c);
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(back[i], e[i], 1e-10 * (1 + std::abs(s[i])));
}

TEST(InverseFilter, IsLinear) {
  const std::vector<double> c{0.5, -0.3, 0.1};
  const auto x = noise(100, 1), y = noise(100, 2);
  std::vector<double> mix(100);
  for (int i = 0; i < 100; ++i) mix[i] = 2.0 * x[i] + 3.0 * y[i];
  const auto ex = inverse_filter(x, c), ey = inverse_filter(y, c), em = inverse_filter(mix, c);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(em[i], 2.0 * ex[i] + 3.0 * ey[i], 1e-12);
}

TEST(SynthesisFilter, RoundTripIsIdentity) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = analyze(random_ar_frame(rng, 320));
    const auto x = random_ar_frame(rng, 320);
    const auto y = synthesis_filter(inverse_filter(x, model.coeffs), model.coeffs);
    double err = 0, ref = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      err += (y[i] - x[i]) * (y[i] - x[i]);
      ref += x[i] * x[i];
    }
    EXPECT_LT(std::sqrt(err / ref), 1e-10);
  }
}

TEST(SynthesisFilter, Examples) {
  const auto zero = synthesis_filter(std::vector<double>(8, 0.0), std::vector<double>{0.5});
  for (double v : zero) EXPECT_EQ(v, 0.0);
  std::vector<double> impulse(12, 0.0);
  impulse[0] = 1.0;
  const auto y = synthesis_filter(impulse, std::vector<double>{0.5});
  for (std::size_t n = 0; n < y.size(); ++n) EXPECT_DOUBLE_EQ(y[n], std::pow(0.5, static_cast<double>(n)));
}

TEST(SynthesisFilter, RejectsUnstableModel) {
  EXPECT_THROW(synthesis_filter(std::vector<double>(4, 1.0), std::vector<double>{1.5}), Error);
  EXPECT_THROW(synthesis_filter(std::vector<double>(4, 1.0), std::vector<double>{1.0}), Error);
  // Roots 0.5 and 2: A(z) = (1-0.5z^-1)(1-2z^-1)
  EXPECT_THROW(synthesis_filter(std::vector<double>(4, 1.0), std::vector<double>{2.5, -1.0}), Error);
}

TEST(MinimumPhase, AgreesWithPoleMagnitudes) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto poles = testing::random_stable_poles(rng, 10, 2, 0.2, 0.95);
    const bool push_out = trial % 2 == 1;
    if (push_out) poles[0] = {1.05 + 0.1 * (trial % 5), 0.0};
    EXPECT_EQ(is_minimum_phase(testing::coeffs_from_poles(poles)), !push_out);
  }
  EXPECT_TRUE(is_minimum_phase(std::vector<double>{}));
}

TEST(Analyze, ResidualMatchesInverseFilter) {
  std::mt19937_64 rng(77);
  const auto x = random_ar_frame(rng, 320);
  const auto m = analyze(x);
  EXPECT_EQ(m.order(), kDefaultOrder);
  EXPECT_EQ(m.residual, inverse_filter(x, m.coeffs));
  EXPECT_GT(m.gain, 0.0);
  EXPECT_THROW(analyze(std::vector<double>(320, 0.0)), Error);
}

}  // namespace
}  // namespace voicemark::lpc
