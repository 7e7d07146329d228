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


#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "voicemark/dsp.hpp"
#include "voicemark/lpc.hpp"
#include "voicemark/mcadams.hpp"
#include "voicemark/watermark.hpp"

namespace {

using namespace voicemark;

// AR(2) noise with a broad resonance; enough structure for order-20 LPC.
AudioBuffer test_signal(double seconds) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  std::vector<double> x(static_cast<std::size_t>(seconds * kPipelineRate));
  double y1 = 0, y2 = 0;
  for (double& v : x) {
    v = 1.6 * y1 - 0.8 * y2 + 0.05 * gauss(rng);
    y2 = y1;
    y1 = v;
  }
  return dsp::peak_normalize(AudioBuffer(std::move(x), kPipelineRate), -3.0);
}

std::vector<double> frame_coeffs() {
  const auto x = test_signal(0.02);
  return lpc::analyze(x.samples).coeffs;
}

void BM_Levinson(benchmark::State& state) {
  const auto x = test_signal(0.02);
  const auto r = lpc::autocorrelate(x.samples, 20);
  for (auto _ : state) benchmark::DoNotOptimize(lpc::levinson_durbin(r, 20));
}
BENCHMARK(BM_Levinson);

void BM_FindPoles(benchmark::State& state) {
  const auto c = frame_coeffs();
  for (auto _ : state) benchmark::DoNotOptimize(mcadams::find_poles(c));
}
BENCHMARK(BM_FindPoles);

void BM_TransformFrame(benchmark::State& state) {
  const auto x = test_signal(0.02);
  for (auto _ : state) benchmark::DoNotOptimize(mcadams::transform_frame(x.samples, 0.8, 20));
}
BENCHMARK(BM_TransformFrame);

void BM_Anonymize(benchmark::State& state) {
  const auto x = test_signal(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mcadams::anonymize(x, {.alpha = 0.8}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_Anonymize)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Bandpass(benchmark::State& state) {
  const auto x = test_signal(6.0);
  const auto bpf = dsp::design_bandpass(125.0, 4000.0, kPipelineRate);
  for (auto _ : state) benchmark::DoNotOptimize(dsp::apply_fir(x, bpf));
}
BENCHMARK(BM_Bandpass)->Unit(benchmark::kMillisecond);

void BM_PowerSpectrum(benchmark::State& state) {
  const auto x = test_signal(0.25);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dsp::power_spectrum(x.samples, n, kPipelineRate));
}
BENCHMARK(BM_PowerSpectrum)->Arg(4096)->Arg(8192);

void BM_Detect(benchmark::State& state) {
  const auto x = test_signal(6.0);
  const auto cfg = watermark::WatermarkConfig::for_payload(static_cast<int>(state.range(0)));
  const std::size_t n = cfg.capacity(x);
  for (auto _ : state) benchmark::DoNotOptimize(watermark::detect(x, cfg, n));
}
BENCHMARK(BM_Detect)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
