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

#include <cmath>
#include <string>

#include "voicemark/error.hpp"

namespace voicemark::lpc {

std::vector<double> autocorrelate(std::span<const double> frame, std::size_t max_lag) {
  if (frame.size() <= max_lag) {
    throw Error(ErrorKind::kInvalidArgument,
                "frame of " + std::to_string(frame.size()) +
                    " samples is too short for lag " + std::to_string(max_lag));
  }
  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t n = 0; n + lag < frame.size(); ++n) acc += frame[n] * frame[n + lag];
    r[lag] = acc;
  }
  return r;
}

LevinsonResult levinson_durbin(std::span<const double> r, int order) {
  if (order < 0 || r.size() < static_cast<std::size_t>(order) + 1) {
    throw Error(ErrorKind::kInvalidArgument, "order exceeds autocorrelation length");
  }
  if (!(r[0] > 0.0)) {
    throw Error(ErrorKind::kNumerical, "r(0) must be positive (silent frame)");
  }
  const auto m = static_cast<std::size_t>(order);
  LevinsonResult out;
  out.coeffs.assign(m, 0.0);
  std::vector<double> a(m + 1, 0.0);  // a[1..i] are the predictor taps
  std::vector<double> prev(m + 1, 0.0);
  double err = r[0];

  for (std::size_t i = 1; i <= m; ++i) {
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc -= a[j] * r[i - j];
    const double k = acc / err;
    if (!std::isfinite(k) || std::abs(k) >= 1.0) {
      out.truncated = true;
      break;
    }
    prev = a;
    a[i] = k;
    for (std::size_t j = 1; j < i; ++j) a[j] = prev[j] - k * prev[i - j];
    err *= (1.0 - k * k);
    out.reflection.push_back(k);
    out.effective_order = static_cast<int>(i);
  }
  for (std::size_t j = 1; j <= m; ++j) out.coeffs[j - 1] = a[j];
  out.gain = err;
  return out;
}

std::vector<double> inverse_filter(std::span<const double> frame,
                                   std::span<const double> coeffs) {
  std::vector<double> e(frame.size());
  for (std::size_t n = 0; n < frame.size(); ++n) {
    double acc = frame[n];
    const std::size_t taps = std::min(coeffs.size(), n);
    for (std::size_t i = 1; i <= taps; ++i) acc -= coeffs[i - 1] * frame[n - i];
    e[n] = acc;
  }
  return e;
}

std::vector<double> synthesis_filter_unchecked(std::span<const double> residual,
                                               std::span<const double> coeffs) {
  std::vector<double> s(residual.size());
  for (std::size_t n = 0; n < residual.size(); ++n) {
    double acc = residual[n];
    const std::size_t taps = std::min(coeffs.size(), n);
    for (std::size_t i = 1; i <= taps; ++i) acc += coeffs[i - 1] * s[n - i];
    s[n] = acc;
  }
  return s;
}

std::vector<double> synthesis_filter(std::span<const double> residual,
                                     std::span<const double> coeffs) {
  if (!is_minimum_phase(coeffs)) {
    throw Error(ErrorKind::kNumerical, "synthesis filter is unstable");
  }
  return synthesis_filter_unchecked(residual, coeffs);
}

bool is_minimum_phase(std::span<const double> coeffs) {
  std::vector<double> a(coeffs.size() + 1, 0.0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!std::isfinite(coeffs[i])) return false;
    a[i + 1] = coeffs[i];
  }
  std::vector<double> next(a.size(), 0.0);
  for (std::size_t i = coeffs.size(); i >= 1; --i) {
    const double k = a[i];
    if (std::abs(k) >= 1.0) return false;
    const double denom = 1.0 - k * k;
    for (std::size_t j = 1; j < i; ++j) next[j] = (a[j] + k * a[i - j]) / denom;
    for (std::size_t j = 1; j < i; ++j) a[j] = next[j];
  }
  return true;
}

LpcModel analyze(std::span<const double> frame, int order) {
  const auto r = autocorrelate(frame, static_cast<std::size_t>(order));
  auto fit = levinson_durbin(r, order);
  LpcModel model;
  model.residual = inverse_filter(frame, fit.coeffs);
  model.coeffs = std::move(fit.coeffs);
  model.gain = fit.gain;
  return model;
}

}  // namespace voicemark::lpc
