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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "voicemark/error.hpp"
#include "voicemark/lpc.hpp"

namespace voicemark::mcadams {

namespace {

// Parlett-Reinsch balancing with radix-2 scaling; leaves eigenvalues intact.
void balance(Eigen::MatrixXd& a) {
  constexpr double kRadix = 2.0;
  constexpr double kRadixSq = kRadix * kRadix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(a(j, i));
        row += std::abs(a(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      const double sum = col + row;
      double f = 1.0;
      double g = row / kRadix;
      while (col < g) {
        f *= kRadix;
        col *= kRadixSq;
      }
      g = row * kRadix;
      while (col > g) {
        f /= kRadix;
        col /= kRadixSq;
      }
      if ((col + row) / f < 0.95 * sum) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

bool lex_less(Complex a, Complex b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

}  // namespace

PoleSet find_poles(std::span<const double> coeffs) {
  PoleSet out;
  const auto m = static_cast<Eigen::Index>(coeffs.size());
  if (m == 0) return out;
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw Error(ErrorKind::kNumerical, "non-finite LP coefficient");
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) companion(0, j) = coeffs[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  balance(companion);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical, "companion eigenvalue iteration did not converge");
  }

  std::vector<Complex> upper, lower;
  std::vector<double> real;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Complex z = solver.eigenvalues()[i];
    if (std::abs(z.imag()) <= kRealPoleTolerance) {
      real.push_back(z.real());
    } else if (z.imag() > 0.0) {
      upper.push_back(z);
    } else {
      lower.push_back(std::conj(z));
    }
  }
  if (upper.size() != lower.size()) {
    throw Error(ErrorKind::kNumerical, "complex roots do not pair into conjugates");
  }
  std::sort(upper.begin(), upper.end(), lex_less);
  std::sort(lower.begin(), lower.end(), lex_less);
  std::sort(real.begin(), real.end());

  out.poles.reserve(coeffs.size());
  for (std::size_t i = 0; i < upper.size(); ++i) {
    const Complex z = 0.5 * (upper[i] + lower[i]);
    out.poles.push_back(z);
    out.poles.push_back(std::conj(z));
  }
  for (double r : real) out.poles.emplace_back(r, 0.0);
  return out;
}

PoleSet warp_poles(const PoleSet& poles, double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "McAdams coefficient must be positive");
  }
  auto warp_upper = [alpha](Complex p) {
    const double phi = std::arg(p);
    const double warped = std::pow(phi, alpha);
    if (!(warped < std::numbers::pi) || warped == phi) return p;
    return std::polar(std::abs(p), warped);
  };
  PoleSet out;
  out.poles.reserve(poles.poles.size());
  for (const Complex& p : poles.poles) {
    if (p.imag() > 0.0) {
      out.poles.push_back(warp_upper(p));
    } else if (p.imag() < 0.0) {
      out.poles.push_back(std::conj(warp_upper(std::conj(p))));
    } else {
      out.poles.push_back(p);
    }
  }
  return out;
}

std::vector<double> poles_to_coeffs(const PoleSet& poles) {
  // b(z^-1) = prod (1 - p z^-1) = sum b_k z^-k, b_0 = 1.
  std::vector<Complex> b(poles.poles.size() + 1, Complex(0.0));
  b[0] = 1.0;
  std::size_t degree = 0;
  for (const Complex& p : poles.poles) {
    ++degree;
    for (std::size_t k = degree; k >= 1; --k) b[k] -= p * b[k - 1];
  }
  std::vector<double> c(poles.poles.size());
  for (std::size_t k = 1; k < b.size(); ++k) {
    if (std::abs(b[k].imag()) > 1e-6) {
      throw Error(ErrorKind::kNumerical,
                  "pole set is not conjugate-symmetric (imaginary residue " +
                      std::to_string(std::abs(b[k].imag())) + ")");
    }
    c[k - 1] = -b[k].real();
  }
  return c;
}

void McAdamsParams::validate() const {
  if (!(alpha > 0.0)) throw Error(ErrorKind::kInvalidArgument, "alpha must be positive");
  if (!(hop_ms > 0.0) || hop_ms > subframe_ms) {
    throw Error(ErrorKind::kInvalidArgument, "hop must satisfy 0 < hop <= sub-frame length");
  }
  if (order < 2) throw Error(ErrorKind::kInvalidArgument, "LPC order must be at least 2");
}

std::vector<double> transform_frame(std::span<const double> frame, double alpha, int order,
                                    AnonymizeStats* stats) {
  std::vector<double> passthrough(frame.begin(), frame.end());
  const auto r = lpc::autocorrelate(frame, static_cast<std::size_t>(order));
  if (r[0] < lpc::kSilenceEnergy) {
    if (stats) ++stats->silent;
    return passthrough;
  }
  const auto fit = lpc::levinson_durbin(r, order);
  const auto residual = lpc::inverse_filter(frame, fit.coeffs);
  try {
    const PoleSet warped = warp_poles(find_poles(fit.coeffs), alpha);
    const auto coeffs = poles_to_coeffs(warped);
    if (!lpc::is_minimum_phase(coeffs)) {
      throw Error(ErrorKind::kNumerical, "warped model is not minimum phase");
    }
    return lpc::synthesis_filter_unchecked(residual, coeffs);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNumerical) throw;
    if (stats) ++stats->solver_failures;
    return passthrough;
  }
}

AudioBuffer anonymize(const AudioBuffer& buffer, const McAdamsParams& params,
                      AnonymizeStats* stats) {
  params.validate();
  buffer.validate();
  if (buffer.sample_rate != kPipelineRate) {
    throw Error(ErrorKind::kInvalidArgument,
                "anonymization expects 16 kHz input, got " + std::to_string(buffer.sample_rate));
  }
  AnonymizeStats local;
  AnonymizeStats& st = stats ? *stats : local;
  st = {};

  const auto fs = static_cast<double>(buffer.sample_rate);
  const auto len = static_cast<std::ptrdiff_t>(std::llround(params.subframe_ms * fs / 1000.0));
  const auto hop = static_cast<std::ptrdiff_t>(std::llround(params.hop_ms * fs / 1000.0));
  if (len <= params.order || hop <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "sub-frame too short for the LPC order");
  }
  const auto n = static_cast<std::ptrdiff_t>(buffer.size());

  std::vector<double> window(static_cast<std::size_t>(len));
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    window[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
  }

  std::vector<double> acc(buffer.size(), 0.0);
  std::vector<double> weight(buffer.size(), 0.0);
  std::vector<double> frame(static_cast<std::size_t>(len));
  // Start early enough that every output sample is covered by a full window sum.
  for (std::ptrdiff_t start = hop - len; start < n; start += hop) {
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      const std::ptrdiff_t src = start + i;
      frame[static_cast<std::size_t>(i)] =
          (src >= 0 && src < n) ? buffer.samples[static_cast<std::size_t>(src)] : 0.0;
    }
    ++st.subframes;
    const auto out = transform_frame(frame, params.alpha, params.order, &st);
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      const std::ptrdiff_t dst = start + i;
      if (dst < 0 || dst >= n) continue;
      acc[static_cast<std::size_t>(dst)] += window[static_cast<std::size_t>(i)] * out[static_cast<std::size_t>(i)];
      weight[static_cast<std::size_t>(dst)] += window[static_cast<std::size_t>(i)];
    }
  }

  AudioBuffer result;
  result.sample_rate = buffer.sample_rate;
  result.samples.resize(buffer.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double v = weight[i] > 1e-9 ? acc[i] / weight[i] : buffer.samples[i];
    result.samples[i] = std::isfinite(v) ? v : 0.0;
  }
  return result;
}

}  // namespace voicemark::mcadams
