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
#pragma once

#include <cstddef>
#include <optional>

#include "voicemark/watermark.hpp"

namespace voicemark::metrics {

/// Positive class is bit 1.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

double ber(const watermark::BitStream& reference,
           const watermark::BitStream& detected);

ConfusionCounts confusion(const watermark::BitStream& reference,
                          const watermark::BitStream& detected);

// nullopt marks an undefined rate; it is never folded into 0. F1 is
// undefined when the reference holds no 1 bits.
struct Rates {
  std::optional<double> far;  // fp / (fp + tn)
  std::optional<double> frr;  // fn / (fn + tp)
  std::optional<double> f1;   // 2tp / (2tp + fp + fn)
};

Rates rates(const ConfusionCounts& counts);

/// Mean of the per-class F1 scores (bit 1 and bit 0 as positive class), over
/// the classes for which F1 is defined.
std::optional<double> macro_f1(const ConfusionCounts& counts);

}  // namespace voicemark::metrics
