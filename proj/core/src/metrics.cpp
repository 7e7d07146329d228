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
#include "voicemark/metrics.hpp"

#include <string>

#include "voicemark/error.hpp"

namespace voicemark::metrics {

namespace {

void require_same_length(const watermark::BitStream& a, const watermark::BitStream& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kInvalidArgument, "bit-stream lengths differ: " +
                                                 std::to_string(a.size()) + " vs " +
                                                 std::to_string(b.size()));
  }
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

// F1 of one class; undefined when that class never occurs in the reference.
std::optional<double> class_f1(std::size_t hit, std::size_t miss, std::size_t false_alarm) {
  if (hit + miss == 0) return std::nullopt;
  return ratio(2 * hit, 2 * hit + miss + false_alarm);
}

}  // namespace

double ber(const watermark::BitStream& reference, const watermark::BitStream& detected) {
  require_same_length(reference, detected);
  if (reference.empty()) throw Error(ErrorKind::kInvalidArgument, "BER of empty bit-streams");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) errors += reference[i] != detected[i];
  return static_cast<double>(errors) / static_cast<double>(reference.size());
}

ConfusionCounts confusion(const watermark::BitStream& reference,
                          const watermark::BitStream& detected) {
  require_same_length(reference, detected);
  ConfusionCounts c;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const bool ref = reference[i];
    const bool det = detected[i];
    if (ref && det) ++c.tp;
    else if (!ref && det) ++c.fp;
    else if (ref && !det) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Rates rates(const ConfusionCounts& c) {
  return Rates{ratio(c.fp, c.fp + c.tn), ratio(c.fn, c.fn + c.tp), class_f1(c.tp, c.fn, c.fp)};
}

std::optional<double> macro_f1(const ConfusionCounts& c) {
  const auto f1_pos = class_f1(c.tp, c.fn, c.fp);
  const auto f1_neg = class_f1(c.tn, c.fp, c.fn);
  if (f1_pos && f1_neg) return 0.5 * (*f1_pos + *f1_neg);
  if (f1_pos) return f1_pos;
  return f1_neg;
}

}  // namespace voicemark::metrics
