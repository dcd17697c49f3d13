// Copyright 2026 The ckbsent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "ckbsent/common.hpp"
#include "ckbsent/unicode.hpp"

namespace ckbsent::testing_util {

/// Random UTF-8 drawn from an alphabet that exercises every normalization
/// and emoji rule: Arabic and Kurdish letters, kaf/yeh variants, tatweel,
/// combining hamza/madda, both digit sets, whitespace kinds, emoji with
/// joiners and variation selectors, punctuation and Latin.
inline std::string random_text(Rng& rng, std::size_t max_len) {
  static const std::vector<char32_t> kAlphabet = {
      U'a', U'b', U'Z', U'.', U',', U'!', U' ', U' ', U'\t', U'\n', 0x00A0, 0x3000,
      0x0627, 0x0628, 0x0643, 0x06A9, 0x064A, 0x0649, 0x06CC, 0x0647, 0x06D5, 0x0695,
      0x06B5, 0x06CE, 0x06C6, 0x0640, 0x0653, 0x0654, 0x0660, 0x0665, 0x06F3, 0x060C,
      0x200C, 0x200D, 0xFE0F, 0x1F60A, 0x1F914, 0x1F9E1, 0x2764, 0x1F469, 0x1F4BB, 0x1F3FD,
      U'0', U'9', 0x00E9, 0x0065, 0x0301};
  const std::size_t len = static_cast<std::size_t>(rng.below(max_len + 1));
  std::string out;
  for (std::size_t i = 0; i < len; ++i) unicode::append_utf8(out, kAlphabet[rng.below(kAlphabet.size())]);
  return out;
}

}  // namespace ckbsent::testing_util

#include "ckbsent/annotation.hpp"

namespace ckbsent::testing_util {

/// Small random annotation campaign: up to 6 units, up to 4 annotators,
/// up to 3 sentiment values, each judgment present with probability 0.7.
inline std::vector<AnnotationRecord> random_campaign(Rng& rng) {
  static const SentimentValue kValues[] = {SentimentValue::Positive, SentimentValue::Negative,
                                           SentimentValue::Neutral};
  const std::size_t units = 1 + rng.below(6);
  const std::size_t annotators = 2 + rng.below(3);
  const std::size_t values = 1 + rng.below(3);
  std::vector<AnnotationRecord> out;
  for (std::size_t u = 0; u < units; ++u) {
    for (std::size_t a = 0; a < annotators; ++a) {
      if (!rng.bernoulli(0.7)) continue;
      out.push_back({"u" + std::to_string(u), "a" + std::to_string(a),
                     AnnotationLabel::subjective(kValues[rng.below(values)])});
    }
  }
  return out;
}

/// Pairable means some unit has two or more judgments.
inline bool pairable(const std::vector<AnnotationRecord>& records) {
  std::map<std::string, int> per_unit;
  for (const auto& r : records) {
    if (++per_unit[r.unit_id] >= 2) return true;
  }
  return false;
}

}  // namespace ckbsent::testing_util
