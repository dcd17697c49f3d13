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

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ckbsent {

inline constexpr std::string_view kVersion = "0.1.0";

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data, schema violations, impossible balancing requests.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A translator, teacher or language identifier failed.
class ClientError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown during training (NaN loss, non-finite activations).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The three classification values. Declaration order is the canonical
/// tie-breaking order everywhere in the toolkit.
enum class SentimentLabel : std::uint8_t { Positive = 0, Negative = 1, Neutral = 2 };

inline constexpr std::size_t kNumClasses = 3;

inline constexpr std::array<SentimentLabel, kNumClasses> kClassOrder = {
    SentimentLabel::Positive, SentimentLabel::Negative, SentimentLabel::Neutral};

inline constexpr std::size_t index_of(SentimentLabel label) {
  return static_cast<std::size_t>(label);
}

inline constexpr std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Positive:
      return "positive";
    case SentimentLabel::Negative:
      return "negative";
    case SentimentLabel::Neutral:
      return "neutral";
  }
  return "?";
}

inline std::optional<SentimentLabel> parse_label(std::string_view s) {
  if (s == "positive") return SentimentLabel::Positive;
  if (s == "negative") return SentimentLabel::Negative;
  if (s == "neutral") return SentimentLabel::Neutral;
  return std::nullopt;
}

inline SentimentLabel label_from_index(std::size_t k) {
  if (k >= kNumClasses) throw DataError("class index out of range: " + std::to_string(k));
  return kClassOrder[k];
}

/// Index of the largest score; the earliest index wins ties.
template <typename Range>
std::size_t argmax(const Range& scores) {
  std::size_t best = 0;
  std::size_t i = 0;
  for (auto it = std::begin(scores); it != std::end(scores); ++it, ++i) {
    if (*it > *(std::begin(scores) + static_cast<std::ptrdiff_t>(best))) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Seeding and sampling. std:: distributions are implementation-defined, so
// everything that must be reproducible across toolchains goes through these.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw Error("Rng::below called with bound 0");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Decimal form that parses back to the identical double.
inline std::string exact_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace ckbsent
