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

// Small datasets and parameter sets shared by the unit and acceptance tests.

#include <utility>
#include <vector>

#include "ckbsent/classifiers.hpp"
#include "ckbsent/common.hpp"
#include "ckbsent/neural.hpp"

namespace ckbsent::fixtures {

using SL = SentimentLabel;

struct Toy {
  std::vector<SparseVector> X;
  std::vector<SL> y;
};

/// Two clusters in 2 dense features separated by a margin of at least 1:
/// class a has x0 in [1, 2], class b has x0 in [-2, -1].
inline Toy separable(std::uint64_t seed, SL a = SL::Positive, SL b = SL::Negative) {
  Rng rng(seed);
  Toy t;
  for (int i = 0; i < 20; ++i) {
    t.X.push_back(SparseVector::from_dense({rng.uniform(1.0, 2.0), rng.uniform(-1.0, 1.0)}));
    t.y.push_back(a);
    t.X.push_back(SparseVector::from_dense({rng.uniform(-2.0, -1.0), rng.uniform(-1.0, 1.0)}));
    t.y.push_back(b);
  }
  return t;
}

inline double accuracy(const ClassicalModel& m, const Toy& t) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < t.X.size(); ++i) hit += predict(m, t.X[i]).label == t.y[i];
  return static_cast<double>(hit) / static_cast<double>(t.X.size());
}

inline Toy xor_set() {
  Toy t;
  t.X = {SparseVector::from_dense({0, 0}), SparseVector::from_dense({0, 1}), SparseVector::from_dense({1, 0}),
         SparseVector::from_dense({1, 1})};
  t.y = {SL::Positive, SL::Negative, SL::Negative, SL::Positive};
  return t;
}

/// Noisy two-cluster benchmark in 6 features with 10% label flips.
inline std::pair<Toy, Toy> noisy_benchmark(std::uint64_t seed) {
  Rng rng(seed);
  auto draw = [&](std::size_t n) {
    Toy t;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pos = rng.bernoulli(0.5);
      std::vector<double> x(6);
      for (auto& v : x) v = rng.normal() + (pos ? 0.6 : -0.6);
      t.X.push_back(SparseVector::from_dense(x));
      bool label = pos;
      if (rng.bernoulli(0.1)) label = !label;
      t.y.push_back(label ? SL::Positive : SL::Negative);
    }
    return t;
  };
  Toy train = draw(200);
  Toy test = draw(200);
  return {train, test};
}

inline BiLstmParams random_params(const BiLstmShape& shape, std::uint64_t seed, double scale) {
  auto p = BiLstmParams::zeros(shape);
  Rng rng(seed);
  for (auto& [_, m] : p.named()) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-scale, scale);
  }
  return p;
}

inline SequenceBatch batch_of(std::vector<std::vector<std::uint32_t>> ids, std::vector<std::size_t> lengths,
                       std::vector<SL> labels = {}) {
  return {std::move(ids), std::move(lengths), std::move(labels)};
}

/// Shrunken network used for gradient checks.
inline const BiLstmShape kTiny{7, 5, 3, 2};

}  // namespace ckbsent::fixtures
