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

// CART decision trees with the entropy criterion and bagged random forests.
// Features absent from a sparse vector take the value 0.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <span>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ckbsent/classifiers/linear.hpp"
#include "ckbsent/common.hpp"
#include "ckbsent/features.hpp"

namespace ckbsent {

using ClassHistogram = std::array<std::uint32_t, kNumClasses>;

/// Shannon entropy in nats of a class histogram.
inline double entropy(const ClassHistogram& counts) {
  double n = 0.0;
  for (auto c : counts) n += c;
  if (n == 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = c / n;
    h -= p * std::log(p);
  }
  return h;
}

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  ClassHistogram class_counts{};

  bool is_leaf() const { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

/// Binary tree of "x[feature] <= threshold" tests; node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::size_t dim = 0;

  const TreeNode& leaf_for(const SparseVector& x) const {
    if (x.dim != dim) throw DataError("feature dimension mismatch: model " + std::to_string(dim) +
                                      ", input " + std::to_string(x.dim));
    std::uint32_t at = 0;
    while (!nodes[at].is_leaf()) {
      const auto& n = nodes[at];
      at = x.at(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right;
    }
    return nodes[at];
  }

  /// Scores are the class proportions of the reached leaf.
  Prediction predict(const SparseVector& x) const {
    const auto& leaf = leaf_for(x);
    double total = 0.0;
    for (auto c : leaf.class_counts) total += c;
    Prediction p{};
    for (std::size_t k = 0; k < kNumClasses; ++k) p.scores[k] = leaf.class_counts[k] / total;
    p.label = label_from_index(argmax(p.scores));
    return p;
  }

  std::size_t depth() const {
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
      auto [at, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[at].is_leaf()) {
        stack.push_back({nodes[at].left, d + 1});
        stack.push_back({nodes[at].right, d + 1});
      }
    }
    return best;
  }

  bool operator==(const DecisionTree&) const = default;
};

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseVector> X, std::span<const SentimentLabel> y, const TrainConfig& cfg,
              bool subsample_features, std::uint64_t seed)
      : X_(X), y_(y), cfg_(cfg), subsample_(subsample_features), rng_(seed), buckets_(X.front().dim) {}

  DecisionTree build(std::vector<std::uint32_t> samples) {
    DecisionTree tree;
    tree.dim = X_.front().dim;
    struct Pending {
      std::uint32_t node;
      std::vector<std::uint32_t> samples;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, std::move(samples)});
    while (!stack.empty()) {
      Pending job = std::move(stack.back());
      stack.pop_back();
      ClassHistogram counts{};
      for (auto s : job.samples) ++counts[index_of(y_[s])];
      tree.nodes[job.node].class_counts = counts;

      const bool pure = std::count(counts.begin(), counts.end(), 0u) >= static_cast<long>(kNumClasses - 1);
      if (pure || job.samples.size() < cfg_.min_samples_split) continue;
      auto split = best_split(job.samples, counts);
      if (!split) continue;

      std::vector<std::uint32_t> left, right;
      for (auto s : job.samples) {
        (X_[s].at(split->feature) <= split->threshold ? left : right).push_back(s);
      }
      const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[job.node];
      node.feature = static_cast<std::int32_t>(split->feature);
      node.threshold = split->threshold;
      node.left = left_id;
      node.right = left_id + 1;
      stack.push_back({left_id + 1, std::move(right)});
      stack.push_back({left_id, std::move(left)});
    }
    return tree;
  }

 private:
  struct Split {
    std::uint32_t feature;
    double threshold;
  };

  struct ValueLabel {
    double value;
    std::uint8_t label;
  };

  // n * H(counts) computed as n ln n - sum c ln c.
  static double weighted_entropy(const ClassHistogram& counts) {
    double n = 0.0;
    double s = 0.0;
    for (auto c : counts) {
      if (c == 0) continue;
      n += c;
      s += c * std::log(static_cast<double>(c));
    }
    return n == 0.0 ? 0.0 : n * std::log(n) - s;
  }

  std::optional<Split> best_split(const std::vector<std::uint32_t>& samples, const ClassHistogram& parent) {
    touched_.clear();
    for (auto s : samples) {
      for (const auto& e : X_[s].entries) {
        auto& bucket = buckets_[e.index];
        if (bucket.empty()) touched_.push_back(e.index);
        bucket.push_back({e.value, static_cast<std::uint8_t>(index_of(y_[s]))});
      }
    }
    // Candidate features: those taking at least two distinct values here.
    std::vector<std::uint32_t> candidates;
    for (auto f : touched_) {
      const auto& bucket = buckets_[f];
      bool varies = bucket.size() < samples.size();
      for (std::size_t i = 1; !varies && i < bucket.size(); ++i) varies = bucket[i].value != bucket[0].value;
      if (varies) candidates.push_back(f);
    }
    std::sort(candidates.begin(), candidates.end());
    if (subsample_ && !candidates.empty()) {
      const auto want = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X_.front().dim))));
      if (want < candidates.size()) {
        for (std::size_t i = 0; i < want; ++i) {
          const std::size_t j = i + static_cast<std::size_t>(rng_.below(candidates.size() - i));
          std::swap(candidates[i], candidates[j]);
        }
        candidates.resize(want);
        std::sort(candidates.begin(), candidates.end());
      }
    }

    const double n = static_cast<double>(samples.size());
    const double parent_weighted = weighted_entropy(parent);
    std::optional<Split> best;
    double best_gain = -1.0;
    std::vector<ValueLabel> column;
    for (auto f : candidates) {
      const auto& bucket = buckets_[f];
      column.assign(bucket.begin(), bucket.end());
      ClassHistogram zeros = parent;
      for (const auto& v : bucket) --zeros[v.label];
      std::size_t zero_count = samples.size() - bucket.size();
      std::sort(column.begin(), column.end(), [](const ValueLabel& a, const ValueLabel& b) {
        return a.value < b.value;
      });
      // Merge the implicit zero block into the sorted column.
      auto zero_pos = std::lower_bound(column.begin(), column.end(), 0.0,
                                       [](const ValueLabel& a, double v) { return a.value < v; });
      std::vector<std::pair<double, ClassHistogram>> groups;  // distinct value -> counts
      auto push = [&](double value, std::size_t label, std::uint32_t count) {
        if (groups.empty() || groups.back().first != value) groups.push_back({value, ClassHistogram{}});
        groups.back().second[label] += count;
      };
      for (auto it = column.begin(); it != zero_pos; ++it) push(it->value, it->label, 1);
      if (zero_count > 0) {
        for (std::size_t k = 0; k < kNumClasses; ++k) {
          if (zeros[k]) push(0.0, k, zeros[k]);
        }
      }
      for (auto it = zero_pos; it != column.end(); ++it) push(it->value, it->label, 1);

      ClassHistogram left{};
      for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        for (std::size_t k = 0; k < kNumClasses; ++k) left[k] += groups[g].second[k];
        ClassHistogram right{};
        for (std::size_t k = 0; k < kNumClasses; ++k) right[k] = parent[k] - left[k];
        const double gain = (parent_weighted - weighted_entropy(left) - weighted_entropy(right)) / n;
        if (gain > best_gain + 1e-12) {
          const double lo = groups[g].first;
          const double hi = groups[g + 1].first;
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;
          best_gain = gain;
          best = Split{f, threshold};
        }
      }
    }
    for (auto f : touched_) buckets_[f].clear();
    return best;
  }

  std::span<const SparseVector> X_;
  std::span<const SentimentLabel> y_;
  const TrainConfig& cfg_;
  bool subsample_;
  Rng rng_;
  std::vector<std::vector<ValueLabel>> buckets_;
  std::vector<std::uint32_t> touched_;
};

}  // namespace detail

/// Grows an unpruned CART tree. A node splits while it is impure, holds at
/// least min_samples_split samples and some feature varies inside it, even
/// when the best split does not reduce entropy (XOR needs that).
inline DecisionTree train_decision_tree(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                                        const TrainConfig& cfg = {}) {
  detail::check_training_input(X, y);
  std::vector<std::uint32_t> all(X.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
  return detail::TreeBuilder(X, y, cfg, false, cfg.seed).build(std::move(all));
}

struct RandomForest {
  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> per_tree_seeds;

  /// Scores are vote fractions; each tree votes for its leaf's top class.
  Prediction predict(const SparseVector& x) const {
    std::array<double, kNumClasses> votes{};
    for (const auto& t : trees) votes[index_of(t.predict(x).label)] += 1.0;
    Prediction p{};
    for (std::size_t k = 0; k < kNumClasses; ++k) p.scores[k] = votes[k] / static_cast<double>(trees.size());
    p.label = label_from_index(argmax(p.scores));
    return p;
  }

  bool operator==(const RandomForest&) const = default;
};

/// Bagged trees with ceil(sqrt(d)) candidate features per split. Tree t
/// uses derive_seed(seed, t) for both its bootstrap and its feature draws,
/// so the forest does not depend on the number of worker threads.
inline RandomForest train_random_forest(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                                        const TrainConfig& cfg = {}) {
  detail::check_training_input(X, y);
  if (cfg.n_estimators == 0) throw DataError("random forest needs at least one estimator");
  RandomForest forest;
  forest.trees.resize(cfg.n_estimators);
  forest.per_tree_seeds.resize(cfg.n_estimators);
  for (std::size_t t = 0; t < cfg.n_estimators; ++t) forest.per_tree_seeds[t] = derive_seed(cfg.seed, t);

  const bool subsample = cfg.feature_subsample == TrainConfig::FeatureSubsample::Sqrt;
  auto grow = [&](std::size_t t) {
    Rng bootstrap_rng(forest.per_tree_seeds[t]);
    std::vector<std::uint32_t> samples(X.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = cfg.bootstrap ? static_cast<std::uint32_t>(bootstrap_rng.below(X.size()))
                                 : static_cast<std::uint32_t>(i);
    }
    detail::TreeBuilder builder(X, y, cfg, subsample, derive_seed(forest.per_tree_seeds[t], 1));
    forest.trees[t] = builder.build(std::move(samples));
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, cfg.n_estimators));
  if (workers == 1) {
    for (std::size_t t = 0; t < cfg.n_estimators; ++t) grow(t);
    return forest;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < cfg.n_estimators; t = next++) {
        try {
          grow(t);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return forest;
}

}  // namespace ckbsent
