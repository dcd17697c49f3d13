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
#include <variant>

#include "json.hpp"

#include "ckbsent/classifiers/linear.hpp"
#include "ckbsent/classifiers/tree.hpp"

namespace ckbsent {

enum class ModelKind : std::uint8_t { LogReg, LinearSvm, DecisionTree, RandomForest, BiLstm };

inline constexpr std::array<ModelKind, 5> kAllModelKinds = {
    ModelKind::LogReg, ModelKind::LinearSvm, ModelKind::DecisionTree, ModelKind::RandomForest,
    ModelKind::BiLstm};

/// Short names used on the command line and in reports.
inline std::string_view model_name(ModelKind k) {
  switch (k) {
    case ModelKind::LogReg:
      return "LR";
    case ModelKind::LinearSvm:
      return "SVM";
    case ModelKind::DecisionTree:
      return "DT";
    case ModelKind::RandomForest:
      return "RF";
    case ModelKind::BiLstm:
      return "BiLSTM";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "lr" || s == "logreg") return ModelKind::LogReg;
  if (s == "svm" || s == "linear_svm") return ModelKind::LinearSvm;
  if (s == "dt" || s == "decision_tree") return ModelKind::DecisionTree;
  if (s == "rf" || s == "random_forest") return ModelKind::RandomForest;
  if (s == "bilstm") return ModelKind::BiLstm;
  return std::nullopt;
}

using ClassicalModel = std::variant<LinearModel, DecisionTree, RandomForest>;

inline ClassicalModel train_classical(ModelKind kind, std::span<const SparseVector> X,
                                      std::span<const SentimentLabel> y, const TrainConfig& cfg = {}) {
  switch (kind) {
    case ModelKind::LogReg:
      return train_logreg(X, y, cfg);
    case ModelKind::LinearSvm:
      return train_linear_svm(X, y, cfg);
    case ModelKind::DecisionTree:
      return train_decision_tree(X, y, cfg);
    case ModelKind::RandomForest:
      return train_random_forest(X, y, cfg);
    case ModelKind::BiLstm:
      break;
  }
  throw DataError("BiLSTM is not a sparse-feature model");
}

inline Prediction predict(const ClassicalModel& model, const SparseVector& x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

// ---------------------------------------------------------------------------
// JSON model files. Reals are stored as decimal strings with 17 significant
// digits so a save/load cycle is bit-exact.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json reals_to_json(const double* v, std::size_t n) {
  nlohmann::json a = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) a.push_back(exact_decimal(v[i]));
  return a;
}

inline std::vector<double> reals_from_json(const nlohmann::json& a) {
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& s : a) out.push_back(std::stod(s.get<std::string>()));
  return out;
}

inline nlohmann::json class_order_json() {
  nlohmann::json a = nlohmann::json::array();
  for (auto l : kClassOrder) a.push_back(std::string(to_string(l)));
  return a;
}

inline void check_class_order(const nlohmann::json& j) {
  if (j.at("class_order") != class_order_json()) throw DataError("model file has an unexpected class_order");
}

inline nlohmann::json tree_to_json(const DecisionTree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) {
    if (n.is_leaf()) {
      nodes.push_back({{"counts", n.class_counts}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", exact_decimal(n.threshold)},
                       {"left", n.left},
                       {"right", n.right},
                       {"counts", n.class_counts}});
    }
  }
  return {{"dim", t.dim}, {"nodes", std::move(nodes)}};
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree t;
  t.dim = j.at("dim").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.class_counts = n.at("counts").get<ClassHistogram>();
    if (n.contains("feature")) {
      node.feature = n["feature"].get<std::int32_t>();
      node.threshold = std::stod(n.at("threshold").get<std::string>());
      node.left = n.at("left").get<std::uint32_t>();
      node.right = n.at("right").get<std::uint32_t>();
    }
    t.nodes.push_back(node);
  }
  for (const auto& n : t.nodes) {
    if (!n.is_leaf() && (n.left >= t.nodes.size() || n.right >= t.nodes.size())) {
      throw DataError("decision tree node points outside the node array");
    }
  }
  if (t.nodes.empty()) throw DataError("decision tree without nodes");
  return t;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ClassicalModel& model) {
  nlohmann::json j;
  j["class_order"] = detail::class_order_json();
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          j["kind"] = m.kind == LinearModel::Kind::LogisticRegression ? "logreg" : "linear_svm";
          j["dim"] = m.dim;
          j["weights"] = detail::reals_to_json(m.weights.data(), m.weights.size());
          j["bias"] = detail::reals_to_json(m.bias.data(), m.bias.size());
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          j["kind"] = "decision_tree";
          j["tree"] = detail::tree_to_json(m);
        } else {
          j["kind"] = "random_forest";
          j["per_tree_seeds"] = m.per_tree_seeds;
          nlohmann::json trees = nlohmann::json::array();
          for (const auto& t : m.trees) trees.push_back(detail::tree_to_json(t));
          j["trees"] = std::move(trees);
        }
      },
      model);
  return j;
}

inline ClassicalModel model_from_json(const nlohmann::json& j) {
  detail::check_class_order(j);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "logreg" || kind == "linear_svm") {
    LinearModel m;
    m.kind = kind == "logreg" ? LinearModel::Kind::LogisticRegression : LinearModel::Kind::LinearSvm;
    m.dim = j.at("dim").get<std::size_t>();
    m.weights = detail::reals_from_json(j.at("weights"));
    const auto bias = detail::reals_from_json(j.at("bias"));
    if (m.weights.size() != kNumClasses * m.dim || bias.size() != kNumClasses) {
      throw DataError("linear model parameter shape mismatch");
    }
    std::copy(bias.begin(), bias.end(), m.bias.begin());
    return m;
  }
  if (kind == "decision_tree") return detail::tree_from_json(j.at("tree"));
  if (kind == "random_forest") {
    RandomForest f;
    f.per_tree_seeds = j.at("per_tree_seeds").get<std::vector<std::uint64_t>>();
    for (const auto& t : j.at("trees")) f.trees.push_back(detail::tree_from_json(t));
    if (f.trees.empty() || f.trees.size() != f.per_tree_seeds.size()) throw DataError("random forest shape mismatch");
    return f;
  }
  throw DataError("unknown model kind \"" + kind + "\"");
}

}  // namespace ckbsent
