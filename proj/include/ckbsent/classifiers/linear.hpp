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

// Linear models over sparse features: multinomial logistic regression
// (L-BFGS) and one-vs-rest linear SVM (full-batch subgradient descent).

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "ckbsent/common.hpp"
#include "ckbsent/features.hpp"

namespace ckbsent {

/// Hyperparameters shared by every classical learner. Fields a learner does
/// not use are ignored.
struct TrainConfig {
  /// Penalty weight; nullopt picks the learner default (see each trainer).
  std::optional<double> l2_strength;
  std::size_t max_iter = 0;  // 0 picks the learner default
  double tol = 1e-5;
  std::uint64_t seed = 0;
  /// Logistic regression only: random N(0, 0.1) start instead of zeros.
  std::optional<std::uint64_t> random_init_seed;

  // Trees.
  std::size_t min_samples_split = 2;
  enum class FeatureSubsample : std::uint8_t { Sqrt, All } feature_subsample = FeatureSubsample::Sqrt;
  std::size_t n_estimators = 30;
  bool bootstrap = true;
  std::size_t threads = 1;
};

struct Prediction {
  SentimentLabel label;
  std::array<double, kNumClasses> scores;
};

/// Row-major K x d weights plus K biases. Classes follow kClassOrder.
struct LinearModel {
  enum class Kind : std::uint8_t { LogisticRegression, LinearSvm } kind = Kind::LogisticRegression;
  std::size_t dim = 0;
  std::vector<double> weights;
  std::array<double, kNumClasses> bias{};

  const double* row(std::size_t k) const { return weights.data() + k * dim; }

  std::array<double, kNumClasses> decision(const SparseVector& x) const {
    if (x.dim != dim) throw DataError("feature dimension mismatch: model " + std::to_string(dim) +
                                      ", input " + std::to_string(x.dim));
    std::array<double, kNumClasses> z{};
    for (std::size_t k = 0; k < kNumClasses; ++k) z[k] = dot(x, row(k)) + bias[k];
    return z;
  }

  Prediction predict(const SparseVector& x) const {
    const auto z = decision(x);
    return {label_from_index(argmax(z)), z};
  }

  bool operator==(const LinearModel&) const = default;
};

namespace detail {

inline void check_training_input(std::span<const SparseVector> X, std::span<const SentimentLabel> y) {
  if (X.empty()) throw DataError("empty training set");
  if (X.size() != y.size()) throw DataError("feature/label count mismatch");
  const std::size_t d = X.front().dim;
  for (const auto& x : X) {
    if (x.dim != d) throw DataError("inconsistent feature dimensions in training set");
  }
}

inline std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::array<double, kNumClasses> p{};
  double s = 0.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    p[k] = std::exp(z[k] - m);
    s += p[k];
  }
  for (auto& v : p) v /= s;
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

/// Parameter layout for the optimizer: K*d weights followed by K biases.
inline std::size_t logreg_param_count(std::size_t dim) { return kNumClasses * dim + kNumClasses; }

/// L(W, b) = -sum_i ln softmax(W x_i + b)[y_i] + l2 * ||W||_F^2. Writes the
/// gradient into `grad` when non-null.
inline double logreg_objective(std::span<const double> params, std::span<const SparseVector> X,
                               std::span<const SentimentLabel> y, double l2, std::vector<double>* grad) {
  const std::size_t d = X.empty() ? 0 : X.front().dim;
  const double* W = params.data();
  const double* b = params.data() + kNumClasses * d;
  if (grad) grad->assign(params.size(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::array<double, kNumClasses> z{};
    for (std::size_t k = 0; k < kNumClasses; ++k) z[k] = dot(X[i], W + k * d) + b[k];
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    const double log_norm = m + std::log(s);
    const std::size_t yi = index_of(y[i]);
    loss += log_norm - z[yi];
    if (!grad) continue;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      const double r = std::exp(z[k] - log_norm) - (k == yi ? 1.0 : 0.0);
      double* gw = grad->data() + k * d;
      for (const auto& e : X[i].entries) gw[e.index] += r * e.value;
      (*grad)[kNumClasses * d + k] += r;
    }
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < kNumClasses * d; ++j) {
    penalty += W[j] * W[j];
    if (grad) (*grad)[j] += 2.0 * l2 * W[j];
  }
  return loss + l2 * penalty;
}

namespace detail {

inline double dot_dense(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Limited-memory BFGS with a backtracking Armijo line search. Stops when
/// the gradient infinity norm drops below `tol` or after `max_iter` steps.
template <typename Objective>
std::vector<double> lbfgs_minimize(Objective&& f, std::vector<double> x, std::size_t max_iter, double tol,
                                   std::size_t memory = 10) {
  std::vector<double> g;
  double fx = f(x, &g);
  if (!std::isfinite(fx)) throw NumericError("non-finite loss at the starting point");
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> direction(x.size()), x_new(x.size()), g_new;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    if (inf_norm(g) < tol) break;

    // Two-loop recursion.
    direction = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t j = s_hist.size(); j-- > 0;) {
      alpha[j] = rho_hist[j] * dot_dense(s_hist[j], direction);
      for (std::size_t i = 0; i < x.size(); ++i) direction[i] -= alpha[j] * y_hist[j][i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = dot_dense(s_hist.back(), y_hist.back()) / dot_dense(y_hist.back(), y_hist.back());
    for (auto& v : direction) v *= gamma;
    for (std::size_t j = 0; j < s_hist.size(); ++j) {
      const double beta = rho_hist[j] * dot_dense(y_hist[j], direction);
      for (std::size_t i = 0; i < x.size(); ++i) direction[i] += s_hist[j][i] * (alpha[j] - beta);
    }
    for (auto& v : direction) v = -v;

    double slope = dot_dense(g, direction);
    if (slope >= 0.0) {
      // Curvature history went stale; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < x.size(); ++i) direction[i] = -g[i];
      slope = -dot_dense(g, g);
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::sqrt(-slope)) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < x.size(); ++i) x_new[i] = x[i] + step * direction[i];
      f_new = f(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(f_new)) throw NumericError("non-finite loss during line search");
      break;  // no further decrease representable
    }
    std::vector<double> s(x.size()), yv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = g_new[i] - g[i];
    }
    const double sy = dot_dense(s, yv);
    if (sy > 1e-12 * dot_dense(yv, yv)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
  }
  return x;
}

}  // namespace detail

/// Multinomial logistic regression. Default penalty 0.5, i.e. the
/// C = 1 convention (sum of losses + ||W||^2 / (2C)). Bias is unpenalized.
inline LinearModel train_logreg(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                                const TrainConfig& cfg = {}) {
  detail::check_training_input(X, y);
  const double l2 = cfg.l2_strength.value_or(0.5);
  if (l2 < 0.0) throw DataError("l2_strength must be non-negative");
  const std::size_t d = X.front().dim;
  std::vector<double> params(logreg_param_count(d), 0.0);
  if (cfg.random_init_seed) {
    Rng rng(*cfg.random_init_seed);
    for (auto& p : params) p = 0.1 * rng.normal();
  }
  auto objective = [&](const std::vector<double>& p, std::vector<double>* g) {
    return logreg_objective(p, X, y, l2, g);
  };
  params = detail::lbfgs_minimize(objective, std::move(params), cfg.max_iter ? cfg.max_iter : 500, cfg.tol);

  LinearModel m;
  m.kind = LinearModel::Kind::LogisticRegression;
  m.dim = d;
  m.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(kNumClasses * d));
  for (std::size_t k = 0; k < kNumClasses; ++k) m.bias[k] = params[kNumClasses * d + k];
  for (double w : params) {
    if (!std::isfinite(w)) throw NumericError("logistic regression produced non-finite parameters");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Linear SVM
// ---------------------------------------------------------------------------

namespace detail {

/// argmin_b sum_i max(0, 1 - s_i (a_i + b)). The objective is piecewise
/// linear with slope -P + #{breakpoints <= b}, so the P-th smallest
/// breakpoint is a minimizer (P = number of positives).
inline double optimal_hinge_bias(const std::vector<double>& scores, const std::vector<signed char>& sign) {
  std::vector<double> breakpoints(scores.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (sign[i] > 0) {
      breakpoints[i] = 1.0 - scores[i];
      ++positives;
    } else {
      breakpoints[i] = -1.0 - scores[i];
    }
  }
  const std::size_t k = positives == 0 ? 0 : positives - 1;
  std::nth_element(breakpoints.begin(), breakpoints.begin() + static_cast<std::ptrdiff_t>(k), breakpoints.end());
  return breakpoints[k];
}

inline double hinge_objective(std::span<const SparseVector> X, const std::vector<signed char>& sign,
                              const std::vector<double>& w, double b, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    loss += std::max(0.0, 1.0 - sign[i] * (dot(X[i], w.data()) + b));
  }
  return loss / static_cast<double>(X.size()) + l2 * dot_dense(w, w);
}

/// Binary hinge problem: subgradient steps on w with step 1 / (2 l2 t),
/// projection onto the ball that must contain the optimum, exact
/// minimization over b after each step, and suffix averaging of w.
inline std::pair<std::vector<double>, double> train_binary_svm(std::span<const SparseVector> X,
                                                               const std::vector<signed char>& sign,
                                                               double l2, std::size_t iterations) {
  const std::size_t d = X.front().dim;
  const double n = static_cast<double>(X.size());
  const double radius = 1.0 / std::sqrt(2.0 * l2);
  std::vector<double> w(d, 0.0), avg(d, 0.0), grad(d), scores(X.size());
  const std::size_t average_from = iterations / 2;
  std::size_t averaged = 0;
  for (std::size_t t = 1; t <= iterations; ++t) {
    for (std::size_t i = 0; i < X.size(); ++i) scores[i] = dot(X[i], w.data());
    const double b = optimal_hinge_bias(scores, sign);
    for (std::size_t j = 0; j < d; ++j) grad[j] = 2.0 * l2 * w[j];
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (sign[i] * (scores[i] + b) < 1.0) {
        for (const auto& e : X[i].entries) grad[e.index] -= sign[i] * e.value / n;
      }
    }
    const double eta = 1.0 / (2.0 * l2 * static_cast<double>(t));
    for (std::size_t j = 0; j < d; ++j) w[j] -= eta * grad[j];
    const double norm = std::sqrt(dot_dense(w, w));
    if (norm > radius) {
      for (auto& v : w) v *= radius / norm;
    }
    if (t > average_from) {
      ++averaged;
      const double mix = 1.0 / static_cast<double>(averaged);
      for (std::size_t j = 0; j < d; ++j) avg[j] += (w[j] - avg[j]) * mix;
    }
  }
  for (std::size_t i = 0; i < X.size(); ++i) scores[i] = dot(X[i], avg.data());
  const double b = optimal_hinge_bias(scores, sign);
  return {std::move(avg), b};
}

}  // namespace detail

/// One-vs-rest linear SVM minimizing, per class k,
/// (1/n) sum_i max(0, 1 - s_i (w_k . x_i + b_k)) + l2 ||w_k||^2.
/// Default penalty 1 / (2n), the C = 1 convention. Full-batch, so the
/// result does not depend on the seed.
inline LinearModel train_linear_svm(std::span<const SparseVector> X, std::span<const SentimentLabel> y,
                                    const TrainConfig& cfg = {}) {
  detail::check_training_input(X, y);
  const double l2 = cfg.l2_strength.value_or(1.0 / (2.0 * static_cast<double>(X.size())));
  if (!(l2 > 0.0)) throw DataError("linear SVM needs a positive l2_strength");
  const std::size_t iterations = cfg.max_iter ? cfg.max_iter : 1000;
  LinearModel m;
  m.kind = LinearModel::Kind::LinearSvm;
  m.dim = X.front().dim;
  m.weights.assign(kNumClasses * m.dim, 0.0);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::vector<signed char> sign(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) sign[i] = index_of(y[i]) == k ? 1 : -1;
    auto [w, b] = detail::train_binary_svm(X, sign, l2, iterations);
    for (double v : w) {
      if (!std::isfinite(v)) throw NumericError("linear SVM produced non-finite weights");
    }
    std::copy(w.begin(), w.end(), m.weights.begin() + static_cast<std::ptrdiff_t>(k * m.dim));
    m.bias[k] = b;
  }
  return m;
}

}  // namespace ckbsent
