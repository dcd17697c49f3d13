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

// Two-layer bidirectional LSTM classifier over token-id sequences.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ckbsent/classifiers/linear.hpp"
#include "ckbsent/common.hpp"
#include "ckbsent/features.hpp"

namespace ckbsent {

using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Vocabulary and encoding
// ---------------------------------------------------------------------------

class Vocabulary {
 public:
  static constexpr std::uint32_t kPad = 0;
  static constexpr std::uint32_t kUnknown = 1;

  /// Every token seen in `docs`, ids assigned in first-occurrence order from 2.
  static Vocabulary build(const std::vector<Tokens>& docs) {
    Vocabulary v;
    for (const auto& doc : docs) {
      for (const auto& tok : doc) v.add(tok);
    }
    return v;
  }

  static Vocabulary from_tokens(const std::vector<std::string>& tokens) {
    Vocabulary v;
    for (const auto& tok : tokens) {
      if (!v.add(tok)) throw DataError("vocabulary: duplicate token " + tok);
    }
    return v;
  }

  std::uint32_t id(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnknown : it->second;
  }

  /// Including the padding and unknown ids.
  std::size_t size() const { return tokens_.size() + 2; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  bool add(const std::string& token) {
    const auto next = static_cast<std::uint32_t>(tokens_.size() + 2);
    if (!ids_.emplace(token, next).second) return false;
    tokens_.push_back(token);
    return true;
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct EncodedSequence {
  std::vector<std::uint32_t> ids;  // exactly max_len entries, padded with kPad
  std::size_t length = 0;
};

/// Truncates to `max_len`; an empty document becomes a single unknown token.
inline EncodedSequence encode(const Tokens& doc, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len == 0) throw DataError("encode: max_len must be positive");
  EncodedSequence e;
  e.ids.assign(max_len, Vocabulary::kPad);
  if (doc.empty()) {
    e.ids[0] = Vocabulary::kUnknown;
    e.length = 1;
    return e;
  }
  e.length = std::min(doc.size(), max_len);
  for (std::size_t t = 0; t < e.length; ++t) e.ids[t] = vocab.id(doc[t]);
  return e;
}

struct SequenceBatch {
  std::vector<std::vector<std::uint32_t>> ids;  // B rows of L ids
  std::vector<std::size_t> lengths;
  std::vector<SentimentLabel> labels;  // empty for unlabeled inference

  std::size_t size() const { return lengths.size(); }
  std::size_t steps() const {
    std::size_t t = 0;
    for (auto l : lengths) t = std::max(t, l);
    return t;
  }
};

inline SequenceBatch make_batch(std::span<const EncodedSequence> seqs, std::span<const SentimentLabel> labels = {}) {
  SequenceBatch b;
  for (const auto& s : seqs) {
    b.ids.push_back(s.ids);
    b.lengths.push_back(s.length);
  }
  b.labels.assign(labels.begin(), labels.end());
  return b;
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Gate blocks are stacked in the order i, f, o, g.
struct LstmCell {
  Mat W;  // 4H x In
  Mat U;  // 4H x H
  Mat b;  // 4H x 1

  Eigen::Index hidden() const { return U.cols(); }
};

struct BiLstmShape {
  std::size_t vocab = 2;
  std::size_t embedding = 100;
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 32;
};

struct BiLstmParams {
  Mat embedding;  // V x E, row 0 is padding
  LstmCell l1f, l1b, l2f, l2b;
  Mat dense_w;  // K x 2*H2
  Mat dense_b;  // K x 1

  static BiLstmParams zeros(const BiLstmShape& s) {
    auto cell = [](std::size_t in, std::size_t h) {
      const auto H = static_cast<Eigen::Index>(h);
      return LstmCell{Mat::Zero(4 * H, static_cast<Eigen::Index>(in)), Mat::Zero(4 * H, H), Mat::Zero(4 * H, 1)};
    };
    BiLstmParams p;
    p.embedding = Mat::Zero(static_cast<Eigen::Index>(s.vocab), static_cast<Eigen::Index>(s.embedding));
    p.l1f = p.l1b = cell(s.embedding, s.hidden1);
    p.l2f = p.l2b = cell(2 * s.hidden1, s.hidden2);
    p.dense_w = Mat::Zero(kNumClasses, static_cast<Eigen::Index>(2 * s.hidden2));
    p.dense_b = Mat::Zero(kNumClasses, 1);
    return p;
  }

  BiLstmShape shape() const {
    return {static_cast<std::size_t>(embedding.rows()), static_cast<std::size_t>(embedding.cols()),
            static_cast<std::size_t>(l1f.hidden()), static_cast<std::size_t>(l2f.hidden())};
  }

  /// Named views of every parameter matrix in a fixed order.
  std::vector<std::pair<std::string, Mat*>> named() {
    std::vector<std::pair<std::string, Mat*>> out = {{"embedding", &embedding}};
    const std::pair<const char*, LstmCell*> cells[] = {{"l1f", &l1f}, {"l1b", &l1b}, {"l2f", &l2f}, {"l2b", &l2b}};
    for (auto [name, c] : cells) {
      out.emplace_back(std::string(name) + ".W", &c->W);
      out.emplace_back(std::string(name) + ".U", &c->U);
      out.emplace_back(std::string(name) + ".b", &c->b);
    }
    out.emplace_back("dense.W", &dense_w);
    out.emplace_back("dense.b", &dense_b);
    return out;
  }

  std::vector<std::pair<std::string, const Mat*>> named() const {
    std::vector<std::pair<std::string, const Mat*>> out;
    for (auto& [n, m] : const_cast<BiLstmParams*>(this)->named()) out.emplace_back(n, m);
    return out;
  }

  bool operator==(const BiLstmParams& o) const {
    const auto a = named(), b = o.named();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Mat& x = *a[i].second;
      const Mat& y = *b[i].second;
      if (x.rows() != y.rows() || x.cols() != y.cols() || x != y) return false;
    }
    return true;
  }
};

namespace detail {

inline void glorot(Mat& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
  }
}

}  // namespace detail

/// Glorot-uniform weights, uniform(-0.05, 0.05) embeddings, zero biases
/// except a forget-gate bias of 1.
inline BiLstmParams init_params(const BiLstmShape& s, std::uint64_t seed) {
  BiLstmParams p = BiLstmParams::zeros(s);
  Rng rng(seed);
  for (Eigen::Index j = 0; j < p.embedding.cols(); ++j) {
    for (Eigen::Index i = 1; i < p.embedding.rows(); ++i) p.embedding(i, j) = rng.uniform(-0.05, 0.05);
  }
  for (LstmCell* c : {&p.l1f, &p.l1b, &p.l2f, &p.l2b}) {
    detail::glorot(c->W, rng);
    detail::glorot(c->U, rng);
    c->b.middleRows(c->hidden(), c->hidden()).setOnes();
  }
  detail::glorot(p.dense_w, rng);
  return p;
}

struct BiLstmModel {
  BiLstmParams params;
  Vocabulary vocab;
  double dropout = 0.3;
  std::size_t max_len = 64;

  bool operator==(const BiLstmModel&) const = default;
};

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

struct DirectionCache {
  bool reverse = false;
  std::vector<Mat> h_prev, c_prev, i, f, o, g, tc;  // per time step
  std::vector<Eigen::RowVectorXd> active;          // 1 where t < length
  std::vector<Mat> out;                              // state after masking
  Mat h_final;
};

struct ForwardCache {
  std::vector<Mat> embedded;   // E x B per step
  DirectionCache l1f, l1b, l2f, l2b;
  std::vector<Mat> dropout;    // 2*H1 x B per step, empty outside train mode
  std::vector<Mat> l2_input;   // 2*H1 x B per step
  Mat features;                // 2*H2 x B
};

struct ForwardResult {
  Mat probabilities;  // K x B, one column per sequence
  ForwardCache cache;
};

namespace detail {

inline Mat sigmoid(const Mat& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

inline DirectionCache run_direction(const LstmCell& cell, const std::vector<Mat>& inputs,
                                    const std::vector<std::size_t>& lengths, bool reverse, const char* where) {
  const Eigen::Index H = cell.hidden();
  const auto B = static_cast<Eigen::Index>(lengths.size());
  const std::size_t T = inputs.size();
  DirectionCache c;
  c.reverse = reverse;
  for (auto* v : {&c.h_prev, &c.c_prev, &c.i, &c.f, &c.o, &c.g, &c.tc, &c.out}) v->resize(T);
  c.active.resize(T);
  Mat h = Mat::Zero(H, B), s = Mat::Zero(H, B);
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? T - 1 - step : step;
    Eigen::RowVectorXd act(B);
    for (Eigen::Index b = 0; b < B; ++b) act(b) = t < lengths[static_cast<std::size_t>(b)] ? 1.0 : 0.0;
    Mat z = cell.W * inputs[t] + cell.U * h;
    z.colwise() += cell.b.col(0);
    c.i[t] = sigmoid(z.topRows(H));
    c.f[t] = sigmoid(z.middleRows(H, H));
    c.o[t] = sigmoid(z.middleRows(2 * H, H));
    c.g[t] = z.bottomRows(H).array().tanh().matrix();
    Mat s_new = c.f[t].cwiseProduct(s) + c.i[t].cwiseProduct(c.g[t]);
    c.tc[t] = s_new.array().tanh().matrix();
    Mat h_new = c.o[t].cwiseProduct(c.tc[t]);
    c.h_prev[t] = h;
    c.c_prev[t] = s;
    for (Eigen::Index b = 0; b < B; ++b) {
      if (act(b) == 0.0) continue;
      if (!h_new.col(b).allFinite() || !s_new.col(b).allFinite()) {
        throw NumericError(std::string("non-finite LSTM state in ") + where + " at batch row " + std::to_string(b) +
                           ", step " + std::to_string(t));
      }
      h.col(b) = h_new.col(b);
      s.col(b) = s_new.col(b);
    }
    c.active[t] = std::move(act);
    c.out[t] = h;
  }
  c.h_final = h;
  return c;
}

inline void check_batch(const BiLstmParams& p, const SequenceBatch& batch) {
  if (batch.size() == 0) throw DataError("empty sequence batch");
  if (batch.ids.size() != batch.size()) throw DataError("sequence batch ids/lengths mismatch");
  if (!batch.labels.empty() && batch.labels.size() != batch.size()) throw DataError("sequence batch label count");
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch.lengths[b] == 0 || batch.lengths[b] > batch.ids[b].size()) {
      throw DataError("sequence " + std::to_string(b) + " has an invalid length");
    }
    for (std::size_t t = 0; t < batch.lengths[b]; ++t) {
      if (batch.ids[b][t] >= static_cast<std::size_t>(p.embedding.rows())) {
        throw DataError("token id out of vocabulary range in sequence " + std::to_string(b));
      }
    }
  }
}

}  // namespace detail

/// Probabilities are K x B. Dropout between the two recurrent layers is
/// active only in train mode, with its mask drawn from `seed`.
inline ForwardResult forward(const BiLstmParams& p, const SequenceBatch& batch, bool train_mode, std::uint64_t seed,
                             double dropout_rate) {
  detail::check_batch(p, batch);
  const std::size_t T = batch.steps();
  const auto B = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index E = p.embedding.cols(), H1 = p.l1f.hidden(), H2 = p.l2f.hidden();
  ForwardResult r;
  auto& c = r.cache;
  c.embedded.assign(T, Mat::Zero(E, B));
  for (std::size_t t = 0; t < T; ++t) {
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto& seq = batch.ids[static_cast<std::size_t>(b)];
      if (t < batch.lengths[static_cast<std::size_t>(b)]) c.embedded[t].col(b) = p.embedding.row(seq[t]).transpose();
    }
  }
  c.l1f = detail::run_direction(p.l1f, c.embedded, batch.lengths, false, "layer 1 forward");
  c.l1b = detail::run_direction(p.l1b, c.embedded, batch.lengths, true, "layer 1 backward");
  c.l2_input.resize(T);
  const bool drop = train_mode && dropout_rate > 0.0;
  if (drop) {
    const double keep = 1.0 - dropout_rate;
    Rng rng(seed);
    c.dropout.assign(T, Mat::Zero(2 * H1, B));
    for (auto& m : c.dropout) {
      for (Eigen::Index b = 0; b < B; ++b) {
        for (Eigen::Index i = 0; i < 2 * H1; ++i) m(i, b) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
      }
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    Mat x(2 * H1, B);
    x << c.l1f.out[t], c.l1b.out[t];
    c.l2_input[t] = drop ? Mat(x.cwiseProduct(c.dropout[t])) : x;
  }
  c.l2f = detail::run_direction(p.l2f, c.l2_input, batch.lengths, false, "layer 2 forward");
  c.l2b = detail::run_direction(p.l2b, c.l2_input, batch.lengths, true, "layer 2 backward");
  c.features.resize(2 * H2, B);
  c.features << c.l2f.h_final, c.l2b.h_final;
  Mat logits = p.dense_w * c.features;
  logits.colwise() += p.dense_b.col(0);
  r.probabilities.resize(kNumClasses, B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const double m = logits.col(b).maxCoeff();
    Eigen::VectorXd e = (logits.col(b).array() - m).exp().matrix();
    r.probabilities.col(b) = e / e.sum();
  }
  if (!r.probabilities.allFinite()) throw NumericError("non-finite class probabilities");
  return r;
}

inline ForwardResult forward(const BiLstmModel& m, const SequenceBatch& batch, bool train_mode, std::uint64_t seed) {
  return forward(m.params, batch, train_mode, seed, m.dropout);
}

// ---------------------------------------------------------------------------
// Backpropagation through time
// ---------------------------------------------------------------------------

namespace detail {

/// Accumulates parameter gradients into `grad` and returns dL/dx per step.
inline std::vector<Mat> backprop_direction(const LstmCell& cell, const DirectionCache& c,
                                           const std::vector<Mat>& inputs, Mat dh,
                                           const std::vector<Mat>* dout, LstmCell& grad) {
  const Eigen::Index H = cell.hidden();
  const std::size_t T = inputs.size();
  Mat ds = Mat::Zero(dh.rows(), dh.cols());
  std::vector<Mat> dx(T);
  Mat dz(4 * H, dh.cols());
  for (std::size_t k = T; k-- > 0;) {
    const std::size_t t = c.reverse ? T - 1 - k : k;
    if (dout) dh += (*dout)[t];
    const auto act = c.active[t].replicate(H, 1).array();
    const Mat dh_new = (dh.array() * act).matrix();
    const Mat ds_in = (ds.array() * act).matrix();
    const Mat dh_keep = dh - dh_new;
    const Mat ds_keep = ds - ds_in;
    const auto tc = c.tc[t].array();
    const auto ig = c.i[t].array(), fg = c.f[t].array(), og = c.o[t].array(), gg = c.g[t].array();
    const Eigen::ArrayXXd ds_new = ds_in.array() + dh_new.array() * og * (1.0 - tc.square());
    dz.topRows(H) = (ds_new * gg * ig * (1.0 - ig)).matrix();
    dz.middleRows(H, H) = (ds_new * c.c_prev[t].array() * fg * (1.0 - fg)).matrix();
    dz.middleRows(2 * H, H) = (dh_new.array() * tc * og * (1.0 - og)).matrix();
    dz.bottomRows(H) = (ds_new * ig * (1.0 - gg.square())).matrix();
    grad.W.noalias() += dz * inputs[t].transpose();
    grad.U.noalias() += dz * c.h_prev[t].transpose();
    grad.b += dz.rowwise().sum();
    dx[t].noalias() = cell.W.transpose() * dz;
    dh = cell.U.transpose() * dz + dh_keep;
    ds = (ds_new * fg).matrix() + ds_keep;
  }
  return dx;
}

}  // namespace detail

struct LossAndGrads {
  double loss = 0.0;
  BiLstmParams grads;
};

/// Mean cross-entropy over the batch and its exact gradient with respect to
/// every parameter, including the embedding rows that were looked up.
inline LossAndGrads loss_and_grads(const BiLstmParams& p, const SequenceBatch& batch, std::uint64_t seed,
                                   double dropout_rate, bool train_mode = true) {
  if (batch.labels.size() != batch.size()) throw DataError("loss_and_grads needs one label per sequence");
  auto fr = forward(p, batch, train_mode, seed, dropout_rate);
  const auto& c = fr.cache;
  const auto B = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index H1 = p.l1f.hidden(), H2 = p.l2f.hidden();
  LossAndGrads out;
  out.grads = BiLstmParams::zeros(p.shape());
  auto& g = out.grads;

  Mat dlogits = fr.probabilities;
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto y = static_cast<Eigen::Index>(index_of(batch.labels[static_cast<std::size_t>(b)]));
    out.loss -= std::log(fr.probabilities(y, b));
    dlogits(y, b) -= 1.0;
  }
  out.loss /= static_cast<double>(B);
  dlogits /= static_cast<double>(B);
  g.dense_w.noalias() = dlogits * c.features.transpose();
  g.dense_b = dlogits.rowwise().sum();
  const Mat dfeat = p.dense_w.transpose() * dlogits;

  const auto dx2f = detail::backprop_direction(p.l2f, c.l2f, c.l2_input, dfeat.topRows(H2), nullptr, g.l2f);
  const auto dx2b = detail::backprop_direction(p.l2b, c.l2b, c.l2_input, dfeat.bottomRows(H2), nullptr, g.l2b);
  const std::size_t T = c.embedded.size();
  std::vector<Mat> dout1f(T), dout1b(T);
  for (std::size_t t = 0; t < T; ++t) {
    Mat d = dx2f[t] + dx2b[t];
    if (!c.dropout.empty()) d = d.cwiseProduct(c.dropout[t]);
    dout1f[t] = d.topRows(H1);
    dout1b[t] = d.bottomRows(H1);
  }
  const Mat zero = Mat::Zero(H1, B);
  const auto dx1f = detail::backprop_direction(p.l1f, c.l1f, c.embedded, zero, &dout1f, g.l1f);
  const auto dx1b = detail::backprop_direction(p.l1b, c.l1b, c.embedded, zero, &dout1b, g.l1b);
  for (std::size_t t = 0; t < T; ++t) {
    for (Eigen::Index b = 0; b < B; ++b) {
      if (t >= batch.lengths[static_cast<std::size_t>(b)]) continue;
      g.embedding.row(batch.ids[static_cast<std::size_t>(b)][t]) += (dx1f[t].col(b) + dx1b[t].col(b)).transpose();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training and inference
// ---------------------------------------------------------------------------

struct NeuralTrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::size_t max_len = 64;
  std::size_t embedding_dim = 100;
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 32;
  double dropout = 0.3;
};

struct TrainingLog {
  std::vector<double> epoch_loss;
  std::vector<double> valid_accuracy;
  std::size_t best_epoch = 0;
};

/// Eval-mode predictions in batches of `batch_size`; scores are class
/// probabilities.
inline std::vector<Prediction> predict_sequences(const BiLstmModel& m, const std::vector<Tokens>& docs,
                                                 std::size_t batch_size = 64) {
  std::vector<Prediction> out;
  out.reserve(docs.size());
  for (std::size_t from = 0; from < docs.size(); from += batch_size) {
    const std::size_t to = std::min(docs.size(), from + batch_size);
    std::vector<EncodedSequence> seqs;
    for (std::size_t i = from; i < to; ++i) seqs.push_back(encode(docs[i], m.vocab, m.max_len));
    const auto probs = forward(m, make_batch(seqs), false, 0).probabilities;
    for (Eigen::Index b = 0; b < probs.cols(); ++b) {
      Prediction p{};
      for (std::size_t k = 0; k < kNumClasses; ++k) p.scores[k] = probs(static_cast<Eigen::Index>(k), b);
      p.label = label_from_index(argmax(p.scores));
      out.push_back(p);
    }
  }
  return out;
}

inline Prediction predict(const BiLstmModel& m, const Tokens& doc) { return predict_sequences(m, {doc}).front(); }

/// Adam with seeded per-epoch shuffling; returns the parameters from the
/// epoch with the best validation accuracy (earliest on ties).
inline BiLstmModel train_bilstm(const std::vector<Tokens>& train_docs, std::span<const SentimentLabel> train_y,
                                const std::vector<Tokens>& valid_docs, std::span<const SentimentLabel> valid_y,
                                const NeuralTrainConfig& cfg = {}, TrainingLog* log = nullptr) {
  if (train_docs.empty() || valid_docs.empty()) throw DataError("train_bilstm needs nonempty train and validation sets");
  if (train_docs.size() != train_y.size() || valid_docs.size() != valid_y.size()) {
    throw DataError("train_bilstm: document/label count mismatch");
  }
  if (cfg.batch_size == 0 || cfg.epochs == 0 || !(cfg.learning_rate > 0.0)) {
    throw DataError("train_bilstm: batch_size, epochs and learning_rate must be positive");
  }
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) throw DataError("train_bilstm: dropout must lie in [0, 1)");

  BiLstmModel model;
  model.vocab = Vocabulary::build(train_docs);
  model.dropout = cfg.dropout;
  model.max_len = cfg.max_len;
  model.params = init_params({model.vocab.size(), cfg.embedding_dim, cfg.hidden1, cfg.hidden2}, cfg.seed);

  std::vector<EncodedSequence> encoded;
  encoded.reserve(train_docs.size());
  for (const auto& d : train_docs) encoded.push_back(encode(d, model.vocab, cfg.max_len));

  auto views = model.params.named();
  std::vector<Mat> m1, m2;
  for (auto& [_, p] : views) {
    m1.push_back(Mat::Zero(p->rows(), p->cols()));
    m2.push_back(Mat::Zero(p->rows(), p->cols()));
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;

  BiLstmParams best = model.params;
  double best_acc = -1.0;
  std::vector<std::size_t> order(train_docs.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(derive_seed(cfg.seed, 2 * epoch + 1));
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t from = 0, batch_index = 0; from < order.size(); from += cfg.batch_size, ++batch_index) {
      const std::size_t to = std::min(order.size(), from + cfg.batch_size);
      std::vector<EncodedSequence> seqs;
      std::vector<SentimentLabel> labels;
      for (std::size_t i = from; i < to; ++i) {
        seqs.push_back(encoded[order[i]]);
        labels.push_back(train_y[order[i]]);
      }
      const auto lg = loss_and_grads(model.params, make_batch(seqs, labels),
                                     derive_seed(derive_seed(cfg.seed, 2 * epoch + 2), batch_index), cfg.dropout);
      if (!std::isfinite(lg.loss)) {
        throw NumericError("BiLSTM training diverged in epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += lg.loss * static_cast<double>(to - from);
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      const auto grads = lg.grads.named();
      for (std::size_t k = 0; k < views.size(); ++k) {
        const Mat& gk = *grads[k].second;
        m1[k] = beta1 * m1[k] + (1.0 - beta1) * gk;
        m2[k] = beta2 * m2[k] + (1.0 - beta2) * gk.cwiseProduct(gk);
        views[k].second->array() -=
            cfg.learning_rate * (m1[k].array() / c1) / ((m2[k].array() / c2).sqrt() + eps);
      }
    }
    const auto preds = predict_sequences(model, valid_docs);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i].label == valid_y[i];
    const double acc = static_cast<double>(hits) / static_cast<double>(preds.size());
    if (log) {
      log->epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
      log->valid_accuracy.push_back(acc);
    }
    if (acc > best_acc) {
      best_acc = acc;
      best = model.params;
      if (log) log->best_epoch = epoch;
    }
  }
  model.params = std::move(best);
  return model;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

inline nlohmann::json bilstm_to_json(const BiLstmModel& m) {
  nlohmann::json j;
  j["kind"] = "bilstm";
  nlohmann::json order = nlohmann::json::array();
  for (auto l : kClassOrder) order.push_back(std::string(to_string(l)));
  j["class_order"] = std::move(order);
  j["dropout"] = exact_decimal(m.dropout);
  j["max_len"] = m.max_len;
  j["vocab"] = m.vocab.tokens();
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, mat] : m.params.named()) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < mat->rows(); ++i) {
      for (Eigen::Index k = 0; k < mat->cols(); ++k) data.push_back(exact_decimal((*mat)(i, k)));
    }
    params[name] = {{"rows", mat->rows()}, {"cols", mat->cols()}, {"data", std::move(data)}};
  }
  j["params"] = std::move(params);
  return j;
}

inline BiLstmModel bilstm_from_json(const nlohmann::json& j) {
  if (j.at("kind") != "bilstm") throw DataError("not a BiLSTM model file");
  nlohmann::json order = nlohmann::json::array();
  for (auto l : kClassOrder) order.push_back(std::string(to_string(l)));
  if (j.at("class_order") != order) throw DataError("model file has an unexpected class_order");
  BiLstmModel m;
  m.dropout = std::stod(j.at("dropout").get<std::string>());
  m.max_len = j.at("max_len").get<std::size_t>();
  m.vocab = Vocabulary::from_tokens(j.at("vocab").get<std::vector<std::string>>());
  const auto& params = j.at("params");
  const auto e = params.at("embedding");
  const auto l1 = params.at("l1f.U"), l2 = params.at("l2f.U");
  m.params = BiLstmParams::zeros({m.vocab.size(), e.at("cols").get<std::size_t>(), l1.at("cols").get<std::size_t>(),
                                  l2.at("cols").get<std::size_t>()});
  for (auto& [name, mat] : m.params.named()) {
    const auto& p = params.at(name);
    if (p.at("rows").get<Eigen::Index>() != mat->rows() || p.at("cols").get<Eigen::Index>() != mat->cols()) {
      throw DataError("BiLSTM parameter " + name + " has the wrong shape");
    }
    const auto& data = p.at("data");
    if (static_cast<Eigen::Index>(data.size()) != mat->size()) throw DataError("BiLSTM parameter " + name + " size");
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < mat->rows(); ++i) {
      for (Eigen::Index k = 0; k < mat->cols(); ++k) (*mat)(i, k) = std::stod(data[n++].get<std::string>());
    }
  }
  return m;
}

}  // namespace ckbsent
