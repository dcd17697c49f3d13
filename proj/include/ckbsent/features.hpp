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

// Tokenization and TF-IDF vectorization.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "ckbsent/common.hpp"
#include "ckbsent/corpus.hpp"
#include "ckbsent/unicode.hpp"

namespace ckbsent {

using Tokens = std::vector<std::string>;

namespace detail {

inline void push_stripped(Tokens& out, const std::vector<unicode::CodePoint>& cps, std::size_t begin,
                          std::size_t end, std::string_view text) {
  while (begin < end && unicode::is_punct_or_symbol(cps[begin].value)) ++begin;
  while (end > begin && unicode::is_punct_or_symbol(cps[end - 1].value)) --end;
  if (begin == end) return;
  const std::size_t from = cps[begin].offset;
  const std::size_t to = cps[end - 1].offset + cps[end - 1].length;
  out.emplace_back(text.substr(from, to - from));
}

}  // namespace detail

/// Whitespace split; emoji sequences become standalone tokens; leading and
/// trailing punctuation and symbols are stripped from everything else.
inline Tokens tokenize(std::string_view text) {
  Tokens out;
  const auto cps = unicode::decode(text);
  const auto emoji = detail::emoji_spans(cps);
  std::size_t next_emoji = 0;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (unicode::is_whitespace(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t piece = i;
    while (i < cps.size() && !unicode::is_whitespace(cps[i].value)) {
      while (next_emoji < emoji.size() && emoji[next_emoji].end <= i) ++next_emoji;
      if (next_emoji < emoji.size() && emoji[next_emoji].begin == i) {
        detail::push_stripped(out, cps, piece, i, text);
        const auto& span = emoji[next_emoji];
        const std::size_t to = cps[span.end - 1].offset + cps[span.end - 1].length;
        out.emplace_back(text.substr(cps[span.begin].offset, to - cps[span.begin].offset));
        i = span.end;
        piece = i;
        continue;
      }
      ++i;
    }
    detail::push_stripped(out, cps, piece, i, text);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse vectors
// ---------------------------------------------------------------------------

struct SparseEntry {
  std::uint32_t index;
  double value;

  bool operator==(const SparseEntry&) const = default;
};

/// Entries strictly increasing by index, all indices below `dim`.
struct SparseVector {
  std::vector<SparseEntry> entries;
  std::size_t dim = 0;

  bool operator==(const SparseVector&) const = default;

  double norm() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.value * e.value;
    return std::sqrt(s);
  }

  /// Value at `index`, zero when absent.
  double at(std::uint32_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const SparseEntry& e, std::uint32_t i) { return e.index < i; });
    return it != entries.end() && it->index == index ? it->value : 0.0;
  }

  /// Builds from unordered (index, value) pairs; duplicate indices are summed.
  static SparseVector from_pairs(std::vector<SparseEntry> pairs, std::size_t dim) {
    std::sort(pairs.begin(), pairs.end(),
              [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
    SparseVector v;
    v.dim = dim;
    for (const auto& p : pairs) {
      if (p.index >= dim) throw DataError("sparse index out of range");
      if (!v.entries.empty() && v.entries.back().index == p.index) v.entries.back().value += p.value;
      else v.entries.push_back(p);
    }
    return v;
  }

  static SparseVector from_dense(const std::vector<double>& dense) {
    SparseVector v;
    v.dim = dense.size();
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (dense[i] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(i), dense[i]});
    }
    return v;
  }
};

inline double dot(const SparseVector& x, const double* dense) {
  double s = 0.0;
  for (const auto& e : x.entries) s += e.value * dense[e.index];
  return s;
}

// ---------------------------------------------------------------------------
// TF-IDF
// ---------------------------------------------------------------------------

/// Vocabulary in first-occurrence order with document frequencies and
/// smoothed idf = ln((1 + N) / (1 + df)) + 1. Immutable once fitted.
class TfidfModel {
 public:
  TfidfModel() = default;

  static TfidfModel fit(const std::vector<Tokens>& corpus) {
    if (corpus.empty()) throw DataError("fit_tfidf: empty corpus");
    TfidfModel m;
    m.n_docs_ = corpus.size();
    std::vector<std::size_t> last_seen;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      for (const auto& tok : corpus[d]) {
        auto [it, inserted] = m.vocab_.emplace(tok, m.tokens_.size());
        if (inserted) {
          m.tokens_.push_back(tok);
          m.df_.push_back(0);
          last_seen.push_back(static_cast<std::size_t>(-1));
        }
        if (last_seen[it->second] != d) {
          last_seen[it->second] = d;
          ++m.df_[it->second];
        }
      }
    }
    m.compute_idf();
    return m;
  }

  /// Rebuilds a model from stored statistics; idf is recomputed.
  static TfidfModel from_stats(std::size_t n_docs, std::vector<std::string> tokens,
                               std::vector<std::size_t> df) {
    if (tokens.size() != df.size()) throw DataError("tfidf: vocab/df size mismatch");
    TfidfModel m;
    m.n_docs_ = n_docs;
    m.tokens_ = std::move(tokens);
    m.df_ = std::move(df);
    for (std::size_t i = 0; i < m.tokens_.size(); ++i) {
      if (m.df_[i] == 0 || m.df_[i] > n_docs) throw DataError("tfidf: df out of range for " + m.tokens_[i]);
      if (!m.vocab_.emplace(m.tokens_[i], i).second) throw DataError("tfidf: duplicate token " + m.tokens_[i]);
    }
    m.compute_idf();
    return m;
  }

  /// Raw counts times idf over known tokens, L2-normalized unless all zero.
  SparseVector transform(const Tokens& doc) const {
    std::vector<SparseEntry> pairs;
    pairs.reserve(doc.size());
    for (const auto& tok : doc) {
      auto it = vocab_.find(tok);
      if (it == vocab_.end()) continue;
      pairs.push_back({static_cast<std::uint32_t>(it->second), 1.0});
    }
    SparseVector v = SparseVector::from_pairs(std::move(pairs), dim());
    for (auto& e : v.entries) e.value *= idf_[e.index];
    const double n = v.norm();
    if (n > 0.0) {
      for (auto& e : v.entries) e.value /= n;
    }
    return v;
  }

  std::size_t dim() const { return tokens_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::size_t>& df() const { return df_; }
  const std::vector<double>& idf() const { return idf_; }

  std::optional<std::size_t> index_of(const std::string& token) const {
    auto it = vocab_.find(token);
    if (it == vocab_.end()) return std::nullopt;
    return it->second;
  }

  nlohmann::json to_json() const {
    nlohmann::json vocab = nlohmann::json::array();
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      vocab.push_back({{"token", tokens_[i]}, {"index", i}, {"df", df_[i]}});
    }
    return {{"n_docs", n_docs_}, {"vocab", std::move(vocab)}};
  }

  static TfidfModel from_json(const nlohmann::json& j) {
    const auto n_docs = j.at("n_docs").get<std::size_t>();
    const auto& vocab = j.at("vocab");
    std::vector<std::string> tokens(vocab.size());
    std::vector<std::size_t> df(vocab.size());
    std::vector<bool> filled(vocab.size(), false);
    for (const auto& entry : vocab) {
      const auto idx = entry.at("index").get<std::size_t>();
      if (idx >= vocab.size() || filled[idx]) throw DataError("tfidf: vocab indices must be dense and unique");
      filled[idx] = true;
      tokens[idx] = entry.at("token").get<std::string>();
      df[idx] = entry.at("df").get<std::size_t>();
    }
    return from_stats(n_docs, std::move(tokens), std::move(df));
  }

 private:
  void compute_idf() {
    idf_.resize(df_.size());
    const double n = static_cast<double>(n_docs_);
    for (std::size_t i = 0; i < df_.size(); ++i) {
      idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df_[i]))) + 1.0;
    }
  }

  std::unordered_map<std::string, std::size_t> vocab_;
  std::vector<std::string> tokens_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::size_t n_docs_ = 0;
};

inline TfidfModel fit_tfidf(const std::vector<Tokens>& corpus) { return TfidfModel::fit(corpus); }

inline std::vector<Tokens> tokenize_all(const Dataset& ds) {
  std::vector<Tokens> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.push_back(tokenize(d.normalized_text));
  return out;
}

}  // namespace ckbsent
