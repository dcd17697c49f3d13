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

// Synthetic Sorani-script corpora for offline runs: a polarity lexicon of
// pseudo-words, a raw crawl with annotation campaign, and an unlabeled pool.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ckbsent/annotation.hpp"
#include "ckbsent/augment.hpp"
#include "ckbsent/common.hpp"
#include "ckbsent/corpus.hpp"

namespace ckbsent {

struct SyntheticConfig {
  std::uint64_t seed = 2024;
  std::size_t positive_words = 300;
  std::size_t negative_words = 300;
  std::size_t filler_words = 800;
  ClassCounts gold_counts{292, 639, 254};
  std::size_t extra_annotated = 584;  // units that end up mixed, objective or none
  std::size_t pool_size = 7500;
  std::size_t non_kurdish = 60;       // Latin and Arabic rows for the prep filter
  double gold_emoji_rate = 0.3;
  double pool_emoji_rate = 0.5;
};

struct SyntheticBundle {
  PolarityMap lexicon;
  Dataset raw;                             // unfiltered crawl, unlabeled
  std::vector<AnnotationRecord> annotations;
  Dataset gold;                            // prep + aggregation of the above
  Dataset pool;                            // unlabeled, disjoint from gold
};

namespace detail {

/// Zipf-like sampler over ranks 0..n-1 with exponent 0.9.
class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), 0.9);
      cdf_[r] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }
  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

inline std::vector<std::string> pseudo_words(Rng& rng, std::size_t n, std::set<std::string>& used) {
  static const std::vector<char32_t> kLetters = {0x0627, 0x0628, 0x067E, 0x062A, 0x062C, 0x0686, 0x062D, 0x062E,
                                                 0x062F, 0x0631, 0x0695, 0x0632, 0x0698, 0x0633, 0x0634, 0x0639,
                                                 0x063A, 0x0641, 0x06A4, 0x0642, 0x06A9, 0x06AF, 0x0644, 0x06B5,
                                                 0x0645, 0x0646, 0x0648, 0x06C6, 0x06D5, 0x06BE, 0x06CC, 0x06CE};
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w;
    const std::size_t len = 3 + rng.below(4);
    for (std::size_t i = 0; i < len; ++i) unicode::append_utf8(w, kLetters[rng.below(kLetters.size())]);
    // A distinctive final letter keeps every generated text past the script filter.
    unicode::append_utf8(w, kDistinctiveLetters[rng.below(kDistinctiveLetters.size())]);
    if (used.insert(w).second) out.push_back(w);
  }
  return out;
}

struct Generator {
  const SyntheticConfig& cfg;
  std::vector<std::string> positive, negative, filler;
  ZipfSampler zpos, zneg, zfill;

  explicit Generator(const SyntheticConfig& c, Rng& rng)
      : cfg(c), zpos(c.positive_words), zneg(c.negative_words), zfill(c.filler_words) {
    std::set<std::string> used;
    positive = pseudo_words(rng, c.positive_words, used);
    negative = pseudo_words(rng, c.negative_words, used);
    filler = pseudo_words(rng, c.filler_words, used);
  }

  std::string text(Rng& rng, SentimentLabel truth, double emoji_rate) const {
    static const char* kPositiveEmoji[] = {"😊", "😍", "❤️", "👍"};
    static const char* kNegativeEmoji[] = {"😡", "😢", "💔", "👎"};
    static const char* kNeutralEmoji[] = {"🤔", "😐", "🙄"};
    std::vector<std::string> words;
    const std::size_t fill = 4 + rng.below(7);
    for (std::size_t i = 0; i < fill; ++i) words.push_back(filler[zfill(rng)]);
    auto pos = [&] { words.push_back(positive[zpos(rng)]); };
    auto neg = [&] { words.push_back(negative[zneg(rng)]); };
    switch (truth) {
      case SentimentLabel::Positive:
        for (std::size_t k = 1 + rng.below(2); k > 0; --k) pos();
        if (rng.bernoulli(0.2)) neg();
        break;
      case SentimentLabel::Negative:
        for (std::size_t k = 1 + rng.below(2); k > 0; --k) neg();
        if (rng.bernoulli(0.2)) pos();
        break;
      case SentimentLabel::Neutral:
        if (rng.bernoulli(0.3)) {
          pos();
          neg();
        }
        break;
    }
    rng.shuffle(words);
    if (rng.bernoulli(emoji_rate)) {
      const std::size_t kind = rng.bernoulli(0.7) ? index_of(truth) : rng.below(kNumClasses);
      const char* e = kind == 0   ? kPositiveEmoji[rng.below(4)]
                      : kind == 1 ? kNegativeEmoji[rng.below(4)]
                                  : kNeutralEmoji[rng.below(3)];
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), e);
    }
    std::string out;
    for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
    // Sprinkle raw-crawl orthography that normalization undoes.
    std::string raw;
    for (const auto& cp : unicode::decode(out)) {
      char32_t c = cp.value;
      if (c == 0x06A9 && rng.bernoulli(0.1)) c = 0x0643;
      if (c == 0x06CC && rng.bernoulli(0.1)) c = 0x064A;
      unicode::append_utf8(raw, c);
      if (c == ' ' && rng.bernoulli(0.03)) raw += ' ';
    }
    return raw;
  }
};

inline std::string id_of(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

}  // namespace detail

/// Deterministic in `cfg`. Gold comes from running the script filter and
/// the default aggregation over the generated crawl and annotations, so it
/// has exactly cfg.gold_counts documents.
inline SyntheticBundle make_synthetic(const SyntheticConfig& cfg = {}) {
  Rng rng(cfg.seed);
  const detail::Generator gen(cfg, rng);
  SyntheticBundle b;
  for (std::size_t i = 0; i < gen.positive.size(); ++i) b.lexicon[gen.positive[i]] = i % 5 < 2 ? 2 : 1;
  for (std::size_t i = 0; i < gen.negative.size(); ++i) b.lexicon[gen.negative[i]] = i % 5 < 2 ? -2 : -1;

  using SV = SentimentValue;
  const char* annotators[] = {"ann1", "ann2", "ann3"};
  auto annotate = [&](const std::string& id, std::vector<AnnotationLabel> labels) {
    for (std::size_t a = 0; a < labels.size(); ++a) b.annotations.push_back({id, annotators[a], labels[a]});
  };

  std::vector<Document> crawl;
  std::size_t tweet = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto truth = label_from_index(k);
    const SV value = k == 0 ? SV::Positive : k == 1 ? SV::Negative : SV::Neutral;
    for (std::size_t i = 0; i < cfg.gold_counts[k]; ++i) {
      const auto id = detail::id_of("t", tweet++);
      crawl.push_back(make_document(id, gen.text(rng, truth, cfg.gold_emoji_rate)));
      annotate(id, std::vector<AnnotationLabel>(2 + rng.below(2), AnnotationLabel::subjective(value)));
    }
  }
  for (std::size_t i = 0; i < cfg.extra_annotated; ++i) {
    const auto id = detail::id_of("t", tweet++);
    const auto truth = label_from_index(rng.below(kNumClasses));
    crawl.push_back(make_document(id, gen.text(rng, truth, cfg.gold_emoji_rate)));
    switch (i % 4) {
      case 0:
        annotate(id, {AnnotationLabel::objective(), AnnotationLabel::subjective(SV::Positive)});
        break;
      case 1:
        annotate(id, {AnnotationLabel::subjective(SV::Positive), AnnotationLabel::subjective(SV::Negative)});
        break;
      case 2:
        annotate(id, {AnnotationLabel::subjective(SV::NoneLabel), AnnotationLabel::subjective(SV::NoneLabel)});
        break;
      default:
        annotate(id, {AnnotationLabel::objective(), AnnotationLabel::objective()});
        break;
    }
  }
  for (std::size_t i = 0; i < cfg.non_kurdish; ++i) {
    const auto id = detail::id_of("x", i);
    crawl.push_back(make_document(id, i % 2 ? "great match today " + std::to_string(i) : "مرحبا بالعالم " + std::to_string(i)));
  }
  // Interleave so the crawl is not sorted by class.
  rng.shuffle(crawl);
  for (auto& d : crawl) b.raw.add(std::move(d));

  const auto kept = filter_corpus(b.raw, default_language_predicate()).kept;
  b.gold = to_classification_dataset(aggregate(group_by_unit(b.annotations)), kept).dataset;

  for (std::size_t i = 0; i < cfg.pool_size; ++i) {
    const auto truth = label_from_index(rng.below(kNumClasses));
    b.pool.add(make_document(detail::id_of("p", i), gen.text(rng, truth, cfg.pool_emoji_rate)));
  }
  return b;
}

}  // namespace ckbsent
