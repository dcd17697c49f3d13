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

#include "ckbsent/features.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "test_util.hpp"

namespace ckbsent {
namespace {

TEST(Tokenize, SplitsOnWhitespaceAndStripsPunctuation) {
  EXPECT_EQ(tokenize("  ئەمە، باشە!  "), (Tokens{"ئەمە", "باشە"}));
  EXPECT_EQ(tokenize("a-b"), (Tokens{"a-b"}));
  EXPECT_TRUE(tokenize("  ... ").empty());
}

TEST(Tokenize, EmojiAreStandaloneTokens) {
  EXPECT_EQ(tokenize("یاد😊بەخێر"), (Tokens{"یاد", "😊", "بەخێر"}));
  EXPECT_EQ(tokenize("❤️❤️"), (Tokens{"❤️", "❤️"}));
}

TEST(Tfidf, ThreeDocumentExample) {
  const std::vector<Tokens> corpus = {{"a", "b"}, {"a", "c"}, {"a"}};
  const auto m = TfidfModel::fit(corpus);
  ASSERT_EQ(m.dim(), 3u);
  EXPECT_EQ(m.tokens(), (std::vector<std::string>{"a", "b", "c"}));
  // idf = ln((1 + N) / (1 + df)) + 1 with N = 3.
  EXPECT_NEAR(m.idf()[0], 1.0, 1e-12);
  EXPECT_NEAR(m.idf()[1], std::log(2.0) + 1.0, 1e-12);
  EXPECT_NEAR(m.idf()[2], std::log(2.0) + 1.0, 1e-12);
  const auto v = m.transform({"a", "b"});
  const double b = std::log(2.0) + 1.0, norm = std::sqrt(1.0 + b * b);
  EXPECT_NEAR(v.at(0), 1.0 / norm, 1e-12);
  EXPECT_NEAR(v.at(1), b / norm, 1e-12);
  // Published hand values are rounded; exact ones are 0.5085423 and 0.8610370.
  EXPECT_NEAR(v.at(0), 0.508538, 1e-5);
  EXPECT_NEAR(v.at(1), 0.861039, 1e-5);
  EXPECT_EQ(v.at(2), 0.0);
}

TEST(Tfidf, UnknownTokensIgnoredAndEmptyIsZero) {
  const auto m = TfidfModel::fit({{"x", "y"}, {"y"}});
  const auto v = m.transform({"zzz"});
  EXPECT_TRUE(v.entries.empty());
  EXPECT_EQ(v.dim, 2u);
  EXPECT_TRUE(m.transform({}).entries.empty());
}

TEST(Tfidf, EmptyCorpusIsAnError) { EXPECT_THROW(TfidfModel::fit({}), DataError); }

TEST(Tfidf, RepeatedTokensUseRawCounts) {
  const auto m = TfidfModel::fit({{"a", "b"}, {"b"}});
  const auto v = m.transform({"a", "a", "b"});
  const double wa = 2.0 * m.idf()[0], wb = m.idf()[1];
  const double norm = std::sqrt(wa * wa + wb * wb);
  EXPECT_NEAR(v.at(0), wa / norm, 1e-12);
  EXPECT_NEAR(v.at(1), wb / norm, 1e-12);
}

std::vector<Tokens> random_corpus(Rng& rng) {
  std::vector<Tokens> corpus(1 + rng.below(12));
  for (auto& doc : corpus) {
    const std::size_t len = rng.below(8);
    for (std::size_t i = 0; i < len; ++i) doc.push_back("w" + std::to_string(rng.below(15)));
  }
  return corpus;
}

TEST(Tfidf, UnitNormOrZero) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto corpus = random_corpus(rng);
    const auto m = TfidfModel::fit(corpus);
    for (const auto& doc : corpus) {
      const auto v = m.transform(doc);
      if (doc.empty()) {
        EXPECT_EQ(v.norm(), 0.0);
      } else {
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
      }
      for (const auto& e : v.entries) EXPECT_GT(e.value, 0.0);
    }
  }
}

TEST(Tfidf, DocumentFrequencyMatchesRecount) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto corpus = random_corpus(rng);
    const auto m = TfidfModel::fit(corpus);
    std::map<std::string, std::size_t> df;
    for (const auto& doc : corpus) {
      std::set<std::string> seen(doc.begin(), doc.end());
      for (const auto& tok : seen) ++df[tok];
    }
    ASSERT_EQ(m.dim(), df.size());
    for (const auto& [tok, count] : df) {
      const auto idx = m.index_of(tok);
      ASSERT_TRUE(idx);
      EXPECT_EQ(m.df()[*idx], count);
      EXPECT_NEAR(m.idf()[*idx],
                  std::log((1.0 + static_cast<double>(corpus.size())) / (1.0 + static_cast<double>(count))) + 1.0,
                  1e-12);
    }
  }
}

TEST(Tfidf, JsonRoundTrip) {
  Rng rng(10);
  const auto corpus = random_corpus(rng);
  const auto m = TfidfModel::fit(corpus);
  const auto back = TfidfModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  EXPECT_EQ(back.tokens(), m.tokens());
  EXPECT_EQ(back.df(), m.df());
  EXPECT_EQ(back.idf(), m.idf());
  for (const auto& doc : corpus) EXPECT_EQ(back.transform(doc).entries.size(), m.transform(doc).entries.size());
}

TEST(SparseVector, FromPairsSortsAndSums) {
  const auto v = SparseVector::from_pairs({{3, 1.0}, {1, 2.0}, {3, 0.5}}, 5);
  ASSERT_EQ(v.entries.size(), 2u);
  EXPECT_EQ(v.entries[0].index, 1u);
  EXPECT_EQ(v.at(3), 1.5);
  EXPECT_THROW(SparseVector::from_pairs({{5, 1.0}}, 5), DataError);
}

}  // namespace
}  // namespace ckbsent
