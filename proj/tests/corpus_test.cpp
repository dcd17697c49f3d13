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

#include "ckbsent/corpus.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

namespace ckbsent {
namespace {

// Row 1 of the appendix examples (negative).
constexpr const char* kSampleRow1 =
    "ناخ منالی سپۆیلد و هیچ نه دیو چهن تینه گهشتوو چهن ناشیرین چهن بی سوود.";

TEST(Normalize, EmptyStaysEmpty) { EXPECT_EQ(normalize(""), ""); }

TEST(Normalize, ArabicKafBecomesKurdishKaf) {
  // "ko" spelled with U+0643 inside a word.
  const std::string in = "بكو";
  EXPECT_EQ(normalize(in), "بکو");
}

TEST(Normalize, YehVariantsUnify) {
  EXPECT_EQ(normalize("بي"), "بی");
  EXPECT_EQ(normalize("بى"), "بی");
}

TEST(Normalize, CollapsesWhitespace) { EXPECT_EQ(normalize("a  b\t c"), "a b c"); }

TEST(Normalize, TrimsAndRemovesTatweel) {
  EXPECT_EQ(normalize("  بــا  "), "با");
}

TEST(Normalize, DigitsToAscii) {
  EXPECT_EQ(normalize("١٢۳"), "123");
}

TEST(Normalize, HehLeftAlone) {
  const std::string in = "به";
  EXPECT_EQ(normalize(in), in);
}

TEST(Normalize, ComposesAfterTatweelRemoval) {
  // alef + tatweel + madda above: dropping the tatweel exposes a composable pair.
  const std::string out = normalize("اـٓ");
  EXPECT_EQ(out, "آ");
  EXPECT_EQ(normalize(out), out);
}

TEST(Normalize, IdempotentOnRandomText) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const std::string t = testing_util::random_text(rng, 30);
    const std::string once = normalize(t);
    EXPECT_EQ(normalize(once), once) << t;
  }
}

TEST(Normalize, NeverIncreasesVariantCount) {
  // Mapping groups: {kaf variants}, {yeh variants}. The count of distinct
  // members of each group present in the text never grows.
  const std::vector<std::vector<char32_t>> groups = {{0x0643, 0x06A9}, {0x064A, 0x0649, 0x06CC}};
  auto variants = [&](const std::string& s) {
    std::vector<std::size_t> out;
    const auto u = unicode::to_u32(s);
    for (const auto& g : groups) {
      std::size_t n = 0;
      for (char32_t c : g) n += u.find(c) != std::u32string::npos;
      out.push_back(n);
    }
    return out;
  };
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const std::string t = testing_util::random_text(rng, 20);
    const auto before = variants(t);
    const auto after = variants(normalize(t));
    for (std::size_t g = 0; g < groups.size(); ++g) EXPECT_LE(after[g], before[g]);
  }
}

TEST(ScriptFilter, LatinRejected) { EXPECT_FALSE(script_filter("hello world")); }

TEST(ScriptFilter, EmptyRejected) { EXPECT_FALSE(script_filter("")); }

TEST(ScriptFilter, KurdishWithAeAccepted) {
  // ئەمە: U+0626 U+06D5 U+0645 U+06D5; ە is distinctive.
  EXPECT_TRUE(script_filter("ئەمە باشە"));
}

TEST(ScriptFilter, ArabicWithoutDistinctiveLetterRejected) {
  // "مرحبا بالعالم": every code point is Arabic-script, none distinctive.
  EXPECT_FALSE(script_filter("مرحبا بالعالم"));
}

TEST(ScriptFilter, MostlyLatinWithOneKurdishLetterRejected) {
  EXPECT_FALSE(script_filter("hello world ە"));
}

TEST(ScriptFilter, AppendixRowOnePasses) { EXPECT_TRUE(script_filter(kSampleRow1)); }

TEST(LanguageId, PredicateVerdictsAndFailures) {
  Dataset raw;
  raw.add(make_document("k1", kSampleRow1));
  raw.add(make_document("en", "plain english"));
  raw.add(make_document("k2", "ئەمە باشە"));

  auto always = filter_corpus(raw, [](std::string_view) { return true; });
  EXPECT_EQ(always.kept.size(), 2u);
  EXPECT_EQ(always.stats.dropped.at("script"), 1u);

  auto never = filter_corpus(raw, [](std::string_view) { return false; });
  EXPECT_EQ(never.kept.size(), 0u);
  EXPECT_EQ(never.stats.dropped.at("language"), 2u);

  auto builtin = filter_corpus(raw, default_language_predicate());
  EXPECT_TRUE(builtin.kept.contains("k1"));

  try {
    filter_corpus(raw, [](std::string_view) -> bool { throw std::runtime_error("unreachable host"); });
    FAIL() << "expected ClientError";
  } catch (const ClientError& e) {
    EXPECT_NE(std::string(e.what()).find("k1"), std::string::npos);
  }
}

TEST(LanguageId, CharacterProfileRejectsArabicWithSharedLetter) {
  auto profile = character_profile_predicate();
  EXPECT_TRUE(profile(kSampleRow1));
  // Arabic sentence with ة and ض (absent from the Sorani alphabet) plus a پ.
  EXPECT_FALSE(profile("هذه مدرسة ضخمة پ"));
}

TEST(Emoji, NoneInPlainText) { EXPECT_TRUE(detect_emoji("abc").empty()); }

TEST(Emoji, SmileyOffsetInCodePoints) {
  const auto hits = detect_emoji("یاد 😊");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].offset, 4u);
  EXPECT_EQ(hits[0].sequence, std::u32string(U"\U0001F60A"));
}

TEST(Emoji, AdjacentWithoutJoinerStaySeparate) {
  const auto hits = detect_emoji("🧡🤔🤔");
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].offset, 0u);
  EXPECT_EQ(hits[1].offset, 1u);
  EXPECT_EQ(hits[2].offset, 2u);
}

TEST(Emoji, JoinerAndVariationSelectorMerge) {
  // woman + ZWJ + laptop, then heart + VS16.
  const auto hits = detect_emoji("\U0001F469‍\U0001F4BB x ❤️");
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].sequence.size(), 3u);
  EXPECT_EQ(hits[1].sequence, std::u32string(U"❤️"));
  EXPECT_EQ(hits[1].offset, 6u);
}

TEST(StripEmoji, Examples) {
  EXPECT_EQ(strip_emoji("abc"), "abc");
  EXPECT_EQ(strip_emoji("یاد 😊 بەخێر"), "یاد بەخێر");
}

TEST(StripEmoji, IdempotentAndClean) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const std::string t = testing_util::random_text(rng, 25);
    const std::string once = strip_emoji(t);
    EXPECT_EQ(strip_emoji(once), once);
    EXPECT_TRUE(detect_emoji(once).empty());
    EXPECT_FALSE(has_emoji(once));
  }
}

TEST(Document, DerivedFields) {
  auto d = make_document("x", "یاد   😊");
  EXPECT_TRUE(d.has_emoji);
  EXPECT_EQ(d.normalized_text, "یاد 😊");
  EXPECT_EQ(normalize(d.normalized_text), d.normalized_text);
}

TEST(Dataset, RejectsDuplicateIds) {
  Dataset ds;
  ds.add(make_document("a", "x"));
  EXPECT_THROW(ds.add(make_document("a", "y")), DataError);
}

Dataset labeled(std::size_t pos, std::size_t neg, std::size_t neu) {
  Dataset ds;
  std::size_t id = 0;
  auto add = [&](std::size_t n, SentimentLabel l) {
    for (std::size_t i = 0; i < n; ++i) ds.add(make_document("d" + std::to_string(id++), "t", l));
  };
  add(pos, SentimentLabel::Positive);
  add(neg, SentimentLabel::Negative);
  add(neu, SentimentLabel::Neutral);
  return ds;
}

TEST(Split, GoldCountsFloorArithmetic) {
  const auto split = split_dataset(labeled(292, 639, 254), 0.8, 42);
  EXPECT_EQ(split.train.class_counts(), (ClassCounts{233, 511, 203}));
  EXPECT_EQ(split.test.class_counts(), (ClassCounts{59, 128, 51}));
}

TEST(Split, SingleClassTenDocs) {
  const auto split = split_dataset(labeled(10, 0, 0), 0.8, 1);
  EXPECT_EQ(split.train.size(), 8u);
  EXPECT_EQ(split.test.size(), 2u);
}

TEST(Split, DeterministicAndPartitioning) {
  const auto ds = labeled(37, 81, 23);
  const auto a = split_dataset(ds, 0.8, 5);
  const auto b = split_dataset(ds, 0.8, 5);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train.size() + a.test.size(), ds.size());
  for (const auto& d : a.train) EXPECT_FALSE(a.test.contains(d.id));
  const auto c = split_dataset(ds, 0.8, 6);
  EXPECT_NE(a.train, c.train);
}

TEST(Split, PropertyPerClassFloor) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 2 + rng.below(40), n = 2 + rng.below(40), u = 2 + rng.below(40);
    const double ratio = 0.05 + 0.9 * rng.uniform();
    const auto split = split_dataset(labeled(p, n, u), ratio, rng.next());
    const ClassCounts sizes{p, n, u};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      EXPECT_EQ(split.train.class_counts()[k], static_cast<std::size_t>(std::floor(ratio * sizes[k] + 1e-9)));
      EXPECT_EQ(split.train.class_counts()[k] + split.test.class_counts()[k], sizes[k]);
    }
  }
}

TEST(Split, Errors) {
  EXPECT_THROW(split_dataset(labeled(1, 5, 5), 0.8, 0), DataError);
  EXPECT_THROW(split_dataset(labeled(5, 5, 5), 1.0, 0), DataError);
  Dataset unlabeled;
  unlabeled.add(make_document("a", "x"));
  EXPECT_THROW(split_dataset(unlabeled, 0.8, 0), DataError);
}

TEST(Jsonl, EmptyInput) {
  std::istringstream in("");
  EXPECT_TRUE(read_jsonl(in).empty());
}

TEST(Jsonl, RoundTripPreservesEverything) {
  Dataset ds;
  OrderedJson meta = OrderedJson::object();
  meta["annotations"] = OrderedJson::array({{{"annotator_id", "a1"}, {"subjectivity", "objective"}}});
  meta["retweets"] = 4;
  ds.add(make_document("1", "یاد 😊 بەخێر", SentimentLabel::Neutral, Source::Gold, meta));
  ds.add(make_document("2", "no label", std::nullopt, Source::Silver));
  ds.add(make_document("3", "ئەمە باشە", SentimentLabel::Positive));
  std::stringstream buf;
  write_jsonl(buf, ds);
  EXPECT_EQ(read_jsonl(buf), ds);
}

TEST(Jsonl, SchemaErrorsNameTheLine) {
  std::istringstream in("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"b\"}\n");
  try {
    read_jsonl(in, "f.jsonl");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("f.jsonl:2"), std::string::npos) << e.what();
  }
  std::istringstream dup("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
  EXPECT_THROW(read_jsonl(dup), DataError);
  std::istringstream garbage("{not json\n");
  EXPECT_THROW(read_jsonl(garbage), DataError);
}

}  // namespace
}  // namespace ckbsent
