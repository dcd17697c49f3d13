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

#include "ckbsent/annotation.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"

namespace ckbsent {
namespace {

using SV = SentimentValue;

AnnotationRecord rec(std::string unit, std::string annotator, AnnotationLabel label) {
  return {std::move(unit), std::move(annotator), label};
}

std::vector<AnnotationRecord> two_annotators(const std::vector<std::pair<SV, SV>>& pairs) {
  std::vector<AnnotationRecord> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto unit = "u" + std::to_string(i);
    out.push_back(rec(unit, "A", AnnotationLabel::subjective(pairs[i].first)));
    out.push_back(rec(unit, "B", AnnotationLabel::subjective(pairs[i].second)));
  }
  return out;
}

TEST(Alpha, PerfectAgreementIsExactlyOne) {
  const auto records = two_annotators({{SV::Positive, SV::Positive},
                                       {SV::Negative, SV::Negative},
                                       {SV::Neutral, SV::Neutral},
                                       {SV::Positive, SV::Positive},
                                       {SV::Negative, SV::Negative}});
  const auto r = krippendorff_alpha(records, projection::five_way);
  ASSERT_TRUE(r.alpha);
  EXPECT_EQ(*r.alpha, 1.0);
  EXPECT_EQ(r.observed_disagreement, 0.0);
}

TEST(Alpha, ComplementaryPairsMatchOracle) {
  const auto records = two_annotators({{SV::Positive, SV::Negative},
                                       {SV::Negative, SV::Positive},
                                       {SV::Positive, SV::Negative},
                                       {SV::Negative, SV::Positive}});
  const auto r = krippendorff_alpha(records, projection::five_way);
  const auto expected = oracle::pairwise_alpha(records, projection::five_way);
  ASSERT_TRUE(r.alpha && expected);
  EXPECT_NEAR(*r.alpha, *expected, 1e-12);
  // o_AB = o_BA = 4, n = 8: 1 - 7 * 8 / (4 * 4 * 2).
  EXPECT_NEAR(*r.alpha, -0.75, 1e-12);
}

TEST(Alpha, CoincidenceMatrixInvariants) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto records = testing_util::random_campaign(rng);
    if (!testing_util::pairable(records)) continue;
    const auto r = krippendorff_alpha(records, projection::five_way);
    double total = 0.0;
    for (std::size_t c = 0; c < r.values.size(); ++c) {
      for (std::size_t k = 0; k < r.values.size(); ++k) {
        EXPECT_GE(r.coincidences[c][k], 0.0);
        EXPECT_NEAR(r.coincidences[c][k], r.coincidences[k][c], 1e-12);
        total += r.coincidences[c][k];
      }
    }
    EXPECT_NEAR(total, r.n_total, 1e-9);
    if (r.alpha) EXPECT_NEAR(*r.alpha, 1.0 - r.observed_disagreement / r.expected_disagreement, 1e-12);
  }
}

TEST(Alpha, RandomCampaignsMatchOracle) {
  Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const auto records = testing_util::random_campaign(rng);
    if (!testing_util::pairable(records)) {
      EXPECT_THROW(krippendorff_alpha(records, projection::five_way), DataError);
      continue;
    }
    const auto r = krippendorff_alpha(records, projection::five_way);
    const auto expected = oracle::pairwise_alpha(records, projection::five_way);
    ASSERT_EQ(r.alpha.has_value(), expected.has_value());
    if (expected) EXPECT_NEAR(*r.alpha, *expected, 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Alpha, UndefinedWhenOnlyOneValue) {
  const auto records = two_annotators({{SV::Positive, SV::Positive}, {SV::Positive, SV::Positive}});
  const auto r = krippendorff_alpha(records, projection::five_way);
  EXPECT_FALSE(r.alpha.has_value());
  EXPECT_EQ(r.expected_disagreement, 0.0);
}

TEST(Alpha, NoPairableUnitIsAnError) {
  std::vector<AnnotationRecord> records = {rec("u1", "A", AnnotationLabel::subjective(SV::Positive)),
                                           rec("u2", "B", AnnotationLabel::subjective(SV::Negative))};
  EXPECT_THROW(krippendorff_alpha(records, projection::five_way), DataError);
}

TEST(Alpha, DuplicateJudgmentIsAnError) {
  std::vector<AnnotationRecord> records = {rec("u1", "A", AnnotationLabel::subjective(SV::Positive)),
                                           rec("u1", "A", AnnotationLabel::subjective(SV::Negative))};
  EXPECT_THROW(krippendorff_alpha(records, projection::five_way), DataError);
}

TEST(Alpha, InvariantUnderValueRenaming) {
  Rng rng(77);
  // Permutation of the nominal value set {positive, negative, neutral}.
  auto renamed = [](const AnnotationLabel& l) -> std::optional<std::string> {
    auto v = projection::three_way(l);
    if (!v) return v;
    if (*v == "positive") return "zeta";
    if (*v == "negative") return "alpha";
    return "mu";
  };
  for (int i = 0; i < 100; ++i) {
    const auto records = testing_util::random_campaign(rng);
    if (!testing_util::pairable(records)) continue;
    const auto a = krippendorff_alpha(records, projection::three_way);
    const auto b = krippendorff_alpha(records, renamed);
    ASSERT_EQ(a.alpha.has_value(), b.alpha.has_value());
    if (a.alpha) EXPECT_NEAR(*a.alpha, *b.alpha, 1e-12);
  }
}

TEST(Alpha, SingleAnnotationUnitDoesNotMatter) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    auto records = testing_util::random_campaign(rng);
    if (!testing_util::pairable(records)) continue;
    const auto before = krippendorff_alpha(records, projection::five_way);
    records.push_back(rec("lonely", "A", AnnotationLabel::subjective(SV::Mixed)));
    const auto after = krippendorff_alpha(records, projection::five_way);
    ASSERT_EQ(before.alpha.has_value(), after.alpha.has_value());
    if (before.alpha) EXPECT_EQ(*before.alpha, *after.alpha);
  }
}

TEST(Alpha, ProjectionsTreatObjectiveDifferently) {
  std::vector<AnnotationRecord> records = {
      rec("u1", "A", AnnotationLabel::objective()), rec("u1", "B", AnnotationLabel::objective()),
      rec("u2", "A", AnnotationLabel::subjective(SV::Positive)),
      rec("u2", "B", AnnotationLabel::subjective(SV::Positive)),
      rec("u3", "A", AnnotationLabel::subjective(SV::Negative)),
      rec("u3", "B", AnnotationLabel::subjective(SV::Negative))};
  EXPECT_EQ(krippendorff_alpha(records, projection::gated).values.size(), 3u);
  EXPECT_EQ(krippendorff_alpha(records, projection::five_way).values.size(), 2u);
  EXPECT_EQ(krippendorff_alpha(records, projection::subjectivity).values.size(), 2u);
}

TEST(Aggregate, DefaultRules) {
  UnitRecords units;
  units["agree"] = {rec("agree", "A", AnnotationLabel::subjective(SV::Positive)),
                    rec("agree", "B", AnnotationLabel::subjective(SV::Positive))};
  units["gate"] = {rec("gate", "A", AnnotationLabel::objective()),
                   rec("gate", "B", AnnotationLabel::subjective(SV::Negative))};
  units["clash"] = {rec("clash", "A", AnnotationLabel::subjective(SV::Positive)),
                    rec("clash", "B", AnnotationLabel::subjective(SV::Negative))};
  units["single"] = {rec("single", "A", AnnotationLabel::subjective(SV::Neutral))};
  units["obj"] = {rec("obj", "A", AnnotationLabel::objective()), rec("obj", "B", AnnotationLabel::objective())};
  const auto out = aggregate(units);
  EXPECT_EQ(out.at("agree"), AnnotationLabel::subjective(SV::Positive));
  EXPECT_EQ(out.at("gate"), AnnotationLabel::subjective(SV::Mixed));
  EXPECT_EQ(out.at("clash"), AnnotationLabel::subjective(SV::Mixed));
  EXPECT_EQ(out.at("single"), AnnotationLabel::subjective(SV::Neutral));
  EXPECT_EQ(out.at("obj"), AnnotationLabel::objective());
}

TEST(Aggregate, PluralityPolicyAndOverrides) {
  UnitRecords units;
  units["u"] = {rec("u", "A", AnnotationLabel::subjective(SV::Positive)),
                rec("u", "B", AnnotationLabel::subjective(SV::Positive)),
                rec("u", "C", AnnotationLabel::subjective(SV::Negative))};
  units["tie"] = {rec("tie", "A", AnnotationLabel::subjective(SV::Positive)),
                  rec("tie", "B", AnnotationLabel::subjective(SV::Negative))};
  EXPECT_EQ(aggregate(units, TiePolicy::Plurality).at("u"), AnnotationLabel::subjective(SV::Positive));
  EXPECT_EQ(aggregate(units, TiePolicy::Plurality).at("tie"), AnnotationLabel::subjective(SV::Mixed));
  EXPECT_EQ(aggregate(units, TiePolicy::Mixed).at("u"), AnnotationLabel::subjective(SV::Mixed));
  const auto fixed = aggregate(units, TiePolicy::Mixed, {{"tie", AnnotationLabel::subjective(SV::Negative)}});
  EXPECT_EQ(fixed.at("tie"), AnnotationLabel::subjective(SV::Negative));
}

TEST(Aggregate, OrderIndependent) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    auto records = testing_util::random_campaign(rng);
    if (i % 3 == 0 && !records.empty()) records.front().label = AnnotationLabel::objective();
    auto shuffled = records;
    rng.shuffle(shuffled);
    for (auto policy : {TiePolicy::Mixed, TiePolicy::Plurality}) {
      EXPECT_EQ(aggregate(group_by_unit(records), policy), aggregate(group_by_unit(shuffled), policy));
    }
  }
}

TEST(ToClassification, FiltersToThreeClasses) {
  Dataset docs;
  std::map<std::string, AnnotationLabel> agg;
  const std::vector<AnnotationLabel> labels = {
      AnnotationLabel::subjective(SV::Positive), AnnotationLabel::subjective(SV::Negative),
      AnnotationLabel::subjective(SV::Mixed), AnnotationLabel::subjective(SV::Neutral),
      AnnotationLabel::objective()};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    docs.add(make_document("d" + std::to_string(i), "text"));
    agg["d" + std::to_string(i)] = labels[i];
  }
  const auto out = to_classification_dataset(agg, docs);
  EXPECT_EQ(out.dataset.size(), 3u);
  EXPECT_EQ(out.dataset.class_counts(), (ClassCounts{1, 1, 1}));
  EXPECT_TRUE(out.warnings.empty());
}

TEST(ToClassification, AllMixedWarns) {
  Dataset docs;
  docs.add(make_document("a", "x"));
  const auto out = to_classification_dataset({{"a", AnnotationLabel::subjective(SV::Mixed)}}, docs);
  EXPECT_TRUE(out.dataset.empty());
  EXPECT_EQ(out.warnings.size(), 1u);
}

TEST(ToClassification, MissingAggregationIsAnError) {
  Dataset docs;
  docs.add(make_document("a", "x"));
  EXPECT_THROW(to_classification_dataset({}, docs), DataError);
}

TEST(ToClassification, GoldCampaignSizes) {
  // 1769 annotated units whose final labels include 292/639/254 usable ones.
  Dataset docs;
  UnitRecords units;
  std::size_t next = 0;
  auto add = [&](std::size_t count, AnnotationLabel a, AnnotationLabel b) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto id = "t" + std::to_string(next++);
      docs.add(make_document(id, "x"));
      units[id] = {rec(id, "A", a), rec(id, "B", b)};
    }
  };
  add(292, AnnotationLabel::subjective(SV::Positive), AnnotationLabel::subjective(SV::Positive));
  add(639, AnnotationLabel::subjective(SV::Negative), AnnotationLabel::subjective(SV::Negative));
  add(254, AnnotationLabel::subjective(SV::Neutral), AnnotationLabel::subjective(SV::Neutral));
  add(200, AnnotationLabel::objective(), AnnotationLabel::subjective(SV::Positive));
  add(150, AnnotationLabel::subjective(SV::Positive), AnnotationLabel::subjective(SV::Negative));
  add(134, AnnotationLabel::subjective(SV::NoneLabel), AnnotationLabel::subjective(SV::NoneLabel));
  add(100, AnnotationLabel::objective(), AnnotationLabel::objective());
  ASSERT_EQ(docs.size(), 1769u);
  const auto out = to_classification_dataset(aggregate(units), docs);
  EXPECT_EQ(out.dataset.size(), 1185u);
  EXPECT_EQ(out.dataset.class_counts(), (ClassCounts{292, 639, 254}));
}

}  // namespace
}  // namespace ckbsent
