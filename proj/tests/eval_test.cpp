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

#include "ckbsent/eval.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

namespace ckbsent {
namespace {

using SL = SentimentLabel;

std::vector<std::size_t> indices(const std::vector<SL>& v) {
  std::vector<std::size_t> out;
  for (auto l : v) out.push_back(index_of(l));
  return out;
}

TEST(Confusion, Examples) {
  const std::vector<SL> refs = {SL::Positive, SL::Negative, SL::Neutral};
  const std::vector<SL> preds = {SL::Negative, SL::Negative, SL::Neutral};
  const auto cm = confusion(refs, preds);
  EXPECT_EQ(cm.counts[0][1], 1u);
  EXPECT_EQ(cm.counts[1][1], 1u);
  EXPECT_EQ(cm.counts[2][2], 1u);
  EXPECT_EQ(cm.total(), 3u);
  const auto diag = confusion(refs, refs);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(diag.counts[r][c], r == c ? 1u : 0u);
  }
  EXPECT_THROW(confusion(refs, std::vector<SL>{SL::Positive}), DataError);
}

TEST(Confusion, Conservation) {
  Rng rng(1);
  std::vector<SL> a, b;
  for (int i = 0; i < 1000; ++i) {
    a.push_back(label_from_index(rng.below(3)));
    b.push_back(label_from_index(rng.below(3)));
  }
  EXPECT_EQ(confusion(a, b).total(), 1000u);
}

TEST(Metrics, PerfectPredictions) {
  const std::vector<SL> refs = {SL::Positive, SL::Negative, SL::Neutral, SL::Negative};
  const auto r = evaluate(refs, refs);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.macro.f1, 1.0);
  EXPECT_EQ(r.weighted.precision, 1.0);
  EXPECT_EQ(format_scores(r), "1.00 1.00 1.00 1.00");
}

TEST(Metrics, BinaryHandExample) {
  // [[8, 2], [4, 6]] embedded in the first two classes.
  ConfusionMatrix cm;
  cm.counts[0][0] = 8;
  cm.counts[0][1] = 2;
  cm.counts[1][0] = 4;
  cm.counts[1][1] = 6;
  const auto r = metrics(cm);
  EXPECT_NEAR(r.per_class[0].precision, 8.0 / 12.0, 1e-15);
  EXPECT_NEAR(r.per_class[0].recall, 0.8, 1e-15);
  EXPECT_NEAR(r.per_class[0].f1, 2 * (8.0 / 12.0) * 0.8 / (8.0 / 12.0 + 0.8), 1e-15);
  EXPECT_NEAR(r.per_class[0].f1, 0.7273, 1e-4);
  EXPECT_NEAR(r.accuracy, 0.7, 1e-15);
  // The empty third class scores zero with warnings.
  EXPECT_EQ(r.per_class[2].f1, 0.0);
  EXPECT_EQ(r.warnings.size(), 2u);
}

TEST(Metrics, EmptyMatrixIsAnError) { EXPECT_THROW(metrics(ConfusionMatrix{}), DataError); }

ConfusionMatrix random_matrix(Rng& rng) {
  ConfusionMatrix cm;
  for (auto& row : cm.counts) {
    for (auto& c : row) c = rng.below(30);
  }
  cm.counts[0][0] += 1;
  return cm;
}

TEST(Metrics, WeightedRecallEqualsAccuracy) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto r = metrics(random_matrix(rng));
    EXPECT_NEAR(r.weighted.recall, r.accuracy, 1e-12);
  }
}

TEST(Metrics, BoundsAndMacroMean) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto r = metrics(random_matrix(rng));
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (const auto& m : r.per_class) {
      for (double v : {m.precision, m.recall, m.f1}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
      lo = std::min(lo, m.f1);
      hi = std::max(hi, m.f1);
      sum += m.f1;
    }
    EXPECT_NEAR(r.macro.f1, sum / 3.0, 1e-15);
    EXPECT_GE(r.macro.f1, lo - 1e-15);
    EXPECT_LE(r.macro.f1, hi + 1e-15);
  }
}

TEST(Metrics, InvariantUnderRelabeling) {
  Rng rng(4);
  const std::array<std::size_t, 3> perm = {2, 0, 1};
  for (int i = 0; i < 100; ++i) {
    const auto cm = random_matrix(rng);
    ConfusionMatrix p;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) p.counts[perm[r]][perm[c]] = cm.counts[r][c];
    }
    const auto a = metrics(cm), b = metrics(p);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(a.per_class[k], b.per_class[perm[k]]);
    EXPECT_NEAR(a.macro.f1, b.macro.f1, 1e-15);
    EXPECT_NEAR(a.weighted.f1, b.weighted.f1, 1e-15);
    EXPECT_EQ(a.accuracy, b.accuracy);
  }
}

TEST(Metrics, MatchPerPairOracle) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<SL> refs, preds;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t j = 0; j < n; ++j) {
      refs.push_back(label_from_index(rng.below(3)));
      preds.push_back(label_from_index(rng.below(3)));
    }
    const auto r = evaluate(refs, preds);
    const auto expected = oracle::pairwise_metrics(indices(refs), indices(preds), 3);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(r.per_class[k].precision, expected[k].precision, 1e-12);
      EXPECT_NEAR(r.per_class[k].recall, expected[k].recall, 1e-12);
      EXPECT_NEAR(r.per_class[k].f1, expected[k].f1, 1e-12);
      EXPECT_EQ(static_cast<double>(r.per_class[k].support), expected[k].support);
    }
  }
}

EvaluationReport with_weighted(double p, double r, double f, double acc) {
  EvaluationReport rep;
  rep.weighted = {p, r, f};
  rep.accuracy = acc;
  rep.tags = {"SVM", "Baseline", "Baseline", "without", 0};
  return rep;
}

TEST(Render, TwoDecimalRow) {
  const auto rep = with_weighted(0.53, 0.56, 0.53, 0.56);
  EXPECT_EQ(format_scores(rep), "0.53 0.56 0.53 0.56");
  const std::vector<EvaluationReport> reps = {rep};
  const auto table = render_table(reps);
  EXPECT_NE(table.find("SVM   | Baseline | Baseline | 0.53      | 0.56   | 0.53 | 0.56"), std::string::npos) << table;
  EXPECT_NE(table.find("Model | Test set | System   | Precision | Recall | F1   | Accuracy"), std::string::npos);
}

TEST(Render, CsvRoundTrip) {
  Rng rng(6);
  std::vector<EvaluationReport> reps;
  for (int i = 0; i < 20; ++i) {
    auto r = metrics(random_matrix(rng),
                     {"LR", i % 2 ? "Upsample" : "Baseline", "Upsample", i % 3 ? "with" : "with,out", std::uint64_t(i)});
    reps.push_back(r);
  }
  std::istringstream in(render_csv(reps, "ckbsent test"));
  const auto back = parse_csv(in);
  ASSERT_EQ(back.size(), reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    EXPECT_EQ(back[i].tags, reps[i].tags);
    EXPECT_EQ(back[i].per_class, reps[i].per_class);
    EXPECT_EQ(back[i].macro, reps[i].macro);
    EXPECT_EQ(back[i].weighted, reps[i].weighted);
    EXPECT_EQ(back[i].accuracy, reps[i].accuracy);
  }
}

TEST(Render, CsvErrors) {
  std::istringstream bad_header("a,b\n");
  EXPECT_THROW(parse_csv(bad_header), DataError);
  std::istringstream bad_row(std::string(kCsvHeader) + "\nLR,B,B,with,0,positive,x,1,1,3\n");
  EXPECT_THROW(parse_csv(bad_row), DataError);
}

TEST(Render, SizeCurve) {
  const std::vector<SizePoint> pts = {{"LR", "Baseline", "without", 948, 947, 0.5}};
  EXPECT_EQ(render_size_curve(pts),
            "model,system,emoji_mode,nominal_size,train_size,f1\nLR,Baseline,without,948,947,0.5\n");
}

}  // namespace
}  // namespace ckbsent
