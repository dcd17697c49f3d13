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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ckbsent/experiment.hpp"
#include "ckbsent/synthetic.hpp"

namespace ckbsent {
namespace {

struct Corpora {
  SyntheticBundle bundle;
  Dataset silver;
};

const Corpora& corpora() {
  static const Corpora c = [] {
    Corpora out;
    out.bundle = make_synthetic();
    IdentityTranslator tr;
    LexiconTeacher lex(out.bundle.lexicon);
    NoisyTeacher teacher(lex, 0.15, 11);
    out.silver = generate_silver(out.bundle.pool, tr, teacher, {1500, 500, 11}).silver;
    return out;
  }();
  return c;
}

ExperimentConfig fast_config() {
  ExperimentConfig cfg;
  cfg.seed = 3;
  cfg.settings.neural.embedding_dim = 8;
  cfg.settings.neural.hidden1 = 4;
  cfg.settings.neural.hidden2 = 3;
  cfg.settings.neural.epochs = 1;
  cfg.settings.neural.max_len = 16;
  cfg.settings.classical.n_estimators = 5;
  return cfg;
}

std::set<std::string> ids(const Dataset& ds) {
  std::set<std::string> out;
  for (const auto& d : ds) out.insert(d.id);
  return out;
}

TEST(BuildSystems, SizesAndDisjointness) {
  const auto& c = corpora();
  const auto cfg = fast_config();
  const auto sys = build_systems(c.bundle.gold, c.silver, cfg);
  const auto& base = sys.at(System::Baseline);
  EXPECT_EQ(base.nominal_size, 948u);
  EXPECT_EQ(sys.at(System::Upsample).nominal_size, 1680u);
  EXPECT_EQ(sys.at(System::Merged).nominal_size, 4080u);
  EXPECT_EQ(base.train.size() + base.test.size(), 1185u);
  EXPECT_EQ(sys.at(System::Upsample).train.size() + sys.at(System::Upsample).test.size(), 3u * 700u);
  EXPECT_EQ(sys.at(System::Merged).train.size() + sys.at(System::Merged).test.size(), 3u * 1700u);
  const auto base_test = ids(base.test);
  for (auto s : kAllSystems) {
    const auto& d = sys.at(s);
    const auto test = ids(d.test);
    for (const auto& doc : d.train) {
      EXPECT_FALSE(test.count(doc.id)) << doc.id;
      EXPECT_FALSE(base_test.count(doc.id)) << doc.id;
    }
    for (const auto& id : base_test) EXPECT_TRUE(test.count(id)) << id;
  }
}

TEST(BuildSystems, SingletonSilverClassGoesToTrain) {
  Dataset ds;
  ds.add(make_document("a", "x", SentimentLabel::Positive));
  ds.add(make_document("b", "y", SentimentLabel::Negative));
  ds.add(make_document("c", "z", SentimentLabel::Negative));
  const auto s = detail::split_allowing_singletons(ds, 0.5, 1);
  EXPECT_TRUE(s.train.contains("a"));
  EXPECT_EQ(s.train.size(), 2u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(TextClassifier, JsonRoundTripPredictsIdentically) {
  const auto& c = corpora();
  const auto cfg = fast_config();
  const auto split = split_dataset(c.bundle.gold, 0.8, 1);
  for (auto kind : kAllModelKinds) {
    const auto clf = train_text_classifier(kind, split.train, EmojiMode::Without, cfg.settings, 1);
    const auto back = TextClassifier::from_json(nlohmann::json::parse(clf.to_json().dump()));
    EXPECT_EQ(clf.predict_labels(split.test), back.predict_labels(split.test)) << model_name(kind);
  }
}

TEST(TextClassifier, EmojiModeChangesInputs) {
  const auto doc = make_document("e", "\xD8\xA8\xD8\xA7\xD8\xB4 \xF0\x9F\x98\x8A");
  EXPECT_NE(model_text(doc, EmojiMode::With), model_text(doc, EmojiMode::Without));
  EXPECT_EQ(tokenize(model_text(doc, EmojiMode::Without)).size(), 1u);
}

TEST(Experiment, RowInventoryAndByteIdenticalOutputs) {
  const auto& c = corpora();
  auto cfg = fast_config();
  IdentityTranslator tr;
  LexiconTeacher teacher(c.bundle.lexicon);
  const auto one = run_experiment(c.bundle.gold, c.silver, cfg, &tr, &teacher);
  // 5 models x (baseline + 2 systems x 2 test sets) x 2 modes + zero-shot.
  ASSERT_EQ(one.reports.size(), 51u);
  EXPECT_EQ(one.reports.back().tags.model, "ZeroShot");
  std::map<std::string, int> per_mode;
  for (const auto& r : one.reports) ++per_mode[r.tags.emoji_mode];
  EXPECT_EQ(per_mode["with"], 25);
  EXPECT_EQ(per_mode["without"], 26);
  // Per class, n - floor(0.8 n) gold documents are held out.
  const std::size_t held_out = (292 - 233) + (639 - 511) + (254 - 203);
  for (const auto& r : one.reports) {
    if (r.tags.test_set == "Baseline") EXPECT_EQ(r.total(), held_out);
  }

  cfg.threads = 4;
  const auto four = run_experiment(c.bundle.gold, c.silver, cfg, &tr, &teacher);
  EXPECT_EQ(render_csv(one.reports, output_header(cfg)), render_csv(four.reports, output_header(cfg)));
  EXPECT_EQ(render_size_curve(one.curve), render_size_curve(four.curve));

  const auto dir = std::filesystem::temp_directory_path() / "ckbsent_experiment_test";
  const auto paths = write_experiment_outputs(dir.string(), one, cfg);
  std::ifstream in(paths.csv);
  const auto parsed = parse_csv(in);
  ASSERT_EQ(parsed.size(), 51u);
  EXPECT_EQ(parsed[7].macro.f1, one.reports[7].macro.f1);
  std::ifstream table(paths.table);
  std::string first;
  std::getline(table, first);
  EXPECT_EQ(first, "# " + output_header(cfg));
  std::filesystem::remove_all(dir);
}

TEST(Experiment, StageErrorsKeepTypeAndName) {
  Dataset gold;
  for (int i = 0; i < 4; ++i) gold.add(make_document("g" + std::to_string(i), "a b", SentimentLabel::Positive));
  auto cfg = fast_config();
  cfg.systems = {System::Merged};
  try {
    run_experiment(gold, Dataset{}, cfg);
    FAIL() << "expected a data error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("build training sets"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find(cfg.hash()), std::string::npos);
  }
}

TEST(Experiment, ConfigHashTracksSettings) {
  auto a = fast_config();
  auto b = a;
  EXPECT_EQ(a.hash(), b.hash());
  b.settings.neural.epochs = 2;
  EXPECT_NE(a.hash(), b.hash());
}

}  // namespace
}  // namespace ckbsent
