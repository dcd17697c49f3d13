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

// ckbsent command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data or client error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ckbsent/ckbsent.hpp"

namespace fs = std::filesystem;
using namespace ckbsent;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what);
  if (!fs::exists(path)) throw DataError(std::string(what) + " not found: " + path);
}

// ---------------------------------------------------------------------------
// Remote or offline clients
// ---------------------------------------------------------------------------

struct ClientOptions {
  std::string translator_url, teacher_url, lexicon, cache;
  double timeout = 30.0;
  double teacher_noise = 0.0;
  int neutral_band = 0;
  std::size_t parallelism = 1;
};

void add_client_options(CLI::App* sub, ClientOptions& o) {
  sub->add_option("--translator-url", o.translator_url, "Translator endpoint (http://host:port/path)")
      ->envname("TRANSLATOR_URL");
  sub->add_option("--teacher-url", o.teacher_url, "Teacher endpoint (http://host:port/path)")->envname("TEACHER_URL");
  sub->add_option("--lexicon", o.lexicon, "Polarity lexicon TSV for the offline teacher");
  sub->add_option("--cache", o.cache, "JSONL translation cache");
  sub->add_option("--timeout", o.timeout, "Remote call timeout in seconds")->check(CLI::PositiveNumber);
  sub->add_option("--teacher-noise", o.teacher_noise, "Flip rate applied to teacher labels")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--neutral-band", o.neutral_band, "Offline teacher: |score| up to this is Neutral")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--parallelism", o.parallelism, "Concurrent client calls")->check(CLI::PositiveNumber);
}

/// Owns whichever clients the options select. Remote endpoints win over the
/// offline identity translator and lexicon teacher.
struct Clients {
  std::unique_ptr<TranslatorClient> base_translator;
  std::unique_ptr<CachingTranslator> cache;
  std::unique_ptr<TeacherClient> base_teacher;
  std::unique_ptr<NoisyTeacher> noisy;

  TranslatorClient& translator() { return cache ? *cache : *base_translator; }
  TeacherClient& teacher() { return noisy ? static_cast<TeacherClient&>(*noisy) : *base_teacher; }
};

Clients make_clients(const ClientOptions& o, std::uint64_t seed) {
  Clients c;
  if (!o.translator_url.empty()) {
    c.base_translator = std::make_unique<HttpTranslator>(o.translator_url, o.timeout);
  } else {
    c.base_translator = std::make_unique<IdentityTranslator>();
  }
  if (!o.cache.empty()) c.cache = std::make_unique<CachingTranslator>(*c.base_translator, o.cache);
  if (!o.teacher_url.empty()) {
    c.base_teacher = std::make_unique<HttpTeacher>(o.teacher_url, o.timeout);
  } else {
    if (o.lexicon.empty()) throw UsageError("--lexicon is required when TEACHER_URL is not set");
    require_file(o.lexicon, "lexicon");
    c.base_teacher = std::make_unique<LexiconTeacher>(load_lexicon(o.lexicon), default_emoji_polarity(),
                                                      o.neutral_band);
  }
  if (o.teacher_noise > 0.0) c.noisy = std::make_unique<NoisyTeacher>(*c.base_teacher, o.teacher_noise, seed);
  return c;
}

// ---------------------------------------------------------------------------
// Model hyperparameters
// ---------------------------------------------------------------------------

struct ModelOptions {
  ModelSettings s;
  double l2 = -1.0;  // negative keeps the learner default
};

void add_model_options(CLI::App* sub, ModelOptions& o) {
  sub->add_option("--l2", o.l2, "LR/SVM penalty weight (default per learner)");
  sub->add_option("--max-iter", o.s.classical.max_iter, "LR/SVM iterations (0 = learner default)");
  sub->add_option("--tol", o.s.classical.tol, "LR gradient tolerance");
  sub->add_option("--trees", o.s.classical.n_estimators, "Random forest size")->check(CLI::PositiveNumber);
  sub->add_option("--min-samples-split", o.s.classical.min_samples_split, "Tree split threshold");
  sub->add_option("--epochs", o.s.neural.epochs, "BiLSTM epochs")->check(CLI::PositiveNumber);
  sub->add_option("--batch-size", o.s.neural.batch_size, "BiLSTM batch size")->check(CLI::PositiveNumber);
  sub->add_option("--learning-rate", o.s.neural.learning_rate, "BiLSTM Adam step")->check(CLI::PositiveNumber);
  sub->add_option("--max-len", o.s.neural.max_len, "BiLSTM sequence length")->check(CLI::PositiveNumber);
  sub->add_option("--embedding-dim", o.s.neural.embedding_dim, "BiLSTM embedding size")->check(CLI::PositiveNumber);
  sub->add_option("--hidden1", o.s.neural.hidden1, "BiLSTM first layer size")->check(CLI::PositiveNumber);
  sub->add_option("--hidden2", o.s.neural.hidden2, "BiLSTM second layer size")->check(CLI::PositiveNumber);
  sub->add_option("--dropout", o.s.neural.dropout, "BiLSTM dropout between layers")->check(CLI::Range(0.0, 0.99));
  sub->add_option("--validation-share", o.s.validation_share, "BiLSTM validation holdout")->check(CLI::Range(0.01, 0.5));
}

ModelSettings resolve(const ModelOptions& o) {
  ModelSettings s = o.s;
  if (o.l2 >= 0.0) s.classical.l2_strength = o.l2;
  return s;
}

template <class Enum, class Parse>
std::vector<Enum> parse_list(const std::vector<std::string>& names, Parse parse, const char* what) {
  std::vector<Enum> out;
  for (const auto& n : names) {
    auto v = parse(n);
    if (!v) throw UsageError(std::string("unknown ") + what + " \"" + n + "\"");
    if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
  }
  return out;
}

ModelKind parse_model(const std::string& name) {
  auto k = parse_model_kind(name);
  if (!k) throw UsageError("unknown model \"" + name + "\" (lr, svm, dt, rf, bilstm)");
  return *k;
}

EmojiMode parse_mode(const std::string& name) {
  auto m = parse_emoji_mode(name);
  if (!m) throw UsageError("unknown emoji mode \"" + name + "\" (with, without)");
  return *m;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct PrepOptions {
  std::string input, output, stats;
  bool profile = false;
};

int run_prep(const PrepOptions& o) {
  require_file(o.input, "input");
  const auto raw = load_jsonl(o.input);
  const auto predicate = o.profile ? character_profile_predicate() : default_language_predicate();
  const auto r = filter_corpus(raw, predicate);
  save_jsonl(r.kept, o.output);
  OrderedJson stats;
  stats["tool"] = "ckbsent " + std::string(kVersion);
  stats["input"] = raw.size();
  stats["kept"] = r.stats.kept;
  stats["dropped"] = r.stats.dropped;
  const auto stats_path = o.stats.empty() ? o.output + ".stats.json" : o.stats;
  write_text(stats_path, stats.dump(2) + "\n");
  std::printf("kept %zu of %zu", r.stats.kept, raw.size());
  for (const auto& [reason, n] : r.stats.dropped) std::printf(", dropped %zu (%s)", n, reason.c_str());
  std::printf("\n");
  return 0;
}

struct AlphaOptions {
  std::string input, projection = "all";
};

int run_alpha(const AlphaOptions& o) {
  require_file(o.input, "annotations");
  const auto records = load_annotations(o.input);
  bool matched = false;
  for (const auto& p : standard_projections()) {
    if (o.projection != "all" && o.projection != p.name) continue;
    matched = true;
    const auto r = krippendorff_alpha(records, p.project);
    std::printf("%s: ", std::string(p.name).c_str());
    if (r.alpha) {
      std::printf("alpha %.4f", *r.alpha);
    } else {
      std::printf("alpha undefined (a single value occurs; expected disagreement is 0)");
    }
    std::printf("  D_o %.6f  D_e %.6f  pairable units %zu  pairable values %.0f\n", r.observed_disagreement,
                r.expected_disagreement, r.pairable_units, r.n_total);
    std::size_t width = 8;
    for (const auto& v : r.values) width = std::max(width, v.size() + 1);
    std::printf("  %*s", static_cast<int>(width), "");
    for (const auto& v : r.values) std::printf("%*s", static_cast<int>(width), v.c_str());
    std::printf("\n");
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      std::printf("  %*s", static_cast<int>(width), r.values[i].c_str());
      for (double c : r.coincidences[i]) std::printf("%*.3f", static_cast<int>(width), c);
      std::printf("\n");
    }
  }
  if (!matched) throw UsageError("unknown projection \"" + o.projection + "\"");
  return 0;
}

struct AggregateOptions {
  std::string annotations, documents, output, overrides, policy = "mixed";
};

int run_aggregate(const AggregateOptions& o) {
  require_file(o.annotations, "annotations");
  require_file(o.documents, "documents");
  TiePolicy policy;
  if (o.policy == "mixed") {
    policy = TiePolicy::Mixed;
  } else if (o.policy == "plurality") {
    policy = TiePolicy::Plurality;
  } else {
    throw UsageError("unknown tie policy \"" + o.policy + "\" (mixed, plurality)");
  }
  std::map<std::string, AnnotationLabel> overrides;
  if (!o.overrides.empty()) {
    require_file(o.overrides, "overrides");
    overrides = load_overrides(o.overrides);
  }
  const auto agg = aggregate(group_by_unit(load_annotations(o.annotations)), policy, overrides);
  const auto r = to_classification_dataset(agg, load_jsonl(o.documents));
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  save_jsonl(r.dataset, o.output);
  const auto c = r.dataset.class_counts();
  std::printf("%zu documents: Positive %zu, Negative %zu, Neutral %zu\n", r.dataset.size(), c[0], c[1], c[2]);
  return 0;
}

struct AugmentOptions {
  std::string pool, output, provenance, gold;
  std::size_t per_class = 1500, emoji_min = 500;
  std::uint64_t seed = 0;
  ClientOptions clients;
};

int run_augment(const AugmentOptions& o) {
  require_file(o.pool, "pool");
  const auto pool = load_jsonl(o.pool);
  std::optional<Dataset> gold;
  if (!o.gold.empty()) {
    require_file(o.gold, "gold");
    gold = load_jsonl(o.gold);
  }
  auto clients = make_clients(o.clients, o.seed);
  const auto r = generate_silver(pool, clients.translator(), clients.teacher(), {o.per_class, o.emoji_min, o.seed},
                                 o.clients.parallelism, gold ? &*gold : nullptr);
  save_jsonl(r.silver, o.output);
  std::string prov;
  for (const auto& v : r.provenance) prov += provenance_to_json(v).dump() + "\n";
  write_text(o.provenance.empty() ? o.output + ".provenance.jsonl" : o.provenance, prov);
  const auto c = r.silver.class_counts();
  std::printf("silver %zu documents: Positive %zu, Negative %zu, Neutral %zu\n", r.silver.size(), c[0], c[1], c[2]);
  return 0;
}

struct TrainOptions {
  std::string train, output, model = "lr", emoji_mode = "with";
  std::uint64_t seed = 0;
  ModelOptions model_opts;
};

int run_train(const TrainOptions& o) {
  require_file(o.train, "training set");
  const auto kind = parse_model(o.model);
  const auto mode = parse_mode(o.emoji_mode);
  const auto clf = train_text_classifier(kind, load_jsonl(o.train), mode, resolve(o.model_opts), o.seed);
  write_text(o.output, clf.to_json().dump() + "\n");
  std::printf("wrote %s model to %s\n", std::string(model_name(kind)).c_str(), o.output.c_str());
  return 0;
}

struct EvaluateOptions {
  std::string model, test, csv, test_set = "Baseline", system = "Baseline";
  std::uint64_t seed = 0;
};

void emit_reports(const std::vector<EvaluationReport>& reports, const std::string& csv, const std::string& header) {
  std::fputs(render_table(reports).c_str(), stdout);
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s: %s\n", r.tags.model.c_str(), w.c_str());
  }
  if (!csv.empty()) write_text(csv, render_csv(reports, header));
}

int run_evaluate(const EvaluateOptions& o) {
  require_file(o.model, "model");
  require_file(o.test, "test set");
  std::ifstream in(o.model);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + o.model + " is not JSON: " + e.what());
  }
  const auto clf = TextClassifier::from_json(j);
  const auto test = load_jsonl(o.test);
  const auto report = evaluate(labels_of(test), clf.predict_labels(test),
                               {std::string(model_name(clf.kind)), o.test_set, o.system,
                                std::string(to_string(clf.emoji_mode)), o.seed});
  emit_reports({report}, o.csv, "ckbsent " + std::string(kVersion) + " model=" + o.model);
  return 0;
}

struct ZeroShotOptions {
  std::string test, csv, emoji_mode = "without";
  std::uint64_t seed = 0;
  ClientOptions clients;
};

int run_zero_shot(const ZeroShotOptions& o) {
  require_file(o.test, "test set");
  const auto mode = parse_mode(o.emoji_mode);
  auto test = load_jsonl(o.test);
  if (mode == EmojiMode::Without) test = map_text(test, [](std::string_view t) { return strip_emoji(t); });
  auto clients = make_clients(o.clients, o.seed);
  const auto report = zero_shot_eval(test, clients.translator(), clients.teacher(),
                                     {"ZeroShot", "Baseline", "Translate", std::string(to_string(mode)), o.seed},
                                     o.clients.parallelism);
  emit_reports({report}, o.csv, "ckbsent " + std::string(kVersion) + " teacher=" + clients.teacher().describe());
  return 0;
}

struct ExperimentOptions {
  std::string gold, silver, output_dir = "results";
  std::vector<std::string> models{"lr", "svm", "dt", "rf", "bilstm"};
  std::vector<std::string> systems{"baseline", "upsample", "merged"};
  std::vector<std::string> emoji_modes{"without", "with"};
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  std::size_t upsample_target = 700, merged_target = 1700, threads = 1;
  bool no_zero_shot = false;
  ModelOptions model_opts;
  ClientOptions clients;
};

int run_experiment_cmd(const ExperimentOptions& o) {
  require_file(o.gold, "gold");
  ExperimentConfig cfg;
  cfg.models = parse_list<ModelKind>(o.models, [](const std::string& s) { return parse_model_kind(s); }, "model");
  cfg.systems = parse_list<System>(o.systems, [](const std::string& s) { return parse_system(s); }, "system");
  cfg.emoji_modes =
      parse_list<EmojiMode>(o.emoji_modes, [](const std::string& s) { return parse_emoji_mode(s); }, "emoji mode");
  if (cfg.models.empty() || cfg.systems.empty() || cfg.emoji_modes.empty()) {
    throw UsageError("models, systems and emoji modes must be non-empty");
  }
  cfg.seed = o.seed;
  cfg.split_ratio = o.split_ratio;
  cfg.upsample_target = o.upsample_target;
  cfg.merged_target = o.merged_target;
  cfg.threads = o.threads;
  cfg.zero_shot = !o.no_zero_shot;
  cfg.settings = resolve(o.model_opts);

  const auto gold = load_jsonl(o.gold);
  const bool needs_silver = std::any_of(cfg.systems.begin(), cfg.systems.end(),
                                        [](System s) { return s != System::Baseline; });
  Dataset silver;
  if (needs_silver) {
    if (o.silver.empty()) throw UsageError("--silver is required for the upsample and merged systems");
    require_file(o.silver, "silver");
    silver = load_jsonl(o.silver);
  }
  std::optional<Clients> clients;
  if (cfg.zero_shot) {
    if (o.clients.lexicon.empty() && o.clients.teacher_url.empty()) {
      throw UsageError("the zero-shot row needs --lexicon or TEACHER_URL (or pass --no-zero-shot)");
    }
    clients = make_clients(o.clients, o.seed);
  }
  const auto result = run_experiment(gold, silver, cfg, clients ? &clients->translator() : nullptr,
                                     clients ? &clients->teacher() : nullptr);
  const auto paths = write_experiment_outputs(o.output_dir, result, cfg);
  write_text((fs::path(o.output_dir) / "config.txt").string(), "# " + output_header(cfg) + "\n" + cfg.to_text());
  std::fputs(render_table(result.reports).c_str(), stdout);
  for (const auto& n : result.notes) std::printf("%s\n", n.c_str());
  std::printf("wrote %s, %s, %s\n", paths.table.c_str(), paths.csv.c_str(), paths.curve.c_str());
  return 0;
}

struct SynthOptions {
  std::string output_dir = "data";
  std::uint64_t seed = 2024;
  std::size_t pool_size = 7500, per_class = 1500, emoji_min = 500;
  double teacher_noise = 0.15;
};

int run_synth(const SynthOptions& o) {
  SyntheticConfig cfg;
  cfg.seed = o.seed;
  cfg.pool_size = o.pool_size;
  const auto b = make_synthetic(cfg);
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);
  save_jsonl(b.raw, (dir / "raw.jsonl").string());
  save_annotations(b.annotations, (dir / "annotations.jsonl").string());
  save_jsonl(b.gold, (dir / "gold.jsonl").string());
  save_jsonl(b.pool, (dir / "pool.jsonl").string());
  save_lexicon((dir / "lexicon.tsv").string(), b.lexicon);
  IdentityTranslator translator;
  LexiconTeacher lexicon(b.lexicon);
  NoisyTeacher teacher(lexicon, o.teacher_noise, o.seed);
  const auto silver = generate_silver(b.pool, translator, teacher, {o.per_class, o.emoji_min, o.seed}, 1, &b.gold);
  save_jsonl(silver.silver, (dir / "silver.jsonl").string());
  std::string prov;
  for (const auto& v : silver.provenance) prov += provenance_to_json(v).dump() + "\n";
  write_text((dir / "silver.jsonl.provenance.jsonl").string(), prov);
  const auto c = b.gold.class_counts();
  std::printf("raw %zu, annotations %zu, gold %zu (%zu/%zu/%zu), pool %zu, silver %zu -> %s\n", b.raw.size(),
              b.annotations.size(), b.gold.size(), c[0], c[1], c[2], b.pool.size(), silver.silver.size(),
              dir.string().c_str());
  return 0;
}

/// Arguments with the key=value lines of --config spliced in after the
/// subcommand. Keys already given on the command line are skipped, so flags
/// override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const auto key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(key);
    if (key != "config") continue;
    if (eq != std::string::npos) {
      path = a.substr(eq + 1);
    } else if (i + 1 < args.size()) {
      path = args[i + 1];
    }
  }
  if (path.empty()) return args;
  if (!fs::exists(path)) throw DataError("config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::ParseError& e) {
    throw DataError("config file " + path + ": " + e.what());
  }
  std::vector<std::string> extra;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) throw UsageError("config file " + path + ": sections are not supported");
    if (given.count(item.name)) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") extra.push_back("--" + item.name);
      continue;
    }
    extra.push_back("--" + item.name);
    std::string joined;
    for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
    extra.push_back(joined);
  }
  std::size_t at = 0;
  while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;  // options before the subcommand
  if (at == args.size()) return args;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at) + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Central Kurdish sentiment analysis toolkit"};
  app.set_version_flag("--version", "ckbsent " + std::string(kVersion));
  app.require_subcommand(1);
  std::string config_path;  // consumed by expand_config before parsing
  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Flat key=value file; keys are long option names");
    return sub;
  };

  PrepOptions prep;
  auto* prep_cmd = with_config(app.add_subcommand("prep", "Filter and normalize a raw crawl"));
  prep_cmd->add_option("--input", prep.input, "Raw JSONL")->required();
  prep_cmd->add_option("--output", prep.output, "Filtered JSONL")->required();
  prep_cmd->add_option("--stats", prep.stats, "Statistics sidecar (default <output>.stats.json)");
  prep_cmd->add_flag("--profile", prep.profile, "Use the character-profile language predicate");

  AlphaOptions alpha;
  auto* alpha_cmd = with_config(app.add_subcommand("alpha", "Krippendorff's alpha per label projection"));
  alpha_cmd->add_option("--input", alpha.input, "Annotation JSONL")->required();
  alpha_cmd->add_option("--projection", alpha.projection,
                        "all, five-way, gated-six-way, three-way or subjectivity");

  AggregateOptions agg;
  auto* agg_cmd = with_config(app.add_subcommand("aggregate", "Build the gold dataset from annotations"));
  agg_cmd->add_option("--annotations", agg.annotations, "Annotation JSONL")->required();
  agg_cmd->add_option("--documents", agg.documents, "Prepared document JSONL")->required();
  agg_cmd->add_option("--output", agg.output, "Gold JSONL")->required();
  agg_cmd->add_option("--overrides", agg.overrides, "Manual label overrides JSONL");
  agg_cmd->add_option("--policy", agg.policy, "Tie policy: mixed or plurality");

  AugmentOptions aug;
  auto* aug_cmd = with_config(app.add_subcommand("augment", "Label an unlabeled pool into silver data"));
  aug_cmd->add_option("--pool", aug.pool, "Unlabeled JSONL")->required();
  aug_cmd->add_option("--output", aug.output, "Silver JSONL")->required();
  aug_cmd->add_option("--provenance", aug.provenance, "Provenance sidecar (default <output>.provenance.jsonl)");
  aug_cmd->add_option("--gold", aug.gold, "Gold JSONL that the pool must not overlap");
  aug_cmd->add_option("--per-class", aug.per_class, "Silver documents per class")->check(CLI::PositiveNumber);
  aug_cmd->add_option("--emoji-min", aug.emoji_min, "Minimum emoji-bearing documents per class");
  aug_cmd->add_option("--seed", aug.seed, "Seed");
  add_client_options(aug_cmd, aug.clients);

  TrainOptions train;
  auto* train_cmd = with_config(app.add_subcommand("train", "Train one model"));
  train_cmd->add_option("--train", train.train, "Labeled JSONL")->required();
  train_cmd->add_option("--output", train.output, "Model JSON")->required();
  train_cmd->add_option("--model", train.model, "lr, svm, dt, rf or bilstm");
  train_cmd->add_option("--emoji-mode", train.emoji_mode, "with or without");
  train_cmd->add_option("--seed", train.seed, "Seed");
  add_model_options(train_cmd, train.model_opts);

  EvaluateOptions ev;
  auto* eval_cmd = with_config(app.add_subcommand("evaluate", "Score a trained model on a labeled set"));
  eval_cmd->add_option("--model", ev.model, "Model JSON")->required();
  eval_cmd->add_option("--test", ev.test, "Labeled JSONL")->required();
  eval_cmd->add_option("--csv", ev.csv, "Write the report as CSV");
  eval_cmd->add_option("--test-set", ev.test_set, "Test set tag");
  eval_cmd->add_option("--system", ev.system, "System tag");
  eval_cmd->add_option("--seed", ev.seed, "Seed tag");

  ExperimentOptions ex;
  auto* ex_cmd = with_config(app.add_subcommand("experiment", "Run the full grid"));
  ex_cmd->add_option("--gold", ex.gold, "Gold JSONL")->required();
  ex_cmd->add_option("--silver", ex.silver, "Silver JSONL");
  ex_cmd->add_option("--output-dir", ex.output_dir, "Report directory");
  ex_cmd->add_option("--models", ex.models, "Models to run")->delimiter(',');
  ex_cmd->add_option("--systems", ex.systems, "baseline, upsample, merged")->delimiter(',');
  ex_cmd->add_option("--emoji-modes", ex.emoji_modes, "without, with")->delimiter(',');
  ex_cmd->add_option("--seed", ex.seed, "Master seed");
  ex_cmd->add_option("--split-ratio", ex.split_ratio, "Training share")->check(CLI::Range(0.05, 0.95));
  ex_cmd->add_option("--upsample-target", ex.upsample_target, "Per-class size of the upsampled set")
      ->check(CLI::PositiveNumber);
  ex_cmd->add_option("--merged-target", ex.merged_target, "Per-class size of the merged set")
      ->check(CLI::PositiveNumber);
  ex_cmd->add_option("--threads", ex.threads, "Grid cells run in parallel")->check(CLI::PositiveNumber);
  ex_cmd->add_flag("--no-zero-shot", ex.no_zero_shot, "Skip the zero-shot row");
  add_model_options(ex_cmd, ex.model_opts);
  add_client_options(ex_cmd, ex.clients);

  ZeroShotOptions zs;
  auto* zs_cmd = with_config(app.add_subcommand("zero-shot", "Translate and classify a labeled set"));
  zs_cmd->add_option("--test", zs.test, "Labeled JSONL")->required();
  zs_cmd->add_option("--csv", zs.csv, "Write the report as CSV");
  zs_cmd->add_option("--emoji-mode", zs.emoji_mode, "with or without");
  zs_cmd->add_option("--seed", zs.seed, "Seed");
  add_client_options(zs_cmd, zs.clients);

  SynthOptions syn;
  auto* syn_cmd = with_config(app.add_subcommand("synth", "Write the bundled synthetic corpora"));
  syn_cmd->add_option("--output-dir", syn.output_dir, "Target directory");
  syn_cmd->add_option("--seed", syn.seed, "Generator seed");
  syn_cmd->add_option("--pool-size", syn.pool_size, "Unlabeled pool size");
  syn_cmd->add_option("--per-class", syn.per_class, "Silver documents per class");
  syn_cmd->add_option("--emoji-min", syn.emoji_min, "Minimum emoji-bearing silver per class");
  syn_cmd->add_option("--teacher-noise", syn.teacher_noise, "Teacher label flip rate")->check(CLI::Range(0.0, 1.0));

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsageError;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  }

  try {
    if (*prep_cmd) return run_prep(prep);
    if (*alpha_cmd) return run_alpha(alpha);
    if (*agg_cmd) return run_aggregate(agg);
    if (*aug_cmd) return run_augment(aug);
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_evaluate(ev);
    if (*ex_cmd) return run_experiment_cmd(ex);
    if (*zs_cmd) return run_zero_shot(zs);
    if (*syn_cmd) return run_synth(syn);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsageError;
  } catch (const ClientError& e) {
    std::fprintf(stderr, "client error: %s\n", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  }
  return kUsageError;
}
