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

// Experiment grid: baseline, upsampled and merged training sets, both emoji
// modes, every model, plus the zero-shot translate-and-classify row.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "ckbsent/augment.hpp"
#include "ckbsent/classifiers.hpp"
#include "ckbsent/common.hpp"
#include "ckbsent/corpus.hpp"
#include "ckbsent/eval.hpp"
#include "ckbsent/features.hpp"
#include "ckbsent/neural.hpp"

namespace ckbsent {

enum class System : std::uint8_t { Baseline, Upsample, Merged };
enum class EmojiMode : std::uint8_t { With, Without };

inline constexpr std::array<System, 3> kAllSystems = {System::Baseline, System::Upsample, System::Merged};

inline std::string_view to_string(System s) {
  switch (s) {
    case System::Baseline:
      return "Baseline";
    case System::Upsample:
      return "Upsample";
    case System::Merged:
      return "Merged";
  }
  return "?";
}

inline std::string_view to_string(EmojiMode m) { return m == EmojiMode::With ? "with" : "without"; }

inline std::optional<System> parse_system(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "baseline") return System::Baseline;
  if (s == "upsample" || s == "upsampled") return System::Upsample;
  if (s == "merged" || s == "merge") return System::Merged;
  return std::nullopt;
}

inline std::optional<EmojiMode> parse_emoji_mode(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "with") return EmojiMode::With;
  if (s == "without") return EmojiMode::Without;
  return std::nullopt;
}

/// Text the models see: normalized, with emoji removed in "without" mode.
inline std::string model_text(const Document& d, EmojiMode mode) {
  return mode == EmojiMode::Without ? strip_emoji(d.normalized_text) : d.normalized_text;
}

inline std::vector<Tokens> model_tokens(const Dataset& ds, EmojiMode mode) {
  std::vector<Tokens> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.push_back(tokenize(model_text(d, mode)));
  return out;
}

inline std::vector<SentimentLabel> labels_of(const Dataset& ds) {
  std::vector<SentimentLabel> out;
  out.reserve(ds.size());
  for (const auto& d : ds) {
    if (!d.label) throw DataError("document " + d.id + " has no label");
    out.push_back(*d.label);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text classifier: vectorizer plus model, trained and applied on documents
// ---------------------------------------------------------------------------

struct TextClassifier {
  ModelKind kind = ModelKind::LogReg;
  EmojiMode emoji_mode = EmojiMode::With;
  std::optional<TfidfModel> vectorizer;
  std::optional<ClassicalModel> classical;
  std::optional<BiLstmModel> neural;

  std::vector<Prediction> predict(const Dataset& ds) const {
    const auto tokens = model_tokens(ds, emoji_mode);
    if (neural) return predict_sequences(*neural, tokens);
    std::vector<Prediction> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(ckbsent::predict(*classical, vectorizer->transform(t)));
    return out;
  }

  std::vector<SentimentLabel> predict_labels(const Dataset& ds) const {
    std::vector<SentimentLabel> out;
    for (const auto& p : predict(ds)) out.push_back(p.label);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "ckbsent-classifier";
    j["version"] = kVersion;
    j["model"] = std::string(model_name(kind));
    j["emoji_mode"] = std::string(to_string(emoji_mode));
    if (neural) {
      j["network"] = bilstm_to_json(*neural);
    } else {
      j["vectorizer"] = vectorizer->to_json();
      j["classifier"] = model_to_json(*classical);
    }
    return j;
  }

  static TextClassifier from_json(const nlohmann::json& j) {
    try {
      if (j.at("format") != "ckbsent-classifier") throw DataError("not a ckbsent classifier file");
      TextClassifier c;
      auto kind = parse_model_kind(j.at("model").get<std::string>());
      auto mode = parse_emoji_mode(j.at("emoji_mode").get<std::string>());
      if (!kind || !mode) throw DataError("classifier file has an unknown model or emoji_mode");
      c.kind = *kind;
      c.emoji_mode = *mode;
      if (c.kind == ModelKind::BiLstm) {
        c.neural = bilstm_from_json(j.at("network"));
      } else {
        c.vectorizer = TfidfModel::from_json(j.at("vectorizer"));
        c.classical = model_from_json(j.at("classifier"));
      }
      return c;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed classifier file: ") + e.what());
    }
  }
};

struct ModelSettings {
  TrainConfig classical;
  NeuralTrainConfig neural;
  double validation_share = 0.1;  // BiLSTM only: held out of the training set
};

inline TextClassifier train_text_classifier(ModelKind kind, const Dataset& train, EmojiMode mode,
                                            const ModelSettings& s, std::uint64_t seed) {
  if (train.empty()) throw DataError("empty training set");
  TextClassifier c;
  c.kind = kind;
  c.emoji_mode = mode;
  if (kind == ModelKind::BiLstm) {
    auto parts = split_dataset(train, 1.0 - s.validation_share, derive_seed(seed, 0xb1));
    auto cfg = s.neural;
    cfg.seed = seed;
    c.neural = train_bilstm(model_tokens(parts.train, mode), labels_of(parts.train), model_tokens(parts.test, mode),
                            labels_of(parts.test), cfg);
    return c;
  }
  const auto tokens = model_tokens(train, mode);
  c.vectorizer = TfidfModel::fit(tokens);
  std::vector<SparseVector> X;
  X.reserve(tokens.size());
  for (const auto& t : tokens) X.push_back(c.vectorizer->transform(t));
  auto cfg = s.classical;
  cfg.seed = seed;
  c.classical = train_classical(kind, X, labels_of(train), cfg);
  return c;
}

// ---------------------------------------------------------------------------
// Training and test sets per system
// ---------------------------------------------------------------------------

struct SystemData {
  Dataset train, test;
  std::size_t nominal_size = 0;  // balanced size times the split ratio
  ClassCounts silver_added{};
};

struct ExperimentConfig {
  std::vector<ModelKind> models{kAllModelKinds.begin(), kAllModelKinds.end()};
  std::vector<System> systems{kAllSystems.begin(), kAllSystems.end()};
  std::vector<EmojiMode> emoji_modes{EmojiMode::Without, EmojiMode::With};
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  std::size_t upsample_target = 700;
  std::size_t merged_target = 1700;
  bool zero_shot = true;
  std::size_t threads = 1;
  ModelSettings settings;

  /// Canonical key=value rendering; hashed into output headers.
  std::string to_text() const {
    std::ostringstream o;
    auto list = [&](const char* key, const auto& items) {
      o << key << "=";
      for (std::size_t i = 0; i < items.size(); ++i) o << (i ? "," : "") << items[i];
      o << "\n";
    };
    std::vector<std::string> m, s, e;
    for (auto k : models) m.emplace_back(model_name(k));
    for (auto k : systems) s.emplace_back(to_string(k));
    for (auto k : emoji_modes) e.emplace_back(to_string(k));
    list("models", m);
    list("systems", s);
    list("emoji_modes", e);
    o << "seed=" << seed << "\nsplit_ratio=" << exact_decimal(split_ratio) << "\nupsample_target=" << upsample_target
      << "\nmerged_target=" << merged_target << "\nzero_shot=" << (zero_shot ? "true" : "false")
      << "\nl2_strength=" << (settings.classical.l2_strength ? exact_decimal(*settings.classical.l2_strength) : "default")
      << "\nmax_iter=" << settings.classical.max_iter << "\ntol=" << exact_decimal(settings.classical.tol)
      << "\nn_estimators=" << settings.classical.n_estimators
      << "\nmin_samples_split=" << settings.classical.min_samples_split
      << "\nlearning_rate=" << exact_decimal(settings.neural.learning_rate)
      << "\nbatch_size=" << settings.neural.batch_size << "\nepochs=" << settings.neural.epochs
      << "\nmax_len=" << settings.neural.max_len << "\nembedding_dim=" << settings.neural.embedding_dim
      << "\nhidden1=" << settings.neural.hidden1 << "\nhidden2=" << settings.neural.hidden2
      << "\ndropout=" << exact_decimal(settings.neural.dropout)
      << "\nvalidation_share=" << exact_decimal(settings.validation_share) << "\n";
    return o.str();
  }

  std::string hash() const { return hex64(fnv1a64(to_text())); }
};

namespace detail {

/// Stratified split that sends classes with a single document to train.
inline Split split_allowing_singletons(const Dataset& ds, double ratio, std::uint64_t seed) {
  const auto counts = ds.class_counts();
  Dataset splittable, singles;
  for (const auto& d : ds) (counts[index_of(*d.label)] < 2 ? singles : splittable).add(d);
  Split out = splittable.empty() ? Split{} : split_dataset(splittable, ratio, seed);
  for (const auto& d : singles) out.train.add(d);
  return out;
}

inline SystemData balanced_system(const Split& gold_split, const BalanceResult& balanced, std::size_t target,
                                  double ratio, std::uint64_t seed) {
  const auto extra = split_allowing_singletons(balanced.added, ratio, derive_seed(seed, 0x5117));
  SystemData s;
  s.train = concat(gold_split.train, extra.train);
  s.test = concat(gold_split.test, extra.test);
  s.nominal_size = train_share(kNumClasses * target, ratio);
  s.silver_added = balanced.additions;
  return s;
}

}  // namespace detail

/// Gold is split once; its test part is shared by every system. Balanced
/// systems add silver chosen from the whole gold count and split that silver
/// with the same ratio, so no silver test document is ever trained on.
inline std::map<System, SystemData> build_systems(const Dataset& gold, const Dataset& silver,
                                                  const ExperimentConfig& cfg) {
  std::map<System, SystemData> out;
  const auto gold_split = split_dataset(gold, cfg.split_ratio, cfg.seed);
  for (auto sys : cfg.systems) {
    if (sys == System::Baseline) {
      out[sys] = {gold_split.train, gold_split.test, train_share(gold.size(), cfg.split_ratio), {}};
    } else if (sys == System::Upsample) {
      out[sys] = detail::balanced_system(gold_split, upsample(gold, silver, cfg.upsample_target, cfg.seed),
                                         cfg.upsample_target, cfg.split_ratio, cfg.seed);
    } else {
      out[sys] = detail::balanced_system(gold_split, merge(gold, silver, cfg.merged_target, cfg.seed),
                                         cfg.merged_target, cfg.split_ratio, cfg.seed);
    }
  }
  if (!out.count(System::Baseline)) {
    out[System::Baseline] = {gold_split.train, gold_split.test, train_share(gold.size(), cfg.split_ratio), {}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct ExperimentResult {
  std::vector<EvaluationReport> reports;  // table order
  std::vector<SizePoint> curve;
  std::vector<std::string> notes;
};

namespace detail {

[[noreturn]] inline void rethrow_with_stage(const std::string& stage, const ExperimentConfig& cfg) {
  const std::string suffix = " [stage " + stage + "; config " + cfg.hash() + "]";
  try {
    throw;
  } catch (const ClientError& e) {
    throw ClientError(e.what() + suffix);
  } catch (const NumericError& e) {
    throw NumericError(e.what() + suffix);
  } catch (const Error& e) {
    throw DataError(e.what() + suffix);
  } catch (const std::exception& e) {
    throw Error(e.what() + suffix);
  }
}

/// Runs `n` independent jobs on up to `threads` workers. The first failure
/// by job index is rethrown.
template <class F>
void run_jobs(std::size_t n, std::size_t threads, F&& job) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_at = n;
  std::mutex mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (i < failed_at) {
            failed_at = i;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Full grid. For each emoji mode, model and system: train on the system's
/// training set, score on the gold baseline test set and, for balanced
/// systems, on the system's own test set. The zero-shot row, when clients
/// are given, scores the teacher on the emoji-free baseline test set.
inline ExperimentResult run_experiment(const Dataset& gold, const Dataset& silver, const ExperimentConfig& cfg,
                                       TranslatorClient* translator = nullptr, TeacherClient* teacher = nullptr) {
  if (cfg.models.empty() || cfg.emoji_modes.empty() || cfg.systems.empty()) {
    throw DataError("experiment needs at least one model, system and emoji mode");
  }
  std::map<System, SystemData> systems;
  try {
    systems = build_systems(gold, silver, cfg);
  } catch (...) {
    detail::rethrow_with_stage("build training sets", cfg);
  }

  struct Cell {
    EmojiMode mode;
    ModelKind model;
    System system;
  };
  std::vector<Cell> cells;
  for (auto mode : cfg.emoji_modes) {
    for (auto model : cfg.models) {
      for (auto sys : cfg.systems) cells.push_back({mode, model, sys});
    }
  }
  std::vector<std::vector<EvaluationReport>> reports(cells.size());
  std::vector<SizePoint> curve(cells.size());
  const auto& baseline_test = systems.at(System::Baseline).test;
  detail::run_jobs(cells.size(), cfg.threads, [&](std::size_t i) {
    const auto& cell = cells[i];
    const auto& data = systems.at(cell.system);
    const std::string stage = "train " + std::string(model_name(cell.model)) + " on " +
                              std::string(to_string(cell.system)) + " (" + std::string(to_string(cell.mode)) +
                              " emoji)";
    try {
      const auto clf = train_text_classifier(cell.model, data.train, cell.mode, cfg.settings, cfg.seed);
      auto score = [&](const Dataset& test, System test_set) {
        return evaluate(labels_of(test), clf.predict_labels(test),
                        {std::string(model_name(cell.model)), std::string(to_string(test_set)),
                         std::string(to_string(cell.system)), std::string(to_string(cell.mode)), cfg.seed});
      };
      reports[i].push_back(score(baseline_test, System::Baseline));
      if (cell.system != System::Baseline) reports[i].push_back(score(data.test, cell.system));
      curve[i] = {std::string(model_name(cell.model)), std::string(to_string(cell.system)),
                  std::string(to_string(cell.mode)), data.nominal_size, data.train.size(),
                  reports[i].front().weighted.f1};
    } catch (...) {
      detail::rethrow_with_stage(stage, cfg);
    }
  });

  ExperimentResult out;
  for (auto& r : reports) {
    for (auto& rep : r) out.reports.push_back(std::move(rep));
  }
  out.curve = std::move(curve);
  if (cfg.zero_shot && translator && teacher) {
    try {
      const auto stripped = map_text(baseline_test, [](std::string_view t) { return strip_emoji(t); });
      out.reports.push_back(zero_shot_eval(stripped, *translator, *teacher,
                                           {"ZeroShot", "Baseline", "Translate", "without", cfg.seed}, cfg.threads));
    } catch (...) {
      detail::rethrow_with_stage("zero-shot", cfg);
    }
  }
  for (auto sys : cfg.systems) {
    const auto& d = systems.at(sys);
    out.notes.push_back(std::string(to_string(sys)) + ": train " + std::to_string(d.train.size()) + ", test " +
                        std::to_string(d.test.size()) + ", nominal " + std::to_string(d.nominal_size));
  }
  return out;
}

inline std::string output_header(const ExperimentConfig& cfg) {
  return "ckbsent " + std::string(kVersion) + " config=" + cfg.hash() + " seed=" + std::to_string(cfg.seed);
}

struct OutputPaths {
  std::string table, csv, curve;
};

/// table.txt, results.csv and size_curve.csv under `dir`.
inline OutputPaths write_experiment_outputs(const std::string& dir, const ExperimentResult& r,
                                            const ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  OutputPaths p{(base / "table.txt").string(), (base / "results.csv").string(), (base / "size_curve.csv").string()};
  auto write = [](const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
  };
  write(p.table, "# " + output_header(cfg) + "\n" + render_table(r.reports));
  write(p.csv, render_csv(r.reports, output_header(cfg)));
  write(p.curve, render_size_curve(r.curve, output_header(cfg)));
  return p;
}

// ---------------------------------------------------------------------------
// Directional study
// ---------------------------------------------------------------------------

struct DirectionalResult {
  std::vector<std::array<double, 3>> per_seed;  // mean macro-F1 per system, kAllSystems order
  std::array<double, 3> mean{};
};

/// Mean macro-F1 over `models` on the gold baseline test set, for every
/// system and seed.
inline DirectionalResult directional_study(const Dataset& gold, const Dataset& silver,
                                           const std::vector<std::uint64_t>& seeds,
                                           const std::vector<ModelKind>& models, EmojiMode mode,
                                           ExperimentConfig base = {}) {
  DirectionalResult out;
  out.per_seed.assign(seeds.size(), {});
  base.systems.assign(kAllSystems.begin(), kAllSystems.end());
  detail::run_jobs(seeds.size(), base.threads, [&](std::size_t s) {
    auto cfg = base;
    cfg.seed = seeds[s];
    const auto systems = build_systems(gold, silver, cfg);
    const auto& test = systems.at(System::Baseline).test;
    const auto refs = labels_of(test);
    for (std::size_t k = 0; k < kAllSystems.size(); ++k) {
      double sum = 0.0;
      for (auto m : models) {
        const auto clf = train_text_classifier(m, systems.at(kAllSystems[k]).train, mode, cfg.settings, cfg.seed);
        sum += evaluate(refs, clf.predict_labels(test)).macro.f1;
      }
      out.per_seed[s][k] = sum / static_cast<double>(models.size());
    }
  });
  for (const auto& row : out.per_seed) {
    for (std::size_t k = 0; k < 3; ++k) out.mean[k] += row[k] / static_cast<double>(seeds.size());
  }
  return out;
}

}  // namespace ckbsent
