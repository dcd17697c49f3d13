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

// Silver-standard generation through translator/teacher clients, class
// balancing, and zero-shot translate-and-classify evaluation.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "httplib.h"
// <resolv.h> defines _res as a macro, which breaks Eigen included later.
#ifdef _res
#undef _res
#endif
#include "json.hpp"

#include "ckbsent/common.hpp"
#include "ckbsent/corpus.hpp"
#include "ckbsent/eval.hpp"
#include "ckbsent/features.hpp"

namespace ckbsent {

// ---------------------------------------------------------------------------
// Client contracts
// ---------------------------------------------------------------------------

/// Implementations must be safe to call from several threads at once.
class TranslatorClient {
 public:
  virtual ~TranslatorClient() = default;
  virtual std::string translate(const std::string& text, const std::string& source, const std::string& target) = 0;
  virtual std::vector<std::pair<std::string, std::string>> supported_pairs() const { return {{"ckb", "en"}}; }
  virtual std::string describe() const = 0;
};

struct TeacherOutput {
  SentimentLabel label = SentimentLabel::Neutral;
  double confidence = 0.0;
};

/// Implementations must be safe to call from several threads at once.
class TeacherClient {
 public:
  virtual ~TeacherClient() = default;
  virtual TeacherOutput classify(const std::string& text) = 0;
  virtual std::string describe() const = 0;
};

/// Returns its input unchanged and counts calls.
class IdentityTranslator : public TranslatorClient {
 public:
  std::string translate(const std::string& text, const std::string&, const std::string&) override {
    ++calls_;
    return text;
  }
  std::string describe() const override { return "identity"; }
  std::size_t calls() const { return calls_; }

 private:
  std::atomic<std::size_t> calls_{0};
};

/// Memoizes another translator by content hash, optionally persisted as
/// JSONL so later runs reuse earlier translations.
class CachingTranslator : public TranslatorClient {
 public:
  explicit CachingTranslator(TranslatorClient& inner, std::string cache_path = "")
      : inner_(inner), path_(std::move(cache_path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        cache_[j.at("key").get<std::string>()] = j.at("translation").get<std::string>();
      } catch (const std::exception& e) {
        throw DataError(path_ + ":" + std::to_string(line_no) + ": bad cache entry: " + e.what());
      }
    }
  }

  static std::string key(const std::string& text, const std::string& source, const std::string& target) {
    return hex64(fnv1a64(source + '\0' + target + '\0' + text));
  }

  std::string translate(const std::string& text, const std::string& source, const std::string& target) override {
    const auto k = key(text, source, target);
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(k); it != cache_.end()) {
        ++hits_;
        return it->second;
      }
    }
    auto out = inner_.translate(text, source, target);
    std::lock_guard lock(mutex_);
    if (cache_.emplace(k, out).second && !path_.empty()) {
      std::ofstream app(path_, std::ios::app);
      if (!app) throw ClientError("cannot append to translation cache " + path_);
      app << nlohmann::json{{"key", k}, {"source", source}, {"target", target}, {"text", text}, {"translation", out}}
                 .dump()
          << "\n";
    }
    return out;
  }

  std::vector<std::pair<std::string, std::string>> supported_pairs() const override { return inner_.supported_pairs(); }
  std::string describe() const override { return "cached(" + inner_.describe() + ")"; }
  std::size_t hits() const { return hits_; }
  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  TranslatorClient& inner_;
  std::string path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> cache_;
  std::atomic<std::size_t> hits_{0};
};

// ---------------------------------------------------------------------------
// Lexicon teacher
// ---------------------------------------------------------------------------

using PolarityMap = std::map<std::string, int>;

inline PolarityMap default_emoji_polarity() {
  return {{"😊", 2},  {"😍", 2},  {"❤️", 2},  {"❤", 2},   {"😂", 1},  {"👍", 1},  {"🥰", 2},
          {"😢", -2}, {"😭", -2}, {"😡", -2}, {"💔", -2}, {"👎", -1}, {"😞", -1}, {"😠", -2}};
}

/// Sums token polarities; Positive above the neutral band, Negative below
/// its negation, Neutral inside. Confidence is min(1, |score| / 5).
class LexiconTeacher : public TeacherClient {
 public:
  LexiconTeacher(PolarityMap words, PolarityMap emoji = default_emoji_polarity(), int neutral_band = 0)
      : words_(std::move(words)), emoji_(std::move(emoji)), band_(neutral_band) {
    if (band_ < 0) throw DataError("neutral_band must be non-negative");
    for (const auto* m : {&words_, &emoji_}) {
      for (const auto& [tok, p] : *m) {
        if (p == 0 || p < -2 || p > 2) throw DataError("polarity of \"" + tok + "\" must be in {-2,-1,1,2}");
      }
    }
  }

  int score(const std::string& text) const {
    int s = 0;
    for (const auto& tok : tokenize(text)) {
      if (auto it = words_.find(tok); it != words_.end()) {
        s += it->second;
      } else if (auto e = emoji_.find(tok); e != emoji_.end()) {
        s += e->second;
      }
    }
    return s;
  }

  TeacherOutput classify(const std::string& text) override {
    const int s = score(text);
    TeacherOutput out;
    out.label = s > band_ ? SentimentLabel::Positive : s < -band_ ? SentimentLabel::Negative : SentimentLabel::Neutral;
    out.confidence = std::min(1.0, std::abs(s) / 5.0);
    return out;
  }

  std::string describe() const override { return "lexicon(" + std::to_string(words_.size()) + " entries)"; }
  const PolarityMap& words() const { return words_; }

 private:
  PolarityMap words_;
  PolarityMap emoji_;
  int band_;
};

/// TSV "token<TAB>polarity"; blank lines and lines starting with '#' skipped.
inline PolarityMap load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path);
  PolarityMap out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const std::string where = path + ":" + std::to_string(line_no);
    if (tab == std::string::npos) throw DataError(where + ": expected token<TAB>polarity");
    int p = 0;
    try {
      std::size_t used = 0;
      p = std::stoi(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(where + ": polarity is not an integer");
    }
    if (p == 0 || p < -2 || p > 2) throw DataError(where + ": polarity must be in {-2,-1,1,2}");
    if (!out.emplace(normalize(line.substr(0, tab)), p).second) throw DataError(where + ": duplicate token");
  }
  return out;
}

inline void save_lexicon(const std::string& path, const PolarityMap& lexicon) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& [tok, p] : lexicon) out << tok << '\t' << p << '\n';
}

/// Replaces the inner label with a different class for a deterministic,
/// text-keyed fraction of inputs. Simulates an imperfect teacher.
class NoisyTeacher : public TeacherClient {
 public:
  NoisyTeacher(TeacherClient& inner, double flip_rate, std::uint64_t seed)
      : inner_(inner), rate_(flip_rate), seed_(seed) {
    if (rate_ < 0.0 || rate_ > 1.0) throw DataError("flip rate must lie in [0, 1]");
  }

  TeacherOutput classify(const std::string& text) override {
    auto out = inner_.classify(text);
    Rng rng(derive_seed(seed_, fnv1a64(text)));
    if (rng.uniform() < rate_) {
      out.label = label_from_index((index_of(out.label) + 1 + rng.below(kNumClasses - 1)) % kNumClasses);
    }
    return out;
  }

  std::string describe() const override { return "noisy(" + inner_.describe() + ")"; }

 private:
  TeacherClient& inner_;
  double rate_;
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// HTTP clients
// ---------------------------------------------------------------------------

namespace detail {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ClientError("endpoint " + url + ": missing scheme");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http") throw ClientError("endpoint " + url + ": only http:// is supported");
  const auto slash = url.find('/', scheme_end + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

inline nlohmann::json post_json(const std::string& url, const nlohmann::json& body, double timeout_seconds) {
  const auto ep = parse_endpoint(url);
  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::duration<double>(timeout_seconds);
  const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(usec);
  client.set_read_timeout(usec);
  client.set_write_timeout(usec);
  auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) throw ClientError("endpoint " + url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw ClientError("endpoint " + url + ": HTTP status " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const std::exception&) {
    throw ClientError("endpoint " + url + ": response is not JSON");
  }
}

}  // namespace detail

/// POST {"text", "source", "target"} -> {"text"}.
class HttpTranslator : public TranslatorClient {
 public:
  explicit HttpTranslator(std::string url, double timeout_seconds = 30.0)
      : url_(std::move(url)), timeout_(timeout_seconds) {
    detail::parse_endpoint(url_);
  }

  std::string translate(const std::string& text, const std::string& source, const std::string& target) override {
    const auto j = detail::post_json(url_, {{"text", text}, {"source", source}, {"target", target}}, timeout_);
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
      throw ClientError("endpoint " + url_ + ": response lacks a \"text\" string");
    }
    return j["text"].get<std::string>();
  }

  std::string describe() const override { return url_; }

 private:
  std::string url_;
  double timeout_;
};

/// POST {"text"} -> {"label", "confidence"}.
class HttpTeacher : public TeacherClient {
 public:
  explicit HttpTeacher(std::string url, double timeout_seconds = 30.0) : url_(std::move(url)), timeout_(timeout_seconds) {
    detail::parse_endpoint(url_);
  }

  TeacherOutput classify(const std::string& text) override {
    const auto j = detail::post_json(url_, {{"text", text}}, timeout_);
    TeacherOutput out;
    try {
      auto label = parse_label(j.at("label").get<std::string>());
      if (!label) throw std::invalid_argument("label");
      out.label = *label;
      out.confidence = j.at("confidence").get<double>();
    } catch (const std::exception&) {
      throw ClientError("endpoint " + url_ + ": response needs \"label\" in the 3-class set and numeric \"confidence\"");
    }
    if (!std::isfinite(out.confidence) || out.confidence < 0.0 || out.confidence > 1.0) {
      throw ClientError("endpoint " + url_ + ": confidence outside [0, 1]");
    }
    return out;
  }

  std::string describe() const override { return url_; }

 private:
  std::string url_;
  double timeout_;
};

// ---------------------------------------------------------------------------
// Labeling a pool
// ---------------------------------------------------------------------------

struct TeacherVerdict {
  std::string id;
  std::string translation;
  TeacherOutput output;
};

/// Translates and classifies every document, `parallelism` calls at a time.
/// Results come back in input order whatever the completion order.
inline std::vector<TeacherVerdict> label_documents(const Dataset& docs, TranslatorClient& translator,
                                                   TeacherClient& teacher, std::size_t parallelism = 1,
                                                   const std::string& source = "ckb",
                                                   const std::string& target = "en") {
  std::vector<TeacherVerdict> out(docs.size());
  auto work = [&](std::size_t i) {
    const auto& d = docs[i];
    try {
      out[i].id = d.id;
      out[i].translation = translator.translate(d.normalized_text, source, target);
      out[i].output = teacher.classify(out[i].translation);
    } catch (const Error& e) {
      throw ClientError("document " + d.id + ": " + e.what());
    } catch (const std::exception& e) {
      throw ClientError("document " + d.id + ": " + e.what());
    }
    if (!std::isfinite(out[i].output.confidence)) throw ClientError("document " + d.id + ": non-finite confidence");
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(parallelism, docs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_at = docs.size();
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < docs.size(); i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          // Report the earliest failing document so errors are reproducible.
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
  return out;
}

// ---------------------------------------------------------------------------
// Silver generation
// ---------------------------------------------------------------------------

struct BalanceSpec {
  std::size_t per_class_target = 1500;
  std::size_t emoji_min_per_class = 500;
  std::uint64_t seed = 0;
};

struct SilverResult {
  Dataset silver;
  std::vector<TeacherVerdict> provenance;  // one per selected document, in output order
};

namespace detail {

struct Candidate {
  std::size_t index;
  double confidence;
  std::uint64_t tiebreak;
  const std::string* id;
};

/// Highest confidence first, then a seeded hash of the id, then the id.
inline void sort_candidates(std::vector<Candidate>& c) {
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.tiebreak != b.tiebreak) return a.tiebreak < b.tiebreak;
    return *a.id < *b.id;
  });
}

inline std::uint64_t id_tiebreak(std::uint64_t seed, const std::string& id) { return derive_seed(seed, fnv1a64(id)); }

inline double document_confidence(const Document& d) {
  if (d.meta.is_object() && d.meta.contains("confidence") && d.meta["confidence"].is_number()) {
    return d.meta["confidence"].get<double>();
  }
  return 0.0;
}

}  // namespace detail

/// Labels the pool, then per class keeps exactly `per_class_target`
/// documents: first the most confident emoji-bearing ones up to the quota,
/// then the most confident of the rest. Output is grouped by class in
/// selection order.
inline SilverResult generate_silver(const Dataset& pool, TranslatorClient& translator, TeacherClient& teacher,
                                    const BalanceSpec& balance, std::size_t parallelism = 1,
                                    const Dataset* gold = nullptr) {
  if (balance.emoji_min_per_class > balance.per_class_target) {
    throw DataError("emoji_min_per_class exceeds per_class_target");
  }
  if (gold) {
    for (const auto& d : pool) {
      if (gold->contains(d.id)) throw DataError("pool document " + d.id + " is also in the gold dataset");
    }
  }
  const auto verdicts = label_documents(pool, translator, teacher, parallelism);

  std::array<std::vector<detail::Candidate>, kNumClasses> by_class;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    by_class[index_of(verdicts[i].output.label)].push_back(
        {i, verdicts[i].output.confidence, detail::id_tiebreak(balance.seed, pool[i].id), &pool[i].id});
  }
  std::vector<std::string> problems;
  std::array<std::vector<std::size_t>, kNumClasses> chosen;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    auto& cands = by_class[k];
    const std::string name(to_string(label_from_index(k)));
    if (cands.size() < balance.per_class_target) {
      problems.push_back(name + ": " + std::to_string(cands.size()) + " labeled, need " +
                         std::to_string(balance.per_class_target) + " (short " +
                         std::to_string(balance.per_class_target - cands.size()) + ")");
      continue;
    }
    detail::sort_candidates(cands);
    std::vector<bool> taken(cands.size(), false);
    std::size_t emoji = 0;
    for (std::size_t c = 0; c < cands.size() && emoji < balance.emoji_min_per_class; ++c) {
      if (!pool[cands[c].index].has_emoji) continue;
      taken[c] = true;
      ++emoji;
    }
    if (emoji < balance.emoji_min_per_class) {
      problems.push_back(name + ": " + std::to_string(emoji) + " emoji-bearing, need " +
                         std::to_string(balance.emoji_min_per_class) + " (short " +
                         std::to_string(balance.emoji_min_per_class - emoji) + ")");
      continue;
    }
    std::size_t filled = emoji;
    for (std::size_t c = 0; c < cands.size() && filled < balance.per_class_target; ++c) {
      if (taken[c]) continue;
      taken[c] = true;
      ++filled;
    }
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (taken[c]) chosen[k].push_back(cands[c].index);
    }
  }
  if (!problems.empty()) {
    std::string msg = "silver pool is insufficient:";
    for (const auto& p : problems) msg += " [" + p + "]";
    throw DataError(msg);
  }
  SilverResult out;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (auto i : chosen[k]) {
      const auto& src = pool[i];
      OrderedJson meta = src.meta.is_object() ? src.meta : OrderedJson::object();
      meta["confidence"] = verdicts[i].output.confidence;
      out.silver.add(make_document(src.id, src.raw_text, label_from_index(k), Source::Silver, std::move(meta)));
      out.provenance.push_back(verdicts[i]);
    }
  }
  return out;
}

inline OrderedJson provenance_to_json(const TeacherVerdict& v) {
  OrderedJson j;
  j["id"] = v.id;
  j["teacher_label"] = std::string(to_string(v.output.label));
  j["confidence"] = v.output.confidence;
  j["translation"] = v.translation;
  return j;
}

// ---------------------------------------------------------------------------
// Balancing
// ---------------------------------------------------------------------------

struct BalanceResult {
  Dataset data;
  Dataset added;         // the silver documents that were kept
  ClassCounts additions{};
  ClassCounts excess{};  // gold beyond the target, kept whole (upsample only)
  std::vector<std::string> notes;
};

namespace detail {

inline std::array<std::vector<const Document*>, kNumClasses> by_label(const Dataset& ds, const char* what) {
  std::array<std::vector<const Document*>, kNumClasses> out;
  for (const auto& d : ds) {
    if (!d.label) throw DataError(std::string(what) + " document " + d.id + " has no label");
    out[index_of(*d.label)].push_back(&d);
  }
  return out;
}

inline void throw_deficits(const ClassCounts& deficit, const char* op) {
  std::string msg;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (deficit[k] == 0) continue;
    msg += " [" + std::string(to_string(label_from_index(k))) + ": deficit " + std::to_string(deficit[k]) + "]";
  }
  if (!msg.empty()) throw DataError(std::string(op) + ": not enough silver documents:" + msg);
}

}  // namespace detail

/// Tops each class up to `target` with a seeded random sample of silver of
/// that class. Gold is never dropped; gold beyond the target is reported.
inline BalanceResult upsample(const Dataset& gold, const Dataset& silver, std::size_t target, std::uint64_t seed) {
  const auto g = detail::by_label(gold, "gold");
  auto s = detail::by_label(silver, "silver");
  BalanceResult r;
  ClassCounts deficit{};
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (g[k].size() > target) {
      r.excess[k] = g[k].size() - target;
      r.notes.push_back(std::string(to_string(label_from_index(k))) + ": gold exceeds the target by " +
                        std::to_string(r.excess[k]) + "; all gold kept");
    }
    const std::size_t need = target > g[k].size() ? target - g[k].size() : 0;
    if (s[k].size() < need) deficit[k] = need - s[k].size();
    r.additions[k] = need;
  }
  detail::throw_deficits(deficit, "upsample");
  r.data = gold;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    auto& pool = s[k];
    std::sort(pool.begin(), pool.end(), [](const Document* a, const Document* b) { return a->id < b->id; });
    Rng rng(derive_seed(seed, k));
    rng.shuffle(pool);
    for (std::size_t i = 0; i < r.additions[k]; ++i) {
      r.data.add(*pool[i]);
      r.added.add(*pool[i]);
    }
  }
  return r;
}

/// Union of gold and silver trimmed to exactly `target` per class by
/// dropping the least confident silver. Gold is never trimmed.
inline BalanceResult merge(const Dataset& gold, const Dataset& silver, std::size_t target, std::uint64_t seed) {
  const auto g = detail::by_label(gold, "gold");
  auto s = detail::by_label(silver, "silver");
  BalanceResult r;
  ClassCounts deficit{};
  std::string too_much;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (g[k].size() > target) {
      too_much += " [" + std::string(to_string(label_from_index(k))) + ": " + std::to_string(g[k].size()) + " > " +
                  std::to_string(target) + "]";
      continue;
    }
    r.additions[k] = target - g[k].size();
    if (s[k].size() < r.additions[k]) deficit[k] = r.additions[k] - s[k].size();
  }
  if (!too_much.empty()) throw DataError("merge: gold alone exceeds the per-class target:" + too_much);
  detail::throw_deficits(deficit, "merge");
  r.data = gold;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::vector<detail::Candidate> cands;
    for (std::size_t i = 0; i < s[k].size(); ++i) {
      cands.push_back({i, detail::document_confidence(*s[k][i]), detail::id_tiebreak(seed, s[k][i]->id), &s[k][i]->id});
    }
    detail::sort_candidates(cands);
    for (std::size_t i = 0; i < r.additions[k]; ++i) {
      r.data.add(*s[k][cands[i].index]);
      r.added.add(*s[k][cands[i].index]);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Zero-shot evaluation
// ---------------------------------------------------------------------------

/// Translate-and-classify every test document; nothing is trained.
inline EvaluationReport zero_shot_eval(const Dataset& test, TranslatorClient& translator, TeacherClient& teacher,
                                       SettingTags tags = {}, std::size_t parallelism = 1) {
  const auto verdicts = label_documents(test, translator, teacher, parallelism);
  std::vector<SentimentLabel> refs, preds;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!test[i].label) throw DataError("zero-shot test document " + test[i].id + " has no label");
    refs.push_back(*test[i].label);
    preds.push_back(verdicts[i].output.label);
  }
  return evaluate(refs, preds, std::move(tags));
}

// ---------------------------------------------------------------------------
// Client selection from the environment
// ---------------------------------------------------------------------------

inline std::optional<std::string> env_value(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace ckbsent
