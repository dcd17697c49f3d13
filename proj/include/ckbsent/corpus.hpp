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

// Documents, datasets, orthography normalization, script filtering, emoji
// handling, stratified splitting and JSONL persistence.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ckbsent/common.hpp"
#include "ckbsent/unicode.hpp"

namespace ckbsent {

using OrderedJson = nlohmann::ordered_json;

enum class Source : std::uint8_t { Gold, Silver };

inline std::string_view to_string(Source s) { return s == Source::Gold ? "gold" : "silver"; }

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace detail {

inline char32_t map_orthography(char32_t cp) {
  switch (cp) {
    case 0x0643:  // ARABIC LETTER KAF
      return 0x06A9;
    case 0x064A:  // ARABIC LETTER YEH
    case 0x0649:  // ARABIC LETTER ALEF MAKSURA
      return 0x06CC;
    default:
      break;
  }
  if (cp >= 0x0660 && cp <= 0x0669) return U'0' + (cp - 0x0660);
  if (cp >= 0x06F0 && cp <= 0x06F9) return U'0' + (cp - 0x06F0);
  return cp;
}

inline std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const auto& cp : unicode::decode(text)) {
    if (unicode::is_whitespace(cp.value)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::append_utf8(out, cp.value);
  }
  return out;
}

}  // namespace detail

/// Orthography normalization: NFC, Arabic kaf/yeh unification to the
/// Kurdish forms, tatweel removal, Arabic-Indic digits to ASCII, whitespace
/// runs collapsed to one space, trimmed. Idempotent.
inline std::string normalize(std::string_view text) {
  const std::string composed = unicode::nfc(text);
  std::vector<char32_t> mapped;
  mapped.reserve(composed.size());
  for (const auto& cp : unicode::decode(composed)) {
    if (cp.value == 0x0640) continue;  // tatweel
    mapped.push_back(detail::map_orthography(cp.value));
  }
  // Removing tatweel can bring a base letter next to a combining mark.
  return detail::collapse_whitespace(unicode::nfc(unicode::encode(mapped)));
}

// ---------------------------------------------------------------------------
// Script filter and language identification
// ---------------------------------------------------------------------------

/// Letters that mark Central Kurdish text as opposed to Arabic.
inline constexpr std::array<char32_t, 10> kDistinctiveLetters = {
    0x0695, 0x06B5, 0x06CE, 0x06C6, 0x06D5, 0x06A4, 0x06AF, 0x0686, 0x067E, 0x0698};

inline bool is_distinctive_letter(char32_t cp) {
  return std::find(kDistinctiveLetters.begin(), kDistinctiveLetters.end(), cp) !=
         kDistinctiveLetters.end();
}

/// True iff at least half of the letters are Arabic-script and at least one
/// distinctive Central Kurdish letter occurs.
inline bool script_filter(std::string_view text) {
  std::size_t letters = 0;
  std::size_t arabic = 0;
  bool distinctive = false;
  for (const auto& cp : unicode::decode(text)) {
    if (!unicode::is_letter(cp.value)) continue;
    ++letters;
    if (unicode::is_arabic_script(cp.value)) ++arabic;
    distinctive = distinctive || is_distinctive_letter(cp.value);
  }
  return letters > 0 && 2 * arabic >= letters && distinctive;
}

/// Pluggable language identifier. May throw; the pipeline converts the
/// failure into a ClientError naming the document.
using LanguagePredicate = std::function<bool(std::string_view text)>;

inline LanguagePredicate default_language_predicate() {
  return [](std::string_view text) { return script_filter(text); };
}

/// Character-profile heuristic: the share of Arabic-script letters that
/// belong to the Central Kurdish alphabet must reach `min_share`. Rejects
/// Arabic and Persian text that happens to contain a shared letter like پ.
inline LanguagePredicate character_profile_predicate(double min_share = 0.9) {
  return [min_share](std::string_view text) {
    static const std::u32string kAlphabet =
        U"ئابپتجچحخدرڕز"
        U"ژسشعغفڤقکگلڵم"
        U"نهەوۆیێءآ";
    std::size_t arabic = 0;
    std::size_t in_alphabet = 0;
    for (const auto& cp : unicode::decode(normalize(text))) {
      if (!unicode::is_letter(cp.value) || !unicode::is_arabic_script(cp.value)) continue;
      ++arabic;
      if (kAlphabet.find(cp.value) != std::u32string::npos) ++in_alphabet;
    }
    return arabic > 0 && static_cast<double>(in_alphabet) >= min_share * static_cast<double>(arabic);
  };
}

// ---------------------------------------------------------------------------
// Emoji
// ---------------------------------------------------------------------------

inline bool is_emoji_base(char32_t cp) {
  return (cp >= 0x1F300 && cp <= 0x1F5FF) || (cp >= 0x1F600 && cp <= 0x1F64F) ||
         (cp >= 0x1F680 && cp <= 0x1F6FF) || (cp >= 0x1F900 && cp <= 0x1F9FF) ||
         (cp >= 0x2600 && cp <= 0x27BF) || (cp >= 0x1FA70 && cp <= 0x1FAFF);
}

inline constexpr char32_t kVariationSelector16 = 0xFE0F;
inline constexpr char32_t kZeroWidthJoiner = 0x200D;

inline bool is_skin_tone_modifier(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }

/// A maximal emoji sequence. `offset` counts code points, not bytes.
struct EmojiHit {
  std::size_t offset;
  std::u32string sequence;

  bool operator==(const EmojiHit&) const = default;
};

namespace detail {

struct EmojiSpan {
  std::size_t begin;  // code point index
  std::size_t end;
};

inline std::vector<EmojiSpan> emoji_spans(const std::vector<unicode::CodePoint>& cps) {
  std::vector<EmojiSpan> spans;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_emoji_base(cps[i].value)) {
      ++i;
      continue;
    }
    const std::size_t begin = i++;
    while (i < cps.size()) {
      const char32_t c = cps[i].value;
      if (c == kVariationSelector16 || is_skin_tone_modifier(c)) {
        ++i;
      } else if (c == kZeroWidthJoiner) {
        ++i;
        if (i < cps.size() && is_emoji_base(cps[i].value)) ++i;
        else break;
      } else {
        break;
      }
    }
    spans.push_back({begin, i});
  }
  return spans;
}

}  // namespace detail

inline std::vector<EmojiHit> detect_emoji(std::string_view text) {
  const auto cps = unicode::decode(text);
  std::vector<EmojiHit> hits;
  for (const auto& span : detail::emoji_spans(cps)) {
    EmojiHit hit{span.begin, {}};
    for (std::size_t k = span.begin; k < span.end; ++k) hit.sequence.push_back(cps[k].value);
    hits.push_back(std::move(hit));
  }
  return hits;
}

inline bool has_emoji(std::string_view text) {
  for (const auto& cp : unicode::decode(text)) {
    if (is_emoji_base(cp.value)) return true;
  }
  return false;
}

/// Removes every emoji sequence, then collapses doubled spaces and trims.
inline std::string strip_emoji(std::string_view text) {
  const auto cps = unicode::decode(text);
  const auto spans = detail::emoji_spans(cps);
  if (spans.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  std::size_t next = 0;
  for (const auto& span : spans) {
    if (span.begin > next) {
      out.append(text.substr(cps[next].offset, cps[span.begin].offset - cps[next].offset));
    }
    next = span.end;
  }
  if (next < cps.size()) out.append(text.substr(cps[next].offset));
  return detail::collapse_whitespace(out);
}

// ---------------------------------------------------------------------------
// Documents and datasets
// ---------------------------------------------------------------------------

struct Document {
  std::string id;
  std::string raw_text;
  std::string normalized_text;
  std::optional<SentimentLabel> label;
  Source source = Source::Gold;
  bool has_emoji = false;
  /// Keys of the input record this toolkit does not interpret.
  OrderedJson meta = OrderedJson::object();

  bool operator==(const Document&) const = default;
};

inline Document make_document(std::string id, std::string raw_text,
                              std::optional<SentimentLabel> label = std::nullopt,
                              Source source = Source::Gold,
                              OrderedJson meta = OrderedJson::object()) {
  Document d;
  d.id = std::move(id);
  d.normalized_text = normalize(raw_text);
  d.has_emoji = has_emoji(raw_text);
  d.raw_text = std::move(raw_text);
  d.label = label;
  d.source = source;
  d.meta = std::move(meta);
  return d;
}

using ClassCounts = std::array<std::size_t, kNumClasses>;

/// Ordered, id-unique document collection.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<Document> docs) {
    for (auto& d : docs) add(std::move(d));
  }

  void add(Document doc) {
    if (!ids_.insert(doc.id).second) throw DataError("duplicate document id: " + doc.id);
    docs_.push_back(std::move(doc));
  }

  bool contains(const std::string& id) const { return ids_.count(id) != 0; }

  const std::vector<Document>& documents() const { return docs_; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const Document& operator[](std::size_t i) const { return docs_[i]; }
  auto begin() const { return docs_.begin(); }
  auto end() const { return docs_.end(); }

  /// Counts of labeled documents per class; unlabeled documents are ignored.
  ClassCounts class_counts() const {
    ClassCounts counts{};
    for (const auto& d : docs_) {
      if (d.label) ++counts[index_of(*d.label)];
    }
    return counts;
  }

  bool operator==(const Dataset& other) const { return docs_ == other.docs_; }

 private:
  std::vector<Document> docs_;
  std::unordered_set<std::string> ids_;
};

/// Applies `f` to every document text, recomputing derived fields.
inline Dataset map_text(const Dataset& ds, const std::function<std::string(std::string_view)>& f) {
  Dataset out;
  for (const auto& d : ds) {
    out.add(make_document(d.id, f(d.raw_text), d.label, d.source, d.meta));
  }
  return out;
}

inline Dataset concat(const Dataset& a, const Dataset& b) {
  Dataset out;
  for (const auto& d : a) out.add(d);
  for (const auto& d : b) out.add(d);
  return out;
}

// ---------------------------------------------------------------------------
// Stratified split
// ---------------------------------------------------------------------------

struct Split {
  Dataset train;
  Dataset test;
};

/// Number of documents of a class that go to the training side.
inline std::size_t train_share(std::size_t n, double ratio) {
  // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

/// Per class, a seeded Fisher-Yates shuffle puts floor(ratio * n_c)
/// documents into train; the rest go to test. Both sides keep the input
/// order of the dataset.
inline Split split_dataset(const Dataset& ds, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("split ratio must lie in (0, 1)");
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!ds[i].label) throw DataError("cannot split: document " + ds[i].id + " has no label");
    by_class[index_of(*ds[i].label)].push_back(i);
  }
  std::vector<bool> to_train(ds.size(), false);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    auto& members = by_class[k];
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw DataError("cannot stratify: class " + std::string(to_string(label_from_index(k))) +
                      " has fewer than 2 documents");
    }
    Rng rng(derive_seed(seed, k));
    rng.shuffle(members);
    const std::size_t n_train = train_share(members.size(), ratio);
    for (std::size_t j = 0; j < n_train; ++j) to_train[members[j]] = true;
  }
  Split out;
  for (std::size_t i = 0; i < ds.size(); ++i) (to_train[i] ? out.train : out.test).add(ds[i]);
  return out;
}

// ---------------------------------------------------------------------------
// JSONL persistence
// ---------------------------------------------------------------------------

inline Document document_from_json(const OrderedJson& obj) {
  if (!obj.is_object()) throw DataError("record is not a JSON object");
  auto text_it = obj.find("text");
  if (text_it == obj.end() || !text_it->is_string()) throw DataError("missing string key \"text\"");
  auto id_it = obj.find("id");
  if (id_it == obj.end() || !id_it->is_string()) throw DataError("missing string key \"id\"");

  std::optional<SentimentLabel> label;
  if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("\"label\" must be a string");
    label = parse_label(it->get<std::string>());
    if (!label) throw DataError("unknown label \"" + it->get<std::string>() + "\"");
  }
  Source source = Source::Gold;
  if (auto it = obj.find("source"); it != obj.end()) {
    const auto s = it->is_string() ? it->get<std::string>() : std::string();
    if (s == "gold") source = Source::Gold;
    else if (s == "silver") source = Source::Silver;
    else throw DataError("\"source\" must be \"gold\" or \"silver\"");
  }
  OrderedJson meta = OrderedJson::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (it.key() == "id" || it.key() == "text" || it.key() == "label" || it.key() == "source") continue;
    meta[it.key()] = it.value();
  }
  return make_document(id_it->get<std::string>(), text_it->get<std::string>(), label, source,
                       std::move(meta));
}

inline OrderedJson document_to_json(const Document& d) {
  OrderedJson obj = OrderedJson::object();
  obj["id"] = d.id;
  obj["text"] = d.raw_text;
  if (d.label) obj["label"] = std::string(to_string(*d.label));
  obj["source"] = std::string(to_string(d.source));
  for (auto it = d.meta.begin(); it != d.meta.end(); ++it) obj[it.key()] = it.value();
  return obj;
}

/// Reads JSONL records from a stream. Blank lines are skipped.
inline Dataset read_jsonl(std::istream& in, std::string_view name = "<stream>") {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      ds.add(document_from_json(OrderedJson::parse(line)));
    } catch (const std::exception& e) {
      throw DataError(std::string(name) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ds;
}

inline Dataset load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_jsonl(in, path);
}

inline void write_jsonl(std::ostream& out, const Dataset& ds) {
  for (const auto& d : ds) out << document_to_json(d).dump() << '\n';
}

inline void save_jsonl(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_jsonl(out, ds);
  if (!out) throw DataError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Filtering pipeline
// ---------------------------------------------------------------------------

struct FilterStats {
  std::size_t kept = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count

  std::size_t total_dropped() const {
    std::size_t n = 0;
    for (const auto& [_, c] : dropped) n += c;
    return n;
  }
};

struct FilterResult {
  Dataset kept;
  FilterStats stats;
};

/// Keeps documents passing both the script filter and the language
/// predicate. Kept documents carry their normalized text as raw text.
inline FilterResult filter_corpus(const Dataset& raw, const LanguagePredicate& language) {
  FilterResult result;
  for (const auto& d : raw) {
    if (!script_filter(d.normalized_text)) {
      ++result.stats.dropped["script"];
      continue;
    }
    bool accepted = false;
    try {
      accepted = language(d.normalized_text);
    } catch (const std::exception& e) {
      throw ClientError("language identifier failed on document " + d.id + ": " + e.what());
    }
    if (!accepted) {
      ++result.stats.dropped["language"];
      continue;
    }
    result.kept.add(make_document(d.id, d.normalized_text, d.label, d.source, d.meta));
    ++result.stats.kept;
  }
  return result;
}

}  // namespace ckbsent
