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

// Multi-annotator judgments: aggregation into final labels and nominal
// Krippendorff's alpha over a caller-chosen label projection.

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ckbsent/common.hpp"
#include "ckbsent/corpus.hpp"

namespace ckbsent {

enum class Subjectivity : std::uint8_t { Subjective, Objective };

enum class SentimentValue : std::uint8_t { Positive, Negative, Mixed, Neutral, NoneLabel };

inline std::string_view to_string(Subjectivity s) {
  return s == Subjectivity::Subjective ? "subjective" : "objective";
}

inline std::string_view to_string(SentimentValue v) {
  switch (v) {
    case SentimentValue::Positive:
      return "positive";
    case SentimentValue::Negative:
      return "negative";
    case SentimentValue::Mixed:
      return "mixed";
    case SentimentValue::Neutral:
      return "neutral";
    case SentimentValue::NoneLabel:
      return "none";
  }
  return "?";
}

inline std::optional<SentimentValue> parse_sentiment_value(std::string_view s) {
  if (s == "positive") return SentimentValue::Positive;
  if (s == "negative") return SentimentValue::Negative;
  if (s == "mixed") return SentimentValue::Mixed;
  if (s == "neutral") return SentimentValue::Neutral;
  if (s == "none") return SentimentValue::NoneLabel;
  return std::nullopt;
}

/// Subjectivity gate plus, for subjective units only, a five-way sentiment.
struct AnnotationLabel {
  Subjectivity subjectivity = Subjectivity::Objective;
  std::optional<SentimentValue> sentiment;

  static AnnotationLabel objective() { return {Subjectivity::Objective, std::nullopt}; }
  static AnnotationLabel subjective(SentimentValue v) { return {Subjectivity::Subjective, v}; }

  bool valid() const { return (subjectivity == Subjectivity::Subjective) == sentiment.has_value(); }

  bool operator==(const AnnotationLabel&) const = default;
};

inline std::string describe(const AnnotationLabel& l) {
  if (l.subjectivity == Subjectivity::Objective) return "objective";
  return "subjective+" + std::string(to_string(*l.sentiment));
}

struct AnnotationRecord {
  std::string unit_id;
  std::string annotator_id;
  AnnotationLabel label;
};

// ---------------------------------------------------------------------------
// Krippendorff's alpha (nominal)
// ---------------------------------------------------------------------------

/// Maps a label to a nominal value; nullopt marks the judgment as missing
/// for this projection.
using ValueProjection = std::function<std::optional<std::string>(const AnnotationLabel&)>;

struct AgreementResult {
  /// Empty when expected disagreement is zero (a single value overall).
  std::optional<double> alpha;
  double observed_disagreement = 0.0;
  double expected_disagreement = 0.0;
  std::vector<std::string> values;  // sorted; indexes the coincidence matrix
  std::vector<std::vector<double>> coincidences;
  double n_total = 0.0;
  std::size_t pairable_units = 0;
};

/// Nominal alpha from the coincidence matrix of all units carrying at least
/// two values under `value_of`.
inline AgreementResult krippendorff_alpha(const std::vector<AnnotationRecord>& records,
                                          const ValueProjection& value_of) {
  std::map<std::string, std::map<std::string, std::string>> units;  // unit -> annotator -> value
  std::set<std::string> value_set;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.unit_id, r.annotator_id).second) {
      throw DataError("duplicate annotation for unit " + r.unit_id + " by " + r.annotator_id);
    }
    auto v = value_of(r.label);
    if (!v) continue;
    units[r.unit_id][r.annotator_id] = *v;
  }
  for (const auto& [_, by_annotator] : units) {
    if (by_annotator.size() < 2) continue;
    for (const auto& [__, v] : by_annotator) value_set.insert(v);
  }

  AgreementResult result;
  result.values.assign(value_set.begin(), value_set.end());
  const std::size_t k = result.values.size();
  result.coincidences.assign(k, std::vector<double>(k, 0.0));
  auto index = [&](const std::string& v) {
    return static_cast<std::size_t>(
        std::lower_bound(result.values.begin(), result.values.end(), v) - result.values.begin());
  };

  for (const auto& [_, by_annotator] : units) {
    const std::size_t m = by_annotator.size();
    if (m < 2) continue;
    ++result.pairable_units;
    std::vector<double> hist(k, 0.0);
    for (const auto& [__, v] : by_annotator) hist[index(v)] += 1.0;
    const double scale = 1.0 / static_cast<double>(m - 1);
    for (std::size_t c = 0; c < k; ++c) {
      if (hist[c] == 0.0) continue;
      for (std::size_t d = 0; d < k; ++d) {
        const double pairs = c == d ? hist[c] * (hist[c] - 1.0) : hist[c] * hist[d];
        result.coincidences[c][d] += pairs * scale;
      }
    }
  }
  if (result.pairable_units == 0) throw DataError("no unit has two or more annotations");

  std::vector<double> marginals(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) marginals[c] += result.coincidences[c][d];
    result.n_total += marginals[c];
  }
  double off_diagonal = 0.0;
  double expected_pairs = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      off_diagonal += result.coincidences[c][d];
      expected_pairs += marginals[c] * marginals[d];
    }
  }
  const double n = result.n_total;
  result.observed_disagreement = off_diagonal / n;
  result.expected_disagreement = expected_pairs / (n * (n - 1.0));
  if (expected_pairs > 0.0) result.alpha = 1.0 - (n - 1.0) * off_diagonal / expected_pairs;
  return result;
}

namespace projection {

/// Five sentiment values; objective judgments are missing.
inline std::optional<std::string> five_way(const AnnotationLabel& l) {
  if (l.subjectivity == Subjectivity::Objective) return std::nullopt;
  return std::string(to_string(*l.sentiment));
}

/// Five sentiment values plus "objective" as a sixth.
inline std::optional<std::string> gated(const AnnotationLabel& l) {
  if (l.subjectivity == Subjectivity::Objective) return std::string("objective");
  return std::string(to_string(*l.sentiment));
}

/// Positive, negative, neutral; everything else is missing.
inline std::optional<std::string> three_way(const AnnotationLabel& l) {
  if (l.subjectivity == Subjectivity::Objective) return std::nullopt;
  switch (*l.sentiment) {
    case SentimentValue::Positive:
    case SentimentValue::Negative:
    case SentimentValue::Neutral:
      return std::string(to_string(*l.sentiment));
    default:
      return std::nullopt;
  }
}

inline std::optional<std::string> subjectivity(const AnnotationLabel& l) {
  return std::string(to_string(l.subjectivity));
}

}  // namespace projection

struct NamedProjection {
  std::string_view name;
  ValueProjection project;
};

inline std::vector<NamedProjection> standard_projections() {
  return {{"five-way", projection::five_way},
          {"gated-six-way", projection::gated},
          {"three-way", projection::three_way},
          {"subjectivity", projection::subjectivity}};
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

enum class TiePolicy : std::uint8_t {
  /// Any sentiment disagreement becomes Mixed.
  Mixed,
  /// Strict plurality of sentiment values wins; otherwise Mixed.
  Plurality,
};

using UnitRecords = std::map<std::string, std::vector<AnnotationRecord>>;

inline UnitRecords group_by_unit(const std::vector<AnnotationRecord>& records) {
  UnitRecords out;
  for (const auto& r : records) out[r.unit_id].push_back(r);
  return out;
}

inline AnnotationLabel aggregate_unit(const std::vector<AnnotationRecord>& records, TiePolicy policy) {
  if (records.empty()) throw DataError("aggregate: unit without records");
  bool any_objective = false;
  bool any_subjective = false;
  std::map<SentimentValue, std::size_t> votes;
  for (const auto& r : records) {
    if (r.label.subjectivity == Subjectivity::Objective) {
      any_objective = true;
    } else {
      any_subjective = true;
      ++votes[*r.label.sentiment];
    }
  }
  if (any_objective && any_subjective) return AnnotationLabel::subjective(SentimentValue::Mixed);
  if (any_objective) return AnnotationLabel::objective();
  if (votes.size() == 1) return AnnotationLabel::subjective(votes.begin()->first);
  if (policy == TiePolicy::Plurality) {
    std::size_t best = 0;
    std::size_t winners = 0;
    SentimentValue winner = SentimentValue::Mixed;
    for (const auto& [v, c] : votes) {
      if (c > best) {
        best = c;
        winners = 1;
        winner = v;
      } else if (c == best) {
        ++winners;
      }
    }
    if (winners == 1) return AnnotationLabel::subjective(winner);
  }
  return AnnotationLabel::subjective(SentimentValue::Mixed);
}

/// Final label per unit. Entries in `overrides` replace the computed label
/// (manual rectification by a third annotator).
inline std::map<std::string, AnnotationLabel> aggregate(
    const UnitRecords& per_unit, TiePolicy policy = TiePolicy::Mixed,
    const std::map<std::string, AnnotationLabel>& overrides = {}) {
  std::map<std::string, AnnotationLabel> out;
  for (const auto& [unit, records] : per_unit) out[unit] = aggregate_unit(records, policy);
  for (const auto& [unit, label] : overrides) {
    if (!label.valid()) throw DataError("invalid override label for unit " + unit);
    out[unit] = label;
  }
  return out;
}

inline std::optional<SentimentLabel> classification_label(const AnnotationLabel& l) {
  if (l.subjectivity == Subjectivity::Objective) return std::nullopt;
  switch (*l.sentiment) {
    case SentimentValue::Positive:
      return SentimentLabel::Positive;
    case SentimentValue::Negative:
      return SentimentLabel::Negative;
    case SentimentValue::Neutral:
      return SentimentLabel::Neutral;
    default:
      return std::nullopt;
  }
}

struct ClassificationResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

/// Keeps documents whose final label is positive, negative or neutral and
/// attaches that label.
inline ClassificationResult to_classification_dataset(
    const std::map<std::string, AnnotationLabel>& aggregated, const Dataset& documents) {
  ClassificationResult out;
  for (const auto& d : documents) {
    auto it = aggregated.find(d.id);
    if (it == aggregated.end()) throw DataError("no aggregated label for document " + d.id);
    auto label = classification_label(it->second);
    if (!label) continue;
    Document kept = d;
    kept.label = label;
    out.dataset.add(std::move(kept));
  }
  if (out.dataset.empty()) {
    out.warnings.push_back("no document carries a positive, negative or neutral final label");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline AnnotationLabel parse_annotation_label(const nlohmann::json& obj) {
  const auto subj = obj.at("subjectivity").get<std::string>();
  if (subj == "objective") {
    if (obj.contains("sentiment") && !obj["sentiment"].is_null()) {
      throw DataError("objective annotation must not carry a sentiment");
    }
    return AnnotationLabel::objective();
  }
  if (subj != "subjective") throw DataError("unknown subjectivity \"" + subj + "\"");
  if (!obj.contains("sentiment")) throw DataError("subjective annotation without sentiment");
  auto v = parse_sentiment_value(obj["sentiment"].get<std::string>());
  if (!v) throw DataError("unknown sentiment \"" + obj["sentiment"].get<std::string>() + "\"");
  return AnnotationLabel::subjective(*v);
}

inline nlohmann::json annotation_to_json(const AnnotationRecord& r) {
  nlohmann::json obj;
  obj["unit_id"] = r.unit_id;
  obj["annotator_id"] = r.annotator_id;
  obj["subjectivity"] = std::string(to_string(r.label.subjectivity));
  if (r.label.sentiment) obj["sentiment"] = std::string(to_string(*r.label.sentiment));
  return obj;
}

template <typename F>
void for_each_jsonl_line(const std::string& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::vector<AnnotationRecord> out;
  for_each_jsonl_line(path, [&](const nlohmann::json& obj) {
    out.push_back({obj.at("unit_id").get<std::string>(), obj.at("annotator_id").get<std::string>(),
                   parse_annotation_label(obj)});
  });
  return out;
}

inline void save_annotations(const std::vector<AnnotationRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& r : records) out << annotation_to_json(r).dump() << '\n';
}

/// Override lines: {"unit_id": ..., "final": "objective" | <sentiment value>}.
inline std::map<std::string, AnnotationLabel> load_overrides(const std::string& path) {
  std::map<std::string, AnnotationLabel> out;
  for_each_jsonl_line(path, [&](const nlohmann::json& obj) {
    const auto final_label = obj.at("final").get<std::string>();
    AnnotationLabel label;
    if (final_label == "objective") {
      label = AnnotationLabel::objective();
    } else {
      auto v = parse_sentiment_value(final_label);
      if (!v) throw DataError("unknown final label \"" + final_label + "\"");
      label = AnnotationLabel::subjective(*v);
    }
    out[obj.at("unit_id").get<std::string>()] = label;
  });
  return out;
}

}  // namespace ckbsent
