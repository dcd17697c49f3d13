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

// Confusion matrices, precision/recall/F1 and report rendering.

#include <algorithm>
#include <array>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ckbsent/common.hpp"

namespace ckbsent {

/// Rows are reference classes, columns predicted classes, both in kClassOrder.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts) {
      for (auto c : row) n += c;
    }
    return n;
  }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(std::span<const SentimentLabel> refs, std::span<const SentimentLabel> preds) {
  if (refs.size() != preds.size()) {
    throw DataError("confusion: " + std::to_string(refs.size()) + " references but " +
                    std::to_string(preds.size()) + " predictions");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < refs.size(); ++i) ++cm.counts[index_of(refs[i])][index_of(preds[i])];
  return cm;
}

struct ClassMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t support = 0;
  bool operator==(const ClassMetrics&) const = default;
};

struct Averages {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  bool operator==(const Averages&) const = default;
};

struct SettingTags {
  std::string model, test_set, system, emoji_mode;
  std::uint64_t seed = 0;
  bool operator==(const SettingTags&) const = default;
};

struct EvaluationReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  Averages macro, weighted;
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  SettingTags tags;
  std::vector<std::string> warnings;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& c : per_class) n += c.support;
    return n;
  }
};

/// Zero-denominator precision or recall scores 0 and leaves a warning.
inline EvaluationReport metrics(const ConfusionMatrix& cm, SettingTags tags = {}) {
  const std::size_t n = cm.total();
  if (n == 0) throw DataError("metrics: empty confusion matrix");
  EvaluationReport r;
  r.confusion = cm;
  r.tags = std::move(tags);
  std::size_t trace = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      row += cm.counts[c][k];
      col += cm.counts[k][c];
    }
    const double tp = static_cast<double>(cm.counts[c][c]);
    trace += cm.counts[c][c];
    auto& m = r.per_class[c];
    m.support = row;
    const std::string name(to_string(label_from_index(c)));
    if (col > 0) {
      m.precision = tp / static_cast<double>(col);
    } else {
      r.warnings.push_back("precision of " + name + " is undefined (no predictions); scored 0");
    }
    if (row > 0) {
      m.recall = tp / static_cast<double>(row);
    } else {
      r.warnings.push_back("recall of " + name + " is undefined (no references); scored 0");
    }
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  }
  const double total = static_cast<double>(n);
  for (const auto& m : r.per_class) {
    r.macro.precision += m.precision / kNumClasses;
    r.macro.recall += m.recall / kNumClasses;
    r.macro.f1 += m.f1 / kNumClasses;
    const double w = static_cast<double>(m.support) / total;
    r.weighted.precision += w * m.precision;
    r.weighted.recall += w * m.recall;
    r.weighted.f1 += w * m.f1;
  }
  r.accuracy = static_cast<double>(trace) / total;
  return r;
}

inline EvaluationReport evaluate(std::span<const SentimentLabel> refs, std::span<const SentimentLabel> preds,
                                 SettingTags tags = {}) {
  return metrics(confusion(refs, preds), std::move(tags));
}

// ---------------------------------------------------------------------------
// Text table
// ---------------------------------------------------------------------------

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// "P R F1 Acc" with weighted aggregates, two decimals.
inline std::string format_scores(const EvaluationReport& r) {
  return fixed2(r.weighted.precision) + " " + fixed2(r.weighted.recall) + " " + fixed2(r.weighted.f1) + " " +
         fixed2(r.accuracy);
}

/// Aligned table, one block per emoji mode in order of first appearance.
inline std::string render_table(std::span<const EvaluationReport> reports) {
  const std::vector<std::string> header = {"Model", "Test set", "System", "Precision", "Recall", "F1", "Accuracy"};
  std::vector<std::string> modes;
  for (const auto& r : reports) {
    if (std::find(modes.begin(), modes.end(), r.tags.emoji_mode) == modes.end()) modes.push_back(r.tags.emoji_mode);
  }
  std::ostringstream out;
  for (const auto& mode : modes) {
    std::vector<std::vector<std::string>> rows = {header};
    for (const auto& r : reports) {
      if (r.tags.emoji_mode != mode) continue;
      rows.push_back({r.tags.model, r.tags.test_set, r.tags.system, fixed2(r.weighted.precision),
                      fixed2(r.weighted.recall), fixed2(r.weighted.f1), fixed2(r.accuracy)});
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    if (!mode.empty()) out << "Emoji mode: " << mode << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::string line;
      for (std::size_t c = 0; c < rows[i].size(); ++c) {
        if (c) line += " | ";
        line += rows[i][c] + std::string(width[c] - rows[i][c].size(), ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << "\n";
      if (i == 0) {
        std::string rule;
        for (std::size_t c = 0; c < width.size(); ++c) rule += (c ? "-+-" : "") + std::string(width[c], '-');
        out << rule << "\n";
      }
    }
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "model,test_set,system,emoji_mode,seed,class,precision,recall,f1,support";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace detail

/// Full-precision CSV. `comment`, when given, is written first as "# ...".
inline std::string render_csv(std::span<const EvaluationReport> reports, const std::string& comment = "") {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << "\n";
  out << kCsvHeader << "\n";
  for (const auto& r : reports) {
    const std::string prefix = detail::csv_field(r.tags.model) + "," + detail::csv_field(r.tags.test_set) + "," +
                               detail::csv_field(r.tags.system) + "," + detail::csv_field(r.tags.emoji_mode) + "," +
                               std::to_string(r.tags.seed) + ",";
    auto row = [&](std::string_view cls, double p, double rc, double f, std::size_t support) {
      out << prefix << cls << "," << exact_decimal(p) << "," << exact_decimal(rc) << "," << exact_decimal(f) << ","
          << support << "\n";
    };
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const auto& m = r.per_class[c];
      row(to_string(label_from_index(c)), m.precision, m.recall, m.f1, m.support);
    }
    row("__macro__", r.macro.precision, r.macro.recall, r.macro.f1, r.total());
    row("__weighted__", r.weighted.precision, r.weighted.recall, r.weighted.f1, r.total());
    row("__accuracy__", r.accuracy, r.accuracy, r.accuracy, r.total());
  }
  return out.str();
}

/// Inverse of render_csv for every metric field and tag; the confusion
/// matrix is not part of the CSV and stays zero.
inline std::vector<EvaluationReport> parse_csv(std::istream& in) {
  std::vector<EvaluationReport> out;
  std::map<std::tuple<std::string, std::string, std::string, std::string, std::uint64_t>, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line != kCsvHeader) throw DataError("csv:" + std::to_string(line_no) + ": unexpected header");
      seen_header = true;
      continue;
    }
    const auto f = detail::split_csv_line(line);
    if (f.size() != 10) throw DataError("csv:" + std::to_string(line_no) + ": expected 10 fields");
    try {
      SettingTags tags{f[0], f[1], f[2], f[3], std::stoull(f[4])};
      const auto key = std::make_tuple(tags.model, tags.test_set, tags.system, tags.emoji_mode, tags.seed);
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, out.size()).first;
        out.emplace_back();
        out.back().tags = tags;
      }
      auto& r = out[it->second];
      const double p = std::stod(f[6]), rc = std::stod(f[7]), f1 = std::stod(f[8]);
      if (f[5] == "__macro__") {
        r.macro = {p, rc, f1};
      } else if (f[5] == "__weighted__") {
        r.weighted = {p, rc, f1};
      } else if (f[5] == "__accuracy__") {
        r.accuracy = f1;
      } else {
        auto label = parse_label(f[5]);
        if (!label) throw DataError("unknown class \"" + f[5] + "\"");
        r.per_class[index_of(*label)] = {p, rc, f1, static_cast<std::size_t>(std::stoull(f[9]))};
      }
    } catch (const DataError& e) {
      throw DataError("csv:" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception&) {
      throw DataError("csv:" + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

/// One point of the training-size versus F1 curve.
struct SizePoint {
  std::string model, system, emoji_mode;
  std::size_t nominal_size = 0;  // balanced dataset size times the split ratio
  std::size_t train_size = 0;    // documents actually used for training
  double f1 = 0.0;               // weighted F1 on the baseline test set
};

inline std::string render_size_curve(std::span<const SizePoint> points, const std::string& comment = "") {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "model,system,emoji_mode,nominal_size,train_size,f1\n";
  for (const auto& p : points) {
    out << detail::csv_field(p.model) << "," << detail::csv_field(p.system) << "," << detail::csv_field(p.emoji_mode)
        << "," << p.nominal_size << "," << p.train_size << "," << exact_decimal(p.f1) << "\n";
  }
  return out.str();
}

}  // namespace ckbsent
