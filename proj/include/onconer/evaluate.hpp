// Copyright 2026 The onconer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Entity-level strict evaluation and the real / correct / incorrect
// comparison used for hit-and-miss summaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "onconer/corpus.hpp"
#include "onconer/error.hpp"
#include "onconer/label.hpp"

namespace onconer {

// Harmonic mean; 0 when both inputs are 0.
inline double f1(double precision, double recall) {
  if (!(precision >= 0.0 && precision <= 1.0) || !(recall >= 0.0 && recall <= 1.0)) {
    throw UsageError("precision and recall must lie in [0, 1]");
  }
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

inline double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct StrictMatch {
  MatchCounts counts;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (gold index, predicted index)
};

// A prediction is correct only when start, end and label all equal a gold
// span. Each span is used at most once.
inline StrictMatch match_strict(const std::vector<Span>& gold, const std::vector<Span>& pred) {
  auto order = [](const std::vector<Span>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
  };
  const auto gi = order(gold), pi = order(pred);
  StrictMatch m;
  std::size_t a = 0, b = 0;
  while (a < gi.size() && b < pi.size()) {
    const Span& g = gold[gi[a]];
    const Span& p = pred[pi[b]];
    if (g == p) {
      m.pairs.emplace_back(gi[a++], pi[b++]);
    } else if (g < p) {
      ++a;
    } else {
      ++b;
    }
  }
  m.counts.tp = m.pairs.size();
  m.counts.fp = pred.size() - m.pairs.size();
  m.counts.fn = gold.size() - m.pairs.size();
  return m;
}

using LabelCountTable = std::array<MatchCounts, kLabelCount>;  // by label_index

inline LabelCountTable count_by_label(const std::vector<Span>& gold, const std::vector<Span>& pred) {
  LabelCountTable table{};
  const StrictMatch m = match_strict(gold, pred);
  std::vector<bool> gold_hit(gold.size()), pred_hit(pred.size());
  for (auto [g, p] : m.pairs) {
    gold_hit[g] = pred_hit[p] = true;
    ++table[label_index(gold[g].label)].tp;
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold_hit[i]) ++table[label_index(gold[i].label)].fn;
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred_hit[i]) ++table[label_index(pred[i].label)].fp;
  }
  return table;
}

struct DocumentSpans {
  std::string id;
  std::vector<Span> spans;
};

inline std::vector<DocumentSpans> gold_spans(const Corpus& corpus) {
  std::vector<DocumentSpans> out;
  for (const auto& d : corpus.documents) out.push_back({d.id(), d.spans});
  return out;
}

namespace detail {

// Pairs every gold document with its predictions (empty when absent).
// Predictions for unknown documents are an error.
template <typename Fn>
void for_each_aligned(const std::vector<DocumentSpans>& gold,
                      const std::vector<DocumentSpans>& pred, Fn&& fn) {
  std::map<std::string, const DocumentSpans*> by_id;
  for (const auto& p : pred) {
    if (!by_id.emplace(p.id, &p).second) throw DataError("duplicate predictions for document " + p.id);
  }
  std::size_t used = 0;
  static const std::vector<Span> none;
  for (const auto& g : gold) {
    auto it = by_id.find(g.id);
    if (it != by_id.end()) ++used;
    fn(g, it == by_id.end() ? none : it->second->spans);
  }
  if (used != by_id.size()) {
    std::map<std::string, bool> known;
    for (const auto& g : gold) known[g.id] = true;
    for (const auto& [id, p] : by_id) {
      if (!known.contains(id)) throw DataError("predictions for unknown document " + id);
    }
  }
}

}  // namespace detail

inline LabelCountTable count_by_label(const std::vector<DocumentSpans>& gold,
                                      const std::vector<DocumentSpans>& pred) {
  LabelCountTable table{};
  detail::for_each_aligned(gold, pred, [&](const DocumentSpans& g, const std::vector<Span>& p) {
    const auto doc = count_by_label(g.spans, p);
    for (std::size_t i = 0; i < kLabelCount; ++i) table[i] += doc[i];
  });
  return table;
}

struct LabelMetrics {
  Label label = Label::EVOL;
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count = tp + fn

  static LabelMetrics from_counts(Label label, const MatchCounts& c) {
    LabelMetrics m;
    m.label = label;
    m.tp = c.tp;
    m.fp = c.fp;
    m.fn = c.fn;
    m.precision = safe_ratio(c.tp, c.tp + c.fp);
    m.recall = safe_ratio(c.tp, c.tp + c.fn);
    m.f1 = onconer::f1(m.precision, m.recall);
    m.support = c.tp + c.fn;
    return m;
  }
};

// One row per label, in table order.
inline std::vector<LabelMetrics> per_label_metrics(const LabelCountTable& table) {
  std::vector<LabelMetrics> out;
  for (Label l : kTableOrder) out.push_back(LabelMetrics::from_counts(l, table[label_index(l)]));
  return out;
}

inline std::vector<LabelMetrics> per_label_metrics(const std::vector<DocumentSpans>& gold,
                                                   const std::vector<DocumentSpans>& pred) {
  return per_label_metrics(count_by_label(gold, pred));
}

struct GlobalMetrics {
  std::optional<double> accuracy;  // supplied by the word-level scorer
  double precision = 0.0;          // micro averages over summed counts
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> loss;
  MatchCounts counts;
};

inline GlobalMetrics global_metrics(const LabelCountTable& table,
                                    std::optional<double> accuracy = std::nullopt,
                                    std::optional<double> loss = std::nullopt) {
  GlobalMetrics g;
  for (const auto& c : table) g.counts += c;
  g.accuracy = accuracy;
  g.loss = loss;
  g.precision = safe_ratio(g.counts.tp, g.counts.tp + g.counts.fp);
  g.recall = safe_ratio(g.counts.tp, g.counts.tp + g.counts.fn);
  g.f1 = f1(g.precision, g.recall);
  return g;
}

// ---------------------------------------------------------------------------
// Comparison report

inline constexpr std::string_view kNoLabel = "NO_LABEL";

struct ComparisonRow {
  std::string category;  // label name or NO_LABEL
  std::size_t real = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t extra_detected = 0;  // predictions on documents without gold annotations

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;

  std::size_t total_correct() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.correct;
    return n;
  }
  std::size_t total_incorrect() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.incorrect;
    return n;
  }

  // correct / (correct + incorrect); undefined without predictions.
  std::optional<double> hit_fraction() const {
    const std::size_t d = total_correct() + total_incorrect();
    if (d == 0) return std::nullopt;
    return static_cast<double>(total_correct()) / static_cast<double>(d);
  }

  // Hit percentage in tenths of a percent, rounded half up in exact
  // integer arithmetic (974.69... -> 975, i.e. 97.5%).
  std::optional<std::uint64_t> hit_permille() const {
    const std::uint64_t c = total_correct();
    const std::uint64_t d = c + total_incorrect();
    if (d == 0) return std::nullopt;
    return (2000 * c + d) / (2 * d);
  }

  // Rows where more predictions were judged correct than exist in gold.
  // Strict matching never produces these; hand-counted series may.
  std::vector<std::string> overshoot() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
      if (r.correct > r.real) out.push_back(r.category);
    }
    return out;
  }

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

// Per label: real = gold count, correct = strict true positives, incorrect =
// false positives, over documents with at least one gold span. Predictions
// on documents with no gold span go to the NO_LABEL row as extra_detected;
// that row exists only when the gold set has such documents.
inline ComparisonReport compare_report(const std::vector<DocumentSpans>& gold,
                                       const std::vector<DocumentSpans>& pred) {
  LabelCountTable table{};
  std::size_t extra = 0;
  bool has_unannotated = false;
  detail::for_each_aligned(gold, pred, [&](const DocumentSpans& g, const std::vector<Span>& p) {
    if (g.spans.empty()) {
      has_unannotated = true;
      extra += p.size();
      return;
    }
    const auto doc = count_by_label(g.spans, p);
    for (std::size_t i = 0; i < kLabelCount; ++i) table[i] += doc[i];
  });
  ComparisonReport report;
  for (Label l : kTableOrder) {
    const auto& c = table[label_index(l)];
    report.rows.push_back({std::string(label_name(l)), c.tp + c.fn, c.tp, c.fp, 0});
  }
  if (has_unannotated) report.rows.push_back({std::string(kNoLabel), 0, 0, 0, extra});
  return report;
}

struct Evaluation {
  std::vector<LabelMetrics> per_label;
  GlobalMetrics global;
  ComparisonReport comparison;
};

inline Evaluation evaluate(const std::vector<DocumentSpans>& gold,
                           const std::vector<DocumentSpans>& pred,
                           std::optional<double> accuracy = std::nullopt,
                           std::optional<double> loss = std::nullopt) {
  const LabelCountTable table = count_by_label(gold, pred);
  return {per_label_metrics(table), global_metrics(table, accuracy, loss),
          compare_report(gold, pred)};
}

}  // namespace onconer
