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

// Corpus data model and the Doccano span export reader/writer.
//
// A Doccano span export is one JSON object per line:
//
//   {"id": "d1", "text": "Mama derecha", "label": [[0, 12, "PAT"]]}
//
// Offsets count Unicode scalar values and are end-exclusive. An optional
// "category" key carries the report type used for stratified splitting.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "onconer/error.hpp"
#include "onconer/label.hpp"
#include "onconer/unicode.hpp"

namespace onconer {

enum class Category : std::uint8_t {
  breast_pathology,
  lung_pathology,
  lung_symptomatology,
};

constexpr std::string_view category_name(Category c) {
  switch (c) {
    case Category::breast_pathology: return "breast_pathology";
    case Category::lung_pathology: return "lung_pathology";
    case Category::lung_symptomatology: return "lung_symptomatology";
  }
  return "?";
}

constexpr std::optional<Category> parse_category(std::string_view name) {
  for (auto c : {Category::breast_pathology, Category::lung_pathology,
                 Category::lung_symptomatology}) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  Label label = Label::EVOL;

  std::size_t length() const { return end - start; }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  friend auto operator<=>(const Span&, const Span&) = default;
};

inline std::string to_string(const Span& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ",\"" +
         std::string(label_name(s.label)) + "\"]";
}

struct Document {
  std::string id;
  std::optional<Category> category;
  std::string text;  // UTF-8

  friend bool operator==(const Document&, const Document&) = default;
};

struct AnnotatedDocument {
  Document document;
  std::vector<Span> spans;  // sorted by (start, end), non-overlapping

  const std::string& id() const { return document.id; }
  friend bool operator==(const AnnotatedDocument&, const AnnotatedDocument&) = default;
};

struct Corpus {
  std::vector<AnnotatedDocument> documents;

  bool empty() const { return documents.empty(); }
  std::size_t size() const { return documents.size(); }
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Length in code points. Assumes valid UTF-8.
inline std::size_t text_length(std::string_view utf8) {
  return static_cast<std::size_t>(std::count_if(
      utf8.begin(), utf8.end(),
      [](char b) { return (static_cast<unsigned char>(b) & 0xC0) != 0x80; }));
}

inline void sort_spans(std::vector<Span>& spans) {
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return label_index(a.label) < label_index(b.label);
  });
}

inline void sort_by_id(Corpus& corpus) {
  std::stable_sort(corpus.documents.begin(), corpus.documents.end(),
                   [](const auto& a, const auto& b) { return a.id() < b.id(); });
}

// ---------------------------------------------------------------------------
// Doccano ingestion

struct ParseOptions {
  bool drop_overlaps = false;          // keep the longer of two overlapping spans
  bool ignore_unknown_labels = false;  // drop spans with unknown label names
};

struct ParseResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string coerce_id(const nlohmann::json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer() || id.is_number_unsigned()) return id.dump();
  throw DataError("field 'id' must be a string or an integer");
}

struct RawSpan {
  std::int64_t start;
  std::int64_t end;
  std::string label;
};

struct RawRecord {
  Document document;
  std::vector<RawSpan> spans;
};

inline RawRecord parse_record(std::string_view line, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + "malformed record: " + e.what());
  }
  if (!j.is_object()) throw DataError(where + "record is not a JSON object");
  for (const char* key : {"id", "text", "label"}) {
    if (!j.contains(key)) throw DataError(where + "missing key '" + key + "'");
  }
  RawRecord rec;
  try {
    rec.document.id = coerce_id(j["id"]);
  } catch (const DataError& e) {
    throw DataError(where + e.what());
  }
  if (!j["text"].is_string()) throw DataError(where + "field 'text' must be a string");
  rec.document.text = j["text"].get<std::string>();
  if (j.contains("category") && !j["category"].is_null()) {
    const auto& c = j["category"];
    auto parsed = c.is_string() ? parse_category(c.get<std::string>()) : std::nullopt;
    if (!parsed) throw DataError(where + "unknown category " + c.dump());
    rec.document.category = parsed;
  }
  if (!j["label"].is_array()) throw DataError(where + "field 'label' must be an array");
  for (const auto& triple : j["label"]) {
    if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number_integer() ||
        !triple[1].is_number_integer() || !triple[2].is_string()) {
      throw DataError(where + "document " + rec.document.id +
                      ": span must be [start, end, label], got " + triple.dump());
    }
    rec.spans.push_back({triple[0].get<std::int64_t>(), triple[1].get<std::int64_t>(),
                         triple[2].get<std::string>()});
  }
  return rec;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, line_no);
  }
}

inline std::string raw_triple(const RawSpan& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ",\"" +
         s.label + "\"]";
}

}  // namespace detail

// Strict reader: rejects malformed lines, out-of-bounds spans, overlapping
// spans, unknown labels, empty texts and duplicate ids unless the options
// relax the overlap or label checks.
inline ParseResult parse_doccano(std::istream& in, const ParseOptions& options = {}) {
  ParseResult result;
  std::set<std::string> seen;
  detail::for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    detail::RawRecord rec = detail::parse_record(line, line_no);
    const std::string& id = rec.document.id;
    const std::string where = "line " + std::to_string(line_no) + ": document " + id;
    if (!seen.insert(id).second) throw DataError(where + ": duplicate id");
    std::size_t length = 0;
    try {
      length = unicode::decode_utf8(rec.document.text).size();
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (length == 0) throw DataError(where + ": empty text");

    AnnotatedDocument doc{std::move(rec.document), {}};
    for (const auto& raw : rec.spans) {
      auto label = parse_label(raw.label);
      if (!label) {
        if (!options.ignore_unknown_labels) {
          throw DataError(where + ": unknown label '" + raw.label + "' in " +
                          detail::raw_triple(raw));
        }
        result.warnings.push_back(where + ": dropped span with unknown label " +
                                  detail::raw_triple(raw));
        continue;
      }
      if (raw.start < 0 || raw.end <= raw.start ||
          static_cast<std::size_t>(raw.end) > length) {
        throw DataError(where + ": span out of bounds " + detail::raw_triple(raw) +
                        " (text length " + std::to_string(length) + ")");
      }
      doc.spans.push_back({static_cast<std::size_t>(raw.start),
                           static_cast<std::size_t>(raw.end), *label});
    }
    sort_spans(doc.spans);

    std::vector<Span> kept;
    for (const Span& s : doc.spans) {
      if (kept.empty() || !kept.back().overlaps(s)) {
        kept.push_back(s);
        continue;
      }
      if (!options.drop_overlaps) {
        throw DataError(where + ": overlapping spans " + to_string(kept.back()) +
                        " and " + to_string(s));
      }
      const Span& loser = s.length() > kept.back().length() ? kept.back() : s;
      result.warnings.push_back(where + ": dropped overlapping span " + to_string(loser));
      if (s.length() > kept.back().length()) kept.back() = s;
    }
    doc.spans = std::move(kept);
    result.corpus.documents.push_back(std::move(doc));
  });
  return result;
}

inline ParseResult parse_doccano(std::string_view text, const ParseOptions& options = {}) {
  std::istringstream in{std::string(text)};
  return parse_doccano(in, options);
}

// Lenient reader for `validate`: only the record structure is checked, so
// the returned corpus may violate any invariant. Spans with unknown labels
// cannot be represented and are listed in `warnings` instead.
inline ParseResult read_doccano_unchecked(std::istream& in) {
  ParseResult result;
  detail::for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    detail::RawRecord rec = detail::parse_record(line, line_no);
    AnnotatedDocument doc{std::move(rec.document), {}};
    for (const auto& raw : rec.spans) {
      auto label = parse_label(raw.label);
      if (!label || raw.start < 0 || raw.end < 0) {
        result.warnings.push_back("line " + std::to_string(line_no) + ": document " +
                                  doc.id() + ": unrepresentable span " +
                                  detail::raw_triple(raw));
        continue;
      }
      doc.spans.push_back({static_cast<std::size_t>(raw.start),
                           static_cast<std::size_t>(raw.end), *label});
    }
    result.corpus.documents.push_back(std::move(doc));
  });
  return result;
}

inline nlohmann::ordered_json to_json(const AnnotatedDocument& doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id();
  if (doc.document.category) j["category"] = category_name(*doc.document.category);
  j["text"] = doc.document.text;
  auto spans = nlohmann::ordered_json::array();
  for (const Span& s : doc.spans) {
    spans.push_back({s.start, s.end, label_name(s.label)});
  }
  j["label"] = std::move(spans);
  return j;
}

// Canonical serialization: one record per line, key order id, category,
// text, label. Document order is preserved.
inline void write_doccano(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents) out << to_json(doc).dump() << '\n';
}

inline std::string serialize_doccano(const Corpus& corpus) {
  std::ostringstream out;
  write_doccano(out, corpus);
  return out.str();
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  enum class Kind {
    duplicate_id,
    empty_id,
    empty_text,
    invalid_utf8,
    span_out_of_bounds,
    spans_unsorted,
    overlapping_spans,
  };
  Kind kind;
  std::string document_id;
  std::string message;
};

constexpr std::string_view violation_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::duplicate_id: return "duplicate_id";
    case Violation::Kind::empty_id: return "empty_id";
    case Violation::Kind::empty_text: return "empty_text";
    case Violation::Kind::invalid_utf8: return "invalid_utf8";
    case Violation::Kind::span_out_of_bounds: return "span_out_of_bounds";
    case Violation::Kind::spans_unsorted: return "spans_unsorted";
    case Violation::Kind::overlapping_spans: return "overlapping_spans";
  }
  return "?";
}

inline std::vector<Violation> validate(const Corpus& corpus) {
  using Kind = Violation::Kind;
  std::vector<Violation> out;
  std::set<std::string> seen;
  for (const auto& doc : corpus.documents) {
    const std::string& id = doc.id();
    if (id.empty()) out.push_back({Kind::empty_id, id, "empty document id"});
    if (!seen.insert(id).second) out.push_back({Kind::duplicate_id, id, "duplicate id " + id});

    std::optional<std::size_t> length;
    try {
      length = unicode::decode_utf8(doc.document.text).size();
    } catch (const DataError& e) {
      out.push_back({Kind::invalid_utf8, id, e.what()});
    }
    if (length && *length == 0) out.push_back({Kind::empty_text, id, "empty text"});

    for (const Span& s : doc.spans) {
      if (s.start >= s.end || (length && s.end > *length)) {
        out.push_back({Kind::span_out_of_bounds, id, "span out of bounds " + to_string(s)});
      }
    }
    if (!std::is_sorted(doc.spans.begin(), doc.spans.end(), [](const Span& a, const Span& b) {
          return std::pair(a.start, a.end) < std::pair(b.start, b.end);
        })) {
      out.push_back({Kind::spans_unsorted, id, "spans not sorted by (start, end)"});
    }
    std::vector<Span> sorted = doc.spans;
    sort_spans(sorted);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      for (std::size_t j = i + 1; j < sorted.size() && sorted[j].start < sorted[i].end; ++j) {
        if (sorted[i].overlaps(sorted[j])) {
          out.push_back({Kind::overlapping_spans, id,
                         "overlapping spans " + to_string(sorted[i]) + " and " +
                             to_string(sorted[j])});
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Label statistics

using LabelCounts = std::array<std::size_t, kLabelCount>;  // indexed by label_index

inline LabelCounts& operator+=(LabelCounts& a, const LabelCounts& b) {
  for (std::size_t i = 0; i < kLabelCount; ++i) a[i] += b[i];
  return a;
}

struct LabelDistribution {
  std::vector<std::pair<std::string, LabelCounts>> splits;  // in assignment order
  LabelCounts complete{};

  friend bool operator==(const LabelDistribution&, const LabelDistribution&) = default;
};

// Split name -> document ids.
struct SplitAssignment {
  std::vector<std::pair<std::string, std::vector<std::string>>> parts;
};

inline LabelCounts count_labels(const AnnotatedDocument& doc) {
  LabelCounts counts{};
  for (const Span& s : doc.spans) ++counts[label_index(s.label)];
  return counts;
}

inline LabelDistribution label_distribution(
    const Corpus& corpus, const std::optional<SplitAssignment>& assignment = std::nullopt) {
  LabelDistribution dist;
  if (!assignment) {
    for (const auto& doc : corpus.documents) dist.complete += count_labels(doc);
    return dist;
  }
  std::map<std::string, std::size_t> split_of;
  for (std::size_t p = 0; p < assignment->parts.size(); ++p) {
    for (const auto& id : assignment->parts[p].second) {
      auto [it, inserted] = split_of.emplace(id, p);
      if (!inserted) {
        throw DataError("document " + id + " assigned to two splits (" +
                        assignment->parts[it->second].first + ", " +
                        assignment->parts[p].first + ")");
      }
    }
  }
  for (const auto& [name, ids] : assignment->parts) dist.splits.emplace_back(name, LabelCounts{});
  std::set<std::string> present;
  for (const auto& doc : corpus.documents) {
    present.insert(doc.id());
    auto it = split_of.find(doc.id());
    if (it == split_of.end()) throw DataError("document " + doc.id() + " assigned to no split");
    dist.splits[it->second].second += count_labels(doc);
  }
  for (const auto& [id, p] : split_of) {
    if (!present.contains(id)) throw DataError("split assignment names unknown document " + id);
  }
  for (const auto& [name, counts] : dist.splits) dist.complete += counts;
  return dist;
}

// Labels whose `complete` count differs from the sum over `rows`.
inline std::vector<Label> sum_identity_violations(const std::vector<LabelCounts>& rows,
                                                  const LabelCounts& complete) {
  LabelCounts sum{};
  for (const auto& r : rows) sum += r;
  std::vector<Label> bad;
  for (Label l : kTableOrder) {
    if (sum[label_index(l)] != complete[label_index(l)]) bad.push_back(l);
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Splitting

// Nonnegative exact fraction.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d <= 0 || n < 0) throw UsageError("fraction must be nonnegative with positive denominator");
    const std::int64_t g = std::gcd(n, d);
    return {n / (g == 0 ? 1 : g), d / (g == 0 ? 1 : g)};
  }

  // Accepts "0.25", "1", "1/4".
  static Rational parse(std::string_view text) {
    auto bad = [&] { return UsageError("invalid fraction '" + std::string(text) + "'"); };
    auto digits = [&](std::string_view s) {
      if (s.empty() || s.size() > 15 ||
          !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw bad();
      }
      return std::stoll(std::string(s));
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      const auto d = digits(text.substr(slash + 1));
      if (d == 0) throw bad();
      return make(digits(text.substr(0, slash)), d);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      std::string_view whole = text.substr(0, dot), frac = text.substr(dot + 1);
      if (frac.empty() || frac.size() > 12) throw bad();
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      const std::int64_t w = whole.empty() ? 0 : digits(whole);
      return make(w * den + digits(frac), den);
    }
    return make(digits(text), 1);
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

inline Rational operator+(const Rational& a, const Rational& b) {
  return Rational::make(a.num * b.den + b.num * a.den, a.den * b.den);
}

struct SplitSpec {
  Rational train{1, 2};
  Rational validation{1, 4};
  Rational test{1, 4};
  std::uint64_t seed = 42;
  bool stratify_by_category = true;
};

inline constexpr std::array<std::string_view, 3> kSplitNames = {"train", "validation", "test"};

struct SplitResult {
  Corpus train;
  Corpus validation;
  Corpus test;

  SplitAssignment assignment() const {
    SplitAssignment a;
    const Corpus* parts[] = {&train, &validation, &test};
    for (std::size_t p = 0; p < 3; ++p) {
      std::vector<std::string> ids;
      for (const auto& d : parts[p]->documents) ids.push_back(d.id());
      a.parts.emplace_back(std::string(kSplitNames[p]), std::move(ids));
    }
    return a;
  }
};

inline void check_fractions(const SplitSpec& spec) {
  if (spec.train + spec.validation + spec.test != Rational{1, 1}) {
    throw UsageError("split fractions must sum to 1");
  }
}

// Sizes for n documents: floor(fraction * n) each, then the remainder is
// handed out one at a time in train, validation, test order, skipping
// splits whose fraction is zero.
inline std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
  check_fractions(spec);
  const Rational f[] = {spec.train, spec.validation, spec.test};
  std::array<std::size_t, 3> sizes{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    sizes[i] = static_cast<std::size_t>(f[i].num * static_cast<std::int64_t>(n) / f[i].den);
    assigned += sizes[i];
  }
  std::size_t remainder = n - assigned;
  for (std::size_t i = 0; remainder > 0; i = (i + 1) % 3) {
    if (f[i].num == 0) continue;
    ++sizes[i];
    --remainder;
  }
  return sizes;
}

namespace detail {

// Uniform integer in [0, bound) by rejection; stable across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace detail

// Seeded, stratified (by category unless disabled) three-way split. Within
// each stratum documents are ordered by id, shuffled, and cut according to
// split_sizes. Outputs are ordered by document id.
inline SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  check_fractions(spec);
  if (corpus.empty()) throw DataError("cannot split an empty corpus");

  // Stratum key: category index, with uncategorized documents last.
  std::map<int, std::vector<const AnnotatedDocument*>> strata;
  for (const auto& doc : corpus.documents) {
    int key = 0;
    if (spec.stratify_by_category) {
      key = doc.document.category ? static_cast<int>(*doc.document.category) : 255;
    }
    strata[key].push_back(&doc);
  }

  SplitResult out;
  Corpus* parts[] = {&out.train, &out.validation, &out.test};
  for (auto& [key, docs] : strata) {
    std::sort(docs.begin(), docs.end(),
              [](const auto* a, const auto* b) { return a->id() < b->id(); });
    detail::seeded_shuffle(docs, spec.seed, static_cast<std::uint64_t>(key));
    const auto sizes = split_sizes(docs.size(), spec);
    std::size_t next = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t k = 0; k < sizes[p]; ++k) parts[p]->documents.push_back(*docs[next++]);
    }
  }
  for (Corpus* c : parts) sort_by_id(*c);
  return out;
}

}  // namespace onconer
