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

// Model output interchange and word/entity assembly.
//
// One JSON record per document:
//
//   {"doc_id": "d1", "coords": "raw", "tag_order": ["O", "B-ANTPERSON", ...],
//    "tokens": [{"start": 0, "end": 2, "word_id": 0, "probs": [17 reals]}, ...]}
//
// `tokens` are model subtokens with character offsets into the text the
// model saw (the original text for coords "raw", the preprocessed text for
// "clean"). Subtokens sharing a word_id form one word; words are expected to
// line up with onconer::tokenize on that text.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "onconer/corpus.hpp"
#include "onconer/error.hpp"
#include "onconer/offset_map.hpp"
#include "onconer/tagcodec.hpp"

namespace onconer {

using TagProbabilities = std::array<double, Tag::kCount>;

enum class Coords : std::uint8_t { raw, clean };

constexpr std::string_view coords_name(Coords c) { return c == Coords::raw ? "raw" : "clean"; }

struct TokenPrediction {
  std::size_t start = 0;
  std::size_t end = 0;
  std::int64_t word_id = 0;
  TagProbabilities probs{};

  friend bool operator==(const TokenPrediction&, const TokenPrediction&) = default;
};

struct PredictionSet {
  std::string document_id;
  Coords coords = Coords::raw;
  std::vector<TokenPrediction> tokens;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

inline constexpr double kProbabilitySumTolerance = 1e-3;

struct PredictionParse {
  std::vector<PredictionSet> sets;
  std::vector<std::string> warnings;  // renormalized vectors off by more than 1e-6
};

inline PredictionParse parse_predictions(std::istream& in) {
  static const std::vector<std::string> expected_order = canonical_tag_order();
  PredictionParse out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + "malformed record: " + e.what());
    }
    try {
      PredictionSet set;
      set.document_id = detail::coerce_id(j.at("doc_id"));
      const std::string coords = j.at("coords").get<std::string>();
      if (coords == "raw") set.coords = Coords::raw;
      else if (coords == "clean") set.coords = Coords::clean;
      else throw DataError("coords must be 'raw' or 'clean', got '" + coords + "'");
      if (j.at("tag_order").get<std::vector<std::string>>() != expected_order) {
        throw DataError("tag_order does not match the canonical tag ordering");
      }
      const std::string doc = "document " + set.document_id + ": ";
      for (const auto& t : j.at("tokens")) {
        TokenPrediction tp;
        for (const char* key : {"start", "end"}) {
          if (!t.at(key).is_number_unsigned()) {
            throw DataError(doc + "field '" + key + "' must be a nonnegative integer");
          }
        }
        tp.start = t.at("start").get<std::size_t>();
        tp.end = t.at("end").get<std::size_t>();
        tp.word_id = t.at("word_id").get<std::int64_t>();
        const auto probs = t.at("probs").get<std::vector<double>>();
        const std::size_t k = set.tokens.size();
        if (probs.size() != Tag::kCount) {
          throw DataError(doc + "token " + std::to_string(k) + ": probability vector has length " +
                          std::to_string(probs.size()) + ", expected " +
                          std::to_string(Tag::kCount));
        }
        double sum = 0.0;
        for (double p : probs) {
          if (!std::isfinite(p) || p < 0.0) {
            throw DataError(doc + "token " + std::to_string(k) + ": negative or non-finite probability");
          }
          sum += p;
        }
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
          throw DataError(doc + "token " + std::to_string(k) + ": probabilities sum to " +
                          std::to_string(sum) + ", outside 1 +/- 1e-3");
        }
        if (std::abs(sum - 1.0) > 1e-6) {
          out.warnings.push_back(where + doc + "token " + std::to_string(k) + " renormalized");
        }
        for (std::size_t i = 0; i < Tag::kCount; ++i) tp.probs[i] = probs[i] / sum;
        if (tp.end <= tp.start) throw DataError(doc + "token " + std::to_string(k) + ": empty span");
        if (!set.tokens.empty()) {
          const auto& prev = set.tokens.back();
          if (tp.start < prev.end) throw DataError(doc + "subtokens unsorted or overlapping");
          if (tp.word_id < prev.word_id) throw DataError(doc + "word_id decreases");
        }
        set.tokens.push_back(tp);
      }
      out.sets.push_back(std::move(set));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + "invalid record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return out;
}

inline PredictionParse parse_predictions(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_predictions(in);
}

inline void write_predictions(std::ostream& out, const std::vector<PredictionSet>& sets) {
  const auto order = canonical_tag_order();
  for (const auto& set : sets) {
    nlohmann::ordered_json j;
    j["doc_id"] = set.document_id;
    j["coords"] = coords_name(set.coords);
    j["tag_order"] = order;
    auto tokens = nlohmann::ordered_json::array();
    for (const auto& t : set.tokens) {
      nlohmann::ordered_json tj;
      tj["start"] = t.start;
      tj["end"] = t.end;
      tj["word_id"] = t.word_id;
      tj["probs"] = t.probs;
      tokens.push_back(std::move(tj));
    }
    j["tokens"] = std::move(tokens);
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Aggregation

struct WordPrediction {
  std::size_t start = 0;
  std::size_t end = 0;
  Tag tag;
  double score = 0.0;       // mean probability of `tag`
  TagProbabilities mean{};  // averaged subtoken vector
};

// Index of the largest entry; ties go to the lower index.
inline std::size_t argmax(const TagProbabilities& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

// "average" strategy: subtoken vectors of each word are averaged, then the
// argmax of the mean picks the word tag.
inline std::vector<WordPrediction> aggregate_average(const PredictionSet& set) {
  std::vector<WordPrediction> words;
  std::size_t i = 0;
  while (i < set.tokens.size()) {
    std::size_t j = i;
    std::array<long double, Tag::kCount> sum{};
    WordPrediction w;
    w.start = set.tokens[i].start;
    w.end = set.tokens[i].end;
    for (; j < set.tokens.size() && set.tokens[j].word_id == set.tokens[i].word_id; ++j) {
      for (std::size_t k = 0; k < Tag::kCount; ++k) sum[k] += set.tokens[j].probs[k];
      w.start = std::min(w.start, set.tokens[j].start);
      w.end = std::max(w.end, set.tokens[j].end);
    }
    const auto n = static_cast<long double>(j - i);
    for (std::size_t k = 0; k < Tag::kCount; ++k) w.mean[k] = static_cast<double>(sum[k] / n);
    const std::size_t best = argmax(w.mean);
    w.tag = Tag::from_index(best);
    w.score = w.mean[best];
    words.push_back(w);
    i = j;
  }
  return words;
}

struct PredictedEntity {
  std::size_t start = 0;
  std::size_t end = 0;
  Label label = Label::EVOL;
  double score = 0.0;

  Span span() const { return {start, end, label}; }
};

// Decodes word tags like tags_to_spans; an entity's score is the mean score
// of its words. Clean-coordinate words are projected back to the original.
inline std::vector<PredictedEntity> assemble_entities(const std::vector<WordPrediction>& words,
                                                      Coords coords,
                                                      const OffsetMap* to_clean = nullptr) {
  if (coords == Coords::clean && to_clean == nullptr) {
    throw DataError("clean-coordinate predictions need the preprocessing offset map");
  }
  std::vector<Token> tokens;
  std::vector<Tag> tags;
  for (const auto& w : words) {
    tokens.push_back({{}, w.start, w.end});
    tags.push_back(w.tag);
  }
  std::vector<PredictedEntity> out;
  std::size_t w = 0;
  for (const Span& s : tags_to_spans(tokens, tags)) {
    while (words[w].start < s.start) ++w;
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t k = w; k < words.size() && words[k].end <= s.end; ++k, ++count) {
      total += words[k].score;
    }
    w += count;
    PredictedEntity e{s.start, s.end, s.label, total / static_cast<double>(count)};
    if (coords == Coords::clean) {
      const Projection p = to_clean->project_back(s.start, s.end);
      if (p.dropped) continue;
      e.start = p.start;
      e.end = p.end;
    }
    if (!out.empty() && out.back().end > e.start) continue;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Word-level accuracy and loss

inline constexpr double kLossClamp = 1e-12;

struct WordScores {
  std::size_t correct = 0;
  std::size_t total = 0;
  long double loss_sum = 0.0L;

  WordScores& operator+=(const WordScores& o) {
    correct += o.correct;
    total += o.total;
    loss_sum += o.loss_sum;
    return *this;
  }
};

inline WordScores score_words(const std::vector<WordPrediction>& words,
                              const TaggedSequence& gold) {
  if (words.size() != gold.tags.size()) {
    throw DataError("document " + gold.document_id + ": " + std::to_string(words.size()) +
                    " predicted words vs " + std::to_string(gold.tags.size()) + " gold tokens");
  }
  WordScores s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::size_t g = gold.tags[i].index();
    s.total += 1;
    if (words[i].tag.index() == g) s.correct += 1;
    s.loss_sum += -std::log(std::max(static_cast<long double>(words[i].mean[g]),
                                     static_cast<long double>(kLossClamp)));
  }
  return s;
}

// Aligns prediction sets to gold sequences by document id.
inline WordScores score_words(const std::vector<PredictionSet>& sets,
                              const std::vector<TaggedSequence>& gold) {
  std::map<std::string, const TaggedSequence*> by_id;
  for (const auto& g : gold) by_id[g.document_id] = &g;
  WordScores total;
  for (const auto& set : sets) {
    auto it = by_id.find(set.document_id);
    if (it == by_id.end()) throw DataError("no gold sequence for document " + set.document_id);
    total += score_words(aggregate_average(set), *it->second);
  }
  return total;
}

inline double token_accuracy(const WordScores& s) {
  if (s.total == 0) throw DataError("no tokens");
  return static_cast<double>(s.correct) / static_cast<double>(s.total);
}

inline double cross_entropy_loss(const WordScores& s) {
  if (s.total == 0) throw DataError("no tokens");
  return static_cast<double>(s.loss_sum / static_cast<long double>(s.total));
}

inline double token_accuracy(const std::vector<PredictionSet>& sets,
                             const std::vector<TaggedSequence>& gold) {
  return token_accuracy(score_words(sets, gold));
}

inline double cross_entropy_loss(const std::vector<PredictionSet>& sets,
                                 const std::vector<TaggedSequence>& gold) {
  return cross_entropy_loss(score_words(sets, gold));
}

}  // namespace onconer
