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

// Random inputs for property tests. Everything is driven by an explicit
// std::mt19937_64 so failures reproduce from the printed seed.

#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "onconer/onconer.hpp"

namespace onconer::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[uniform(rng, 0, v.size() - 1)];
}

inline Label random_label(Rng& rng) { return kTableOrder[uniform(rng, 0, kLabelCount - 1)]; }

// Clinical-looking noise: Spanish words, accents (precomposed and
// combining), TNM strings, bullets, hyphenated line breaks, odd spacing.
inline std::u32string random_text(Rng& rng, std::size_t max_pieces = 40) {
  static const std::vector<std::u32string> pieces = {
      U"mama", U"Mama", U"derecha", U"carcinoma", U"ductal", U"infiltrante", U"biopsia",
      U"quimioterapia", U"evolución", U"metástasis", U"TAC", U"pT1N0M0", U"estadiopT1",
      U"ypT2", U"tumoración", U"e\u0301", U"cancer", U"cáncer", U"Ñ", U"ß", U"her2+",
      U"c-erbB2", U"1/3", U"12", U"mg", U".", U",", U";", U"(", U")", U"-", U"•", U"–",
      U"carci-\nnoma", U"a-\nB", U"\u0301", U"x"};
  static const std::vector<std::u32string> gaps = {U" ", U" ", U" ", U"  ", U"\t", U"\n",
                                                   U" \n ", U"\n\n", U"\n \n\n", U"", U"\r\n"};
  std::u32string out;
  const std::size_t n = uniform(rng, 0, max_pieces);
  for (std::size_t i = 0; i < n; ++i) {
    out += pick(rng, pieces);
    out += pick(rng, gaps);
  }
  return out;
}

// Random map with `orig` code points on the original side.
inline OffsetMap random_map(Rng& rng, std::size_t orig) {
  OffsetMapBuilder b;
  std::size_t left = orig;
  while (left > 0 || coin(rng, 0.1)) {
    const std::size_t n = left == 0 ? 0 : uniform(rng, 1, std::min<std::size_t>(left, 4));
    switch (uniform(rng, 0, 5)) {
      case 0:
      case 1:
      case 2:
        if (n > 0) b.copy(n);
        break;
      case 3:
        if (n > 0) b.replace(n, uniform(rng, 1, 3));
        break;
      case 4:
        if (n > 0) b.remove(n);
        break;
      default:
        b.insert(uniform(rng, 1, 3));
        continue;
    }
    left -= n;
    if (left == 0 && coin(rng, 0.8)) break;
  }
  return std::move(b).finish();
}

inline std::string random_id(Rng& rng) { return "doc-" + std::to_string(rng() % 1000000); }

// Documents with ASCII text and non-overlapping spans.
inline Corpus random_corpus(Rng& rng, std::size_t max_docs = 30) {
  Corpus c;
  const std::size_t n = uniform(rng, 0, max_docs);
  for (std::size_t i = 0; i < n; ++i) {
    AnnotatedDocument d;
    d.document.id = "d" + std::to_string(i) + "-" + std::to_string(rng() % 1000);
    d.document.category = static_cast<Category>(uniform(rng, 0, 2));
    const std::size_t len = uniform(rng, 1, 80);
    d.document.text.assign(len, 'a');
    std::size_t pos = 0;
    while (pos < len) {
      const std::size_t start = pos + uniform(rng, 0, 5);
      if (start >= len) break;
      const std::size_t end = std::min(len, start + uniform(rng, 1, 8));
      d.spans.push_back({start, end, random_label(rng)});
      pos = end;
    }
    c.documents.push_back(std::move(d));
  }
  return c;
}

// Non-overlapping sorted spans over [0, length).
inline std::vector<Span> random_spans(Rng& rng, std::size_t length, std::size_t max_count) {
  std::vector<Span> out;
  std::size_t pos = 0;
  const std::size_t count = uniform(rng, 0, max_count);
  while (out.size() < count && pos < length) {
    const std::size_t start = pos + uniform(rng, 0, 4);
    if (start >= length) break;
    const std::size_t end = std::min(length, start + uniform(rng, 1, 5));
    out.push_back({start, end, random_label(rng)});
    pos = end;
  }
  return out;
}

inline TagProbabilities random_probs(Rng& rng) {
  TagProbabilities p{};
  std::exponential_distribution<double> e(1.0);
  double sum = 0;
  for (auto& v : p) sum += (v = e(rng) * (coin(rng, 0.3) ? 5.0 : 1.0));
  for (auto& v : p) v /= sum;
  return p;
}

inline TagProbabilities one_hot(std::size_t index) {
  TagProbabilities p{};
  p[index] = 1.0;
  return p;
}

// Random token layout over a virtual text; spans are unions of consecutive tokens.
inline std::vector<Token> random_tokens(Rng& rng) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  const std::size_t n = uniform(rng, 0, 25);
  for (std::size_t i = 0; i < n; ++i) {
    pos += uniform(rng, i == 0 ? 0 : 1, 3);
    const std::size_t len = uniform(rng, 1, 6);
    tokens.push_back({"t", pos, pos + len});
    pos += len;
  }
  return tokens;
}

inline Dictionary random_dictionary(Rng& rng) {
  static const std::vector<std::string> words = {
      "mama", "derecha", "carcinoma", "ductal", "tac", "ca", "a", "ma", "pt1", "biopsia",
      "evolucion", "cancer", "her2", "c-erbb2", "1/3", "n", "-", "quimioterapia", "e"};
  Dictionary d;
  const std::size_t n = uniform(rng, 0, 12);
  for (std::size_t i = 0; i < n; ++i) {
    std::string term = pick(rng, words);
    while (coin(rng, 0.3)) term += " " + pick(rng, words);
    if (coin(rng, 0.2)) term[0] = static_cast<char>(std::toupper(term[0]));
    add_entry(d, term, random_label(rng), {});
  }
  return d;
}

inline PredictionSet random_prediction_set(Rng& rng) {
  PredictionSet s{"r", Coords::raw, {}};
  std::size_t pos = 0;
  const std::size_t words = uniform(rng, 0, 12);
  for (std::size_t w = 0; w < words; ++w) {
    for (std::size_t k = uniform(rng, 1, 4); k > 0; --k) {
      auto p = random_probs(rng);
      if (coin(rng, 0.1)) p = one_hot(uniform(rng, 0, 16));
      s.tokens.push_back({pos, pos + 1, static_cast<std::int64_t>(w * 3), p});
      ++pos;
    }
    ++pos;
  }
  return s;
}

}  // namespace onconer::testing
