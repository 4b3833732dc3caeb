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

// Dictionary-driven baseline tagger.
//
// Dictionary rows are normalized (case folded, accents stripped, whitespace
// collapsed) and compiled into an Aho-Corasick automaton. Text is normalized
// the same way with an offset map, matched, filtered to word boundaries and
// resolved leftmost-longest; exact ties go to the higher priority label.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "onconer/corpus.hpp"
#include "onconer/error.hpp"
#include "onconer/label.hpp"
#include "onconer/offset_map.hpp"
#include "onconer/preprocess.hpp"
#include "onconer/unicode.hpp"

namespace onconer {

struct NormalizedText {
  std::u32string text;
  OffsetMap map;  // input -> normalized
};

namespace detail {

inline std::u32string fold_char(char32_t c) {
  if (c < 0x80) {
    if (c >= U'A' && c <= U'Z') return std::u32string(1, c + 32);
    return std::u32string(1, c);
  }
  std::u32string folded;
  for (char32_t d : unicode::to_nfd(std::u32string_view(&c, 1))) folded.push_back(unicode::fold_case(d));
  std::u32string out;
  for (char32_t d : unicode::to_nfd(folded)) {
    if (!unicode::is_mark(d)) out.push_back(d);
  }
  return out;
}

}  // namespace detail

// Case fold, strip combining marks and collapse whitespace runs to a single
// space, keeping the map back to the input.
inline NormalizedText normalize_with_map(std::u32string_view text) {
  Rewriter rw(text);
  while (!rw.done()) {
    if (unicode::is_space(rw.peek())) {
      std::size_t n = 1;
      // Characters that fold to nothing (lone marks) do not split the run.
      while (rw.has(n) &&
             (unicode::is_space(rw.peek(n)) || detail::fold_char(rw.peek(n)).empty())) {
        ++n;
      }
      rw.rewrite(n, U" ");
      continue;
    }
    rw.rewrite(1, detail::fold_char(rw.peek()));
  }
  PassOutput out = std::move(rw).finish();
  return {std::move(out.text), std::move(out.map)};
}

// Normalized dictionary key: as normalize_with_map, trimmed.
inline std::u32string normalize_term(std::u32string_view text) {
  std::u32string out = normalize_with_map(text).text;
  const auto first = out.find_first_not_of(U' ');
  if (first == std::u32string::npos) return {};
  const auto last = out.find_last_not_of(U' ');
  return out.substr(first, last - first + 1);
}

inline std::string normalize_term_utf8(std::string_view utf8) {
  return unicode::encode_utf8(normalize_term(unicode::decode_utf8(utf8)));
}

struct DictionaryEntry {
  std::string surface;
  Label label = Label::EVOL;
  std::vector<std::string> category_path;  // first element is the label name
  std::u32string normalized;
};

struct Dictionary {
  std::vector<DictionaryEntry> entries;
  std::string normalization_policy = "casefold+strip-accents+collapse-space";
};

struct DictionaryLoad {
  Dictionary dictionary;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"' && fields.back().empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
  return fields;
}

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const std::size_t slash = std::min(path.find('/', pos), path.size());
    if (slash > pos) out.emplace_back(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return out;
}

}  // namespace detail

// Adds one entry; returns false (and leaves the dictionary unchanged) when
// the normalized (surface, label) pair already exists.
inline bool add_entry(Dictionary& dict, std::string surface, Label label,
                      std::vector<std::string> category_path) {
  std::u32string key = normalize_term(unicode::decode_utf8(surface));
  if (key.empty()) throw DataError("dictionary term '" + surface + "' is empty after normalization");
  if (category_path.empty()) category_path.emplace_back(label_name(label));
  if (category_path.front() != label_name(label)) {
    throw DataError("dictionary term '" + surface + "': category path must start with " +
                    std::string(label_name(label)));
  }
  for (const auto& e : dict.entries) {
    if (e.label == label && e.normalized == key) return false;
  }
  dict.entries.push_back({std::move(surface), label, std::move(category_path), std::move(key)});
  return true;
}

// UTF-8 CSV with header `surface,label,category_path`; the path is
// '/'-separated (e.g. "TTO/farmacologico").
inline DictionaryLoad load_dictionary(std::istream& in) {
  DictionaryLoad out;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    auto fields = detail::split_csv_line(line, line_no);
    if (header) {
      if (fields != std::vector<std::string>{"surface", "label", "category_path"}) {
        throw DataError(where + "expected header 'surface,label,category_path'");
      }
      header = false;
      continue;
    }
    if (fields.size() != 3) throw DataError(where + "expected 3 columns");
    auto label = parse_label(fields[1]);
    if (!label) throw DataError(where + "unknown label '" + fields[1] + "'");
    try {
      if (!add_entry(out.dictionary, fields[0], *label, detail::split_path(fields[2]))) {
        out.warnings.push_back(where + "duplicate term '" + fields[0] + "' (" + fields[1] +
                               ") merged");
      }
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  if (header) throw DataError("dictionary is empty (missing header)");
  return out;
}

inline DictionaryLoad load_dictionary(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_dictionary(in);
}

// Aho-Corasick automaton over normalized dictionary surfaces.
class CompiledMatcher {
 public:
  struct Match {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t entry = 0;  // index into dictionary().entries

    friend bool operator==(const Match&, const Match&) = default;
  };

  explicit CompiledMatcher(Dictionary dict) : dict_(std::move(dict)) {
    nodes_.emplace_back();
    for (std::size_t e = 0; e < dict_.entries.size(); ++e) {
      std::size_t state = 0;
      for (char32_t c : dict_.entries[e].normalized) {
        auto it = nodes_[state].next.find(c);
        if (it == nodes_[state].next.end()) {
          nodes_.emplace_back();
          nodes_[state].next.emplace(c, nodes_.size() - 1);
          state = nodes_.size() - 1;
        } else {
          state = it->second;
        }
      }
      nodes_[state].entries.push_back(e);
      nodes_[state].depth = dict_.entries[e].normalized.size();
    }
    // Breadth-first failure links; `output` points at the nearest proper
    // suffix state that ends a pattern.
    std::queue<std::size_t> queue;
    for (const auto& [c, child] : nodes_[0].next) queue.push(child);
    while (!queue.empty()) {
      const std::size_t s = queue.front();
      queue.pop();
      for (const auto& [c, child] : nodes_[s].next) {
        std::size_t f = nodes_[s].fail;
        while (f != 0 && !nodes_[f].next.contains(c)) f = nodes_[f].fail;
        auto it = nodes_[f].next.find(c);
        nodes_[child].fail = (it != nodes_[f].next.end() && it->second != child) ? it->second : 0;
        const std::size_t fl = nodes_[child].fail;
        nodes_[child].output = nodes_[fl].entries.empty() ? nodes_[fl].output : fl;
        queue.push(child);
      }
    }
  }

  const Dictionary& dictionary() const { return dict_; }

  // Every occurrence of every entry, unfiltered, ordered by end then start.
  std::vector<Match> find_all(std::u32string_view text) const {
    std::vector<Match> out;
    std::size_t state = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char32_t c = text[i];
      for (;;) {
        auto it = nodes_[state].next.find(c);
        if (it != nodes_[state].next.end()) {
          state = it->second;
          break;
        }
        if (state == 0) break;
        state = nodes_[state].fail;
      }
      for (std::size_t s = nodes_[state].entries.empty() ? nodes_[state].output : state; s != 0;
           s = nodes_[s].output) {
        for (std::size_t e : nodes_[s].entries) out.push_back({i + 1 - nodes_[s].depth, i + 1, e});
      }
    }
    return out;
  }

 private:
  struct Node {
    std::map<char32_t, std::size_t> next;
    std::size_t fail = 0;
    std::size_t output = 0;  // 0 = none
    std::size_t depth = 0;
    std::vector<std::size_t> entries;
  };

  Dictionary dict_;
  std::vector<Node> nodes_;
};

// A match may not cut through a word: characters on either side of each
// edge must not both be word characters.
inline bool at_word_boundaries(std::u32string_view text, std::size_t start, std::size_t end) {
  const bool left = start == 0 || !unicode::is_word_char(text[start - 1]) ||
                    !unicode::is_word_char(text[start]);
  const bool right = end == text.size() || !unicode::is_word_char(text[end]) ||
                     !unicode::is_word_char(text[end - 1]);
  return left && right;
}

// Matches on the normalized form of `text`, returned in `text` coordinates.
// When `to_original` is given, `text` is taken to be the clean side of that
// map and spans are projected back to the original text.
inline std::vector<Span> tag_text(const CompiledMatcher& matcher, std::u32string_view text,
                                  const OffsetMap* to_original = nullptr) {
  const NormalizedText norm = normalize_with_map(text);
  std::vector<CompiledMatcher::Match> candidates;
  for (const auto& m : matcher.find_all(norm.text)) {
    if (at_word_boundaries(norm.text, m.start, m.end)) candidates.push_back(m);
  }
  const auto& entries = matcher.dictionary().entries;
  std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end > b.end;
    return label_priority(entries[a.entry].label) < label_priority(entries[b.entry].label);
  });

  std::vector<Span> spans;
  std::size_t frontier = 0;
  for (const auto& m : candidates) {
    if (m.start < frontier) continue;
    frontier = m.end;
    Projection p = norm.map.project_back(m.start, m.end);
    if (!p.dropped && to_original != nullptr) p = to_original->project_back(p.start, p.end);
    if (p.dropped) continue;
    if (!spans.empty() && spans.back().end > p.start) continue;
    spans.push_back({p.start, p.end, entries[m.entry].label});
  }
  return spans;
}

}  // namespace onconer
