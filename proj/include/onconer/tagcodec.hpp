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

// Tokenization, span <-> IOB2 conversion and the two-column CoNLL format.

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "onconer/corpus.hpp"
#include "onconer/error.hpp"
#include "onconer/label.hpp"
#include "onconer/unicode.hpp"

namespace onconer {

struct Token {
  std::string text;  // UTF-8
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// One IOB2 tag. The canonical index order is O, then for each label in
// alphabetical order B- before I-: O, B-ANTPERSON, I-ANTPERSON, B-EVOL, ...
class Tag {
 public:
  enum class Prefix : std::uint8_t { O, B, I };

  constexpr Tag() = default;
  static constexpr Tag outside() { return {}; }
  static constexpr Tag begin(Label l) { return Tag(Prefix::B, l); }
  static constexpr Tag inside(Label l) { return Tag(Prefix::I, l); }

  static constexpr Tag from_index(std::size_t index) {
    if (index == 0 || index >= kCount) return {};
    const Label l = kAlphabeticalOrder[(index - 1) / 2];
    return (index - 1) % 2 == 0 ? begin(l) : inside(l);
  }

  static std::optional<Tag> parse(std::string_view s) {
    if (s == "O") return outside();
    if (s.size() < 3 || s[1] != '-' || (s[0] != 'B' && s[0] != 'I')) return std::nullopt;
    auto l = parse_label(s.substr(2));
    if (!l) return std::nullopt;
    return s[0] == 'B' ? begin(*l) : inside(*l);
  }

  static constexpr std::size_t kCount = 1 + 2 * kLabelCount;

  constexpr Prefix prefix() const { return prefix_; }
  constexpr bool is_outside() const { return prefix_ == Prefix::O; }
  constexpr Label label() const { return label_; }

  constexpr std::size_t index() const {
    if (prefix_ == Prefix::O) return 0;
    std::size_t pos = 0;
    while (kAlphabeticalOrder[pos] != label_) ++pos;
    return 1 + 2 * pos + (prefix_ == Prefix::I ? 1 : 0);
  }

  std::string name() const {
    if (prefix_ == Prefix::O) return "O";
    return std::string(prefix_ == Prefix::B ? "B-" : "I-") + std::string(label_name(label_));
  }

  friend constexpr bool operator==(const Tag& a, const Tag& b) {
    return a.prefix_ == b.prefix_ && (a.prefix_ == Prefix::O || a.label_ == b.label_);
  }

 private:
  constexpr Tag(Prefix p, Label l) : prefix_(p), label_(l) {}
  Prefix prefix_ = Prefix::O;
  Label label_ = Label::EVOL;
};

inline std::vector<std::string> canonical_tag_order() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < Tag::kCount; ++i) out.push_back(Tag::from_index(i).name());
  return out;
}

struct TaggedSequence {
  std::string document_id;
  std::vector<Token> tokens;
  std::vector<Tag> tags;  // one per token

  friend bool operator==(const TaggedSequence&, const TaggedSequence&) = default;
};

// Splits on whitespace. Inside a whitespace-delimited chunk, runs of letters,
// digits and combining marks form words; '-', '/' and '+' stay inside a word
// when flanked by word characters on both sides; every other character is a
// token of its own.
inline std::vector<Token> tokenize(std::u32string_view text) {
  std::vector<Token> tokens;
  auto joiner = [](char32_t c) { return c == U'-' || c == U'/' || c == U'+'; };
  std::size_t i = 0;
  while (i < text.size()) {
    if (unicode::is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (unicode::is_word_char(text[i])) {
      while (j < text.size()) {
        if (unicode::is_word_char(text[j])) {
          ++j;
        } else if (joiner(text[j]) && j + 1 < text.size() && unicode::is_word_char(text[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
    }
    tokens.push_back({unicode::encode_utf8(text.substr(i, j - i)), i, j});
    i = j;
  }
  return tokens;
}

inline std::vector<Token> tokenize_utf8(std::string_view utf8) {
  return tokenize(unicode::decode_utf8(utf8));
}

struct EncodedSequence {
  TaggedSequence sequence;
  std::size_t partial_tokens = 0;  // tokens only partly covered by their span
  std::size_t lost_spans = 0;      // spans whose every token was already taken
};

// A token belongs to a span when they share at least one character. Partly
// covered tokens are included (the entity grows to token boundaries) and
// counted in `partial_tokens`. A token touched by two spans stays with the
// first one.
inline EncodedSequence spans_to_tags(std::vector<Token> tokens, std::vector<Span> spans,
                                     std::string document_id = {}) {
  sort_spans(spans);
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i - 1].overlaps(spans[i])) {
      throw DataError("document " + document_id + ": overlapping spans " +
                      to_string(spans[i - 1]) + " and " + to_string(spans[i]));
    }
  }
  EncodedSequence out;
  out.sequence.document_id = std::move(document_id);
  out.sequence.tags.assign(tokens.size(), Tag::outside());
  std::vector<bool> taken(tokens.size(), false);
  for (const Span& s : spans) {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), s.start,
                               [](const Token& t, std::size_t pos) { return t.end <= pos; });
    bool first = true;
    for (; it != tokens.end() && it->start < s.end; ++it) {
      const auto k = static_cast<std::size_t>(it - tokens.begin());
      if (taken[k]) continue;
      taken[k] = true;
      out.sequence.tags[k] = first ? Tag::begin(s.label) : Tag::inside(s.label);
      first = false;
      if (it->start < s.start || it->end > s.end) ++out.partial_tokens;
    }
    if (first) ++out.lost_spans;
  }
  out.sequence.tokens = std::move(tokens);
  return out;
}

// Maximal runs B-X I-X* become spans; an I-X that does not continue a run
// of the same label opens a new one. Total on any tag sequence.
inline std::vector<Span> tags_to_spans(const std::vector<Token>& tokens,
                                       const std::vector<Tag>& tags) {
  if (tokens.size() != tags.size()) {
    throw DataError("tag count " + std::to_string(tags.size()) + " does not match token count " +
                    std::to_string(tokens.size()));
  }
  std::vector<Span> spans;
  bool open = false;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag t = tags[i];
    if (t.is_outside()) {
      open = false;
      continue;
    }
    if (t.prefix() == Tag::Prefix::I && open && spans.back().label == t.label()) {
      spans.back().end = tokens[i].end;
      continue;
    }
    spans.push_back({tokens[i].start, tokens[i].end, t.label()});
    open = true;
  }
  return spans;
}

inline std::vector<Span> tags_to_spans(const TaggedSequence& seq) {
  return tags_to_spans(seq.tokens, seq.tags);
}

inline EncodedSequence encode_document(const AnnotatedDocument& doc) {
  return spans_to_tags(tokenize_utf8(doc.document.text), doc.spans, doc.id());
}

// ---------------------------------------------------------------------------
// CoNLL: "token<TAB>tag" per line, a blank line between documents.

inline void export_conll(std::ostream& out, const std::vector<TaggedSequence>& docs) {
  bool first = true;
  for (const auto& doc : docs) {
    if (doc.tokens.empty()) continue;
    if (!first) out << '\n';
    first = false;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      out << doc.tokens[i].text << '\t' << doc.tags[i].name() << '\n';
    }
  }
}

inline std::string export_conll(const std::vector<TaggedSequence>& docs) {
  std::ostringstream out;
  export_conll(out, docs);
  return out.str();
}

// Offsets are not stored in the format; imported tokens get the offsets
// they would have in their texts joined by single spaces. Documents are
// numbered "1", "2", ... in file order.
inline std::vector<TaggedSequence> import_conll(std::istream& in) {
  std::vector<TaggedSequence> docs;
  TaggedSequence current;
  std::size_t cursor = 0;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    current.document_id = std::to_string(docs.size() + 1);
    docs.push_back(std::move(current));
    current = {};
    cursor = 0;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos || tab == 0) {
      throw DataError("line " + std::to_string(line_no) + ": expected 2 tab-separated columns");
    }
    auto tag = Tag::parse(std::string_view(line).substr(tab + 1));
    if (!tag) {
      throw DataError("line " + std::to_string(line_no) + ": unknown tag '" +
                      line.substr(tab + 1) + "'");
    }
    std::string text = line.substr(0, tab);
    const std::size_t length = text_length(text);
    if (!current.tokens.empty()) ++cursor;
    current.tokens.push_back({std::move(text), cursor, cursor + length});
    current.tags.push_back(*tag);
    cursor += length;
  }
  flush();
  return docs;
}

inline std::vector<TaggedSequence> import_conll(std::string_view text) {
  std::istringstream in{std::string(text)};
  return import_conll(in);
}

// Rebuilds a document from an imported sequence (text = tokens joined by spaces).
inline AnnotatedDocument to_annotated_document(const TaggedSequence& seq) {
  AnnotatedDocument doc;
  doc.document.id = seq.document_id;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (i > 0) doc.document.text += ' ';
    doc.document.text += seq.tokens[i].text;
  }
  doc.spans = tags_to_spans(seq);
  return doc;
}

}  // namespace onconer
