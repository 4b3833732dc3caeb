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

// Deterministic text clean-up with exact offset provenance.
//
// Passes run in a fixed order regardless of how they were requested:
//
//   nfc              Unicode NFC composition
//   collapse_spaces  runs of spaces/tabs -> one space
//   dehyphenate      "-" + newline + lowercase letter: drop the hyphen and newline
//   join_lines       a single newline (with surrounding blanks) -> one space;
//                    two or more newlines -> one blank line ("\n\n")
//   bullets          "•" and "–" -> "-", followed by a space unless one is already there
//   tnm_spacing      split TNM staging glued to a preceding word (estadiopT1 -> estadio pT1)
//
// The pass sequence is repeated until the text stops changing, so the
// result is a fixed point and running preprocess on it yields the identity.

#include <array>
#include <bitset>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "onconer/error.hpp"
#include "onconer/offset_map.hpp"
#include "onconer/unicode.hpp"

namespace onconer {

enum class Pass : std::uint8_t {
  nfc,
  collapse_spaces,
  dehyphenate,
  join_lines,
  bullets,
  tnm_spacing,
};

inline constexpr std::array<Pass, 6> kAllPasses = {
    Pass::nfc,        Pass::collapse_spaces, Pass::dehyphenate,
    Pass::join_lines, Pass::bullets,         Pass::tnm_spacing,
};

constexpr std::string_view pass_name(Pass p) {
  switch (p) {
    case Pass::nfc: return "nfc";
    case Pass::collapse_spaces: return "collapse_spaces";
    case Pass::dehyphenate: return "dehyphenate";
    case Pass::join_lines: return "join_lines";
    case Pass::bullets: return "bullets";
    case Pass::tnm_spacing: return "tnm_spacing";
  }
  return "?";
}

class PassSet {
 public:
  static PassSet all() {
    PassSet s;
    s.bits_.set();
    return s;
  }
  static PassSet none() { return {}; }

  // "all", "none", or a comma separated list of pass names.
  static PassSet parse(std::string_view spec) {
    if (spec == "all") return all();
    if (spec == "none" || spec.empty()) return none();
    PassSet s;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      const std::size_t comma = std::min(spec.find(',', pos), spec.size());
      const std::string_view name = spec.substr(pos, comma - pos);
      bool found = false;
      for (Pass p : kAllPasses) {
        if (pass_name(p) == name) {
          s.enable(p);
          found = true;
        }
      }
      if (!found) throw UsageError("unknown pass '" + std::string(name) + "'");
      pos = comma + 1;
    }
    return s;
  }

  PassSet& enable(Pass p) {
    bits_.set(static_cast<std::size_t>(p));
    return *this;
  }
  bool contains(Pass p) const { return bits_.test(static_cast<std::size_t>(p)); }
  bool empty() const { return bits_.none(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (Pass p : kAllPasses) {
      if (contains(p)) out.emplace_back(pass_name(p));
    }
    return out;
  }

  std::string to_string() const {
    if (bits_.all()) return "all";
    if (bits_.none()) return "none";
    std::string out;
    for (const auto& n : names()) out += (out.empty() ? "" : ",") + n;
    return out;
  }

 private:
  std::bitset<kAllPasses.size()> bits_;
};

struct PassOutput {
  std::u32string text;
  OffsetMap map;  // input -> text
};

// Streams an input text into an output text while recording the map.
class Rewriter {
 public:
  explicit Rewriter(std::u32string_view input) : in_(input) { out_.reserve(input.size()); }

  std::size_t position() const { return pos_; }
  bool done() const { return pos_ >= in_.size(); }
  char32_t peek(std::size_t ahead = 0) const {
    return pos_ + ahead < in_.size() ? in_[pos_ + ahead] : U'\0';
  }
  bool has(std::size_t ahead) const { return pos_ + ahead < in_.size(); }
  const std::u32string& output() const { return out_; }

  void copy(std::size_t n) {
    out_.append(in_.substr(pos_, n));
    map_.copy(n);
    pos_ += n;
  }
  void remove(std::size_t n) {
    map_.remove(n);
    pos_ += n;
  }
  void insert(std::u32string_view text) {
    out_.append(text);
    map_.insert(text.size());
  }
  // Replaces the next n characters by `target`, copying the longest common
  // prefix and suffix so that only the differing middle is a replacement.
  void rewrite(std::size_t n, std::u32string_view target) {
    const std::u32string_view source = in_.substr(pos_, n);
    std::size_t prefix = 0;
    while (prefix < source.size() && prefix < target.size() && source[prefix] == target[prefix]) {
      ++prefix;
    }
    std::size_t suffix = 0;
    while (suffix < source.size() - prefix && suffix < target.size() - prefix &&
           source[source.size() - 1 - suffix] == target[target.size() - 1 - suffix]) {
      ++suffix;
    }
    copy(prefix);
    const std::size_t mid_src = source.size() - prefix - suffix;
    const std::u32string_view mid_dst = target.substr(prefix, target.size() - prefix - suffix);
    out_.append(mid_dst);
    map_.replace(mid_src, mid_dst.size());
    pos_ += mid_src;
    copy(suffix);
  }

  PassOutput finish() && { return {std::move(out_), std::move(map_).finish()}; }

 private:
  std::u32string_view in_;
  std::u32string out_;
  OffsetMapBuilder map_;
  std::size_t pos_ = 0;
};

namespace passes {

inline PassOutput nfc(std::u32string_view text) {
  Rewriter rw(text);
  while (!rw.done()) {
    // Chunk = maximal run between NFC boundaries.
    std::size_t n = 1;
    while (rw.has(n) && !unicode::nfc_boundary_before(rw.peek(n))) ++n;
    const std::u32string_view chunk = text.substr(rw.position(), n);
    const bool ascii = n == 1 && chunk[0] < 0x80;
    if (ascii) {
      rw.copy(1);
      continue;
    }
    const std::u32string composed = unicode::to_nfc(chunk);
    if (composed == chunk) rw.copy(n);
    else rw.rewrite(n, composed);
  }
  return std::move(rw).finish();
}

inline PassOutput collapse_spaces(std::u32string_view text) {
  Rewriter rw(text);
  while (!rw.done()) {
    if (!unicode::is_horizontal_space(rw.peek())) {
      rw.copy(1);
      continue;
    }
    std::size_t n = 1;
    while (unicode::is_horizontal_space(rw.peek(n)) && rw.has(n)) ++n;
    rw.rewrite(1, U" ");
    rw.remove(n - 1);
  }
  return std::move(rw).finish();
}

inline PassOutput dehyphenate(std::u32string_view text) {
  Rewriter rw(text);
  while (!rw.done()) {
    if (rw.peek() == U'-') {
      std::size_t nl = 0;
      if (rw.peek(1) == U'\n') nl = 1;
      else if (rw.peek(1) == U'\r' && rw.peek(2) == U'\n') nl = 2;
      if (nl > 0 && rw.has(1 + nl) && unicode::is_lower(rw.peek(1 + nl))) {
        rw.remove(1 + nl);
        continue;
      }
    }
    rw.copy(1);
  }
  return std::move(rw).finish();
}

inline PassOutput join_lines(std::u32string_view text) {
  Rewriter rw(text);
  while (!rw.done()) {
    if (!unicode::is_space(rw.peek())) {
      rw.copy(1);
      continue;
    }
    std::size_t n = 0, newlines = 0;
    while (rw.has(n) && unicode::is_space(rw.peek(n))) {
      const char32_t c = rw.peek(n);
      // "\r\n" is one line break.
      if (unicode::is_newline(c) && !(c == U'\r' && rw.peek(n + 1) == U'\n')) ++newlines;
      ++n;
    }
    if (newlines == 0) rw.copy(n);
    else rw.rewrite(n, newlines == 1 ? std::u32string_view(U" ") : std::u32string_view(U"\n\n"));
  }
  return std::move(rw).finish();
}

inline bool is_bullet_glyph(char32_t c) { return c == U'•' || c == U'–'; }

inline PassOutput bullets(std::u32string_view text) {
  Rewriter rw(text);
  while (!rw.done()) {
    if (!is_bullet_glyph(rw.peek())) {
      rw.copy(1);
      continue;
    }
    const bool needs_space = rw.has(1) && !unicode::is_space(rw.peek(1));
    rw.rewrite(1, U"-");
    if (needs_space) rw.insert(U" ");
  }
  return std::move(rw).finish();
}

// Length of a TNM staging prefix starting at `at` ("pT1", "ypT2", "cTis",
// "rTx" ...), or 0.
inline std::size_t tnm_prefix_at(std::u32string_view t, std::size_t at) {
  std::size_t i = at;
  if (i + 1 < t.size() && t[i] == U'y' && (t[i + 1] == U'p' || t[i + 1] == U'c')) {
    i += 2;
  } else if (i < t.size() && (t[i] == U'p' || t[i] == U'c' || t[i] == U'r')) {
    i += 1;
  } else {
    return 0;
  }
  if (i >= t.size() || t[i] != U'T') return 0;
  ++i;
  if (i < t.size() && (unicode::is_digit(t[i]) || t[i] == U'x' || t[i] == U'X')) return i + 1 - at;
  if (i + 1 < t.size() && t[i] == U'i' && t[i + 1] == U's') return i + 2 - at;
  return 0;
}

inline PassOutput tnm_spacing(std::u32string_view text) {
  Rewriter rw(text);
  while (!rw.done()) {
    const std::size_t at = rw.position();
    if (at > 0 && unicode::is_letter(text[at - 1]) && tnm_prefix_at(text, at) > 0) {
      // "ypT1" must split before the y, not between y and p.
      const bool inside_yp = text[at - 1] == U'y' && tnm_prefix_at(text, at - 1) > 0;
      if (!inside_yp) rw.insert(U" ");
    }
    rw.copy(1);
  }
  return std::move(rw).finish();
}

inline PassOutput run(Pass p, std::u32string_view text) {
  switch (p) {
    case Pass::nfc: return nfc(text);
    case Pass::collapse_spaces: return collapse_spaces(text);
    case Pass::dehyphenate: return dehyphenate(text);
    case Pass::join_lines: return join_lines(text);
    case Pass::bullets: return bullets(text);
    case Pass::tnm_spacing: return tnm_spacing(text);
  }
  return {std::u32string(text), OffsetMap::identity(text.size())};
}

}  // namespace passes

struct PreprocessedDocument {
  std::string document_id;
  std::u32string clean_text;
  OffsetMap map;  // original -> clean
  std::vector<std::string> passes;

  std::string clean_utf8() const { return unicode::encode_utf8(clean_text); }
};

inline constexpr int kMaxPreprocessRounds = 8;

inline PreprocessedDocument preprocess(std::u32string_view text, const PassSet& enabled,
                                       std::string document_id = {}) {
  PreprocessedDocument doc{std::move(document_id), std::u32string(text),
                           OffsetMap::identity(text.size()), enabled.names()};
  for (int round = 0; round < kMaxPreprocessRounds; ++round) {
    bool changed = false;
    for (Pass p : kAllPasses) {
      if (!enabled.contains(p)) continue;
      PassOutput step = passes::run(p, doc.clean_text);
      if (step.map.is_identity()) continue;
      changed = true;
      doc.map = compose(doc.map, step.map);
      doc.clean_text = std::move(step.text);
    }
    if (!changed) break;
  }
  return doc;
}

inline PreprocessedDocument preprocess_utf8(std::string_view utf8, const PassSet& enabled,
                                            std::string document_id = {}) {
  return preprocess(unicode::decode_utf8(utf8), enabled, std::move(document_id));
}

}  // namespace onconer
