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

// Piecewise correspondence between an original text and an edited ("clean")
// text, both measured in code points.
//
// A map is a sequence of segments tiling both texts in order. Projection of
// a span [s, e) uses two monotone boundary functions:
//
//   start boundary s -> clean start of the segment with orig_start <= s < orig_end
//                       (offset into it for copy segments)
//   end boundary e   -> clean end of the segment with orig_start < e <= orig_end
//                       (offset into it for copy segments)
//
// A boundary inside a replaced region expands to the whole replacement. A
// boundary inside deleted text moves past it: a start to the next surviving
// text, an end to the previous one. Inserted text is therefore included
// only when surviving text of the span lies on both sides of it. A span
// whose image is empty is `dropped`. The same rules apply in reverse with
// the roles of the two texts swapped.
//
// A composite map remembers the maps it was built from and projects
// through each of them in turn.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onconer/error.hpp"

namespace onconer {

enum class SegmentKind : std::uint8_t {
  copy,     // identical text, equal lengths
  replace,  // both sides non-empty
  remove,   // original text deleted (clean side empty)
  insert,   // clean text inserted (original side empty)
};

constexpr std::string_view segment_kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::copy: return "copy";
    case SegmentKind::replace: return "replace";
    case SegmentKind::remove: return "delete";
    case SegmentKind::insert: return "insert";
  }
  return "?";
}

struct Segment {
  std::size_t clean_start = 0;
  std::size_t clean_end = 0;
  std::size_t orig_start = 0;
  std::size_t orig_end = 0;
  SegmentKind kind = SegmentKind::copy;

  std::size_t orig_length() const { return orig_end - orig_start; }
  std::size_t clean_length() const { return clean_end - clean_start; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Projection {
  std::size_t start = 0;
  std::size_t end = 0;
  bool dropped = false;

  friend bool operator==(const Projection&, const Projection&) = default;
};

class OffsetMap;
inline OffsetMap compose(const OffsetMap& first, const OffsetMap& second);

class OffsetMap {
 public:
  OffsetMap() = default;

  static OffsetMap identity(std::size_t length) {
    OffsetMap m;
    if (length > 0) m.segments_.push_back({0, length, 0, length, SegmentKind::copy});
    m.orig_length_ = m.clean_length_ = length;
    m.index();
    return m;
  }

  // Validates tiling and kind/length consistency.
  static OffsetMap from_segments(std::vector<Segment> segments) {
    OffsetMap m;
    std::size_t orig = 0, clean = 0;
    for (const Segment& s : segments) {
      if (s.orig_start != orig || s.clean_start != clean || s.orig_end < s.orig_start ||
          s.clean_end < s.clean_start) {
        throw DataError("offset map segments do not tile both texts");
      }
      const bool ok = [&] {
        switch (s.kind) {
          case SegmentKind::copy: return s.orig_length() == s.clean_length() && s.orig_length() > 0;
          case SegmentKind::replace: return s.orig_length() > 0 && s.clean_length() > 0;
          case SegmentKind::remove: return s.orig_length() > 0 && s.clean_length() == 0;
          case SegmentKind::insert: return s.orig_length() == 0 && s.clean_length() > 0;
        }
        return false;
      }();
      if (!ok) throw DataError("offset map segment lengths do not match its kind");
      orig = s.orig_end;
      clean = s.clean_end;
    }
    m.segments_ = std::move(segments);
    m.orig_length_ = orig;
    m.clean_length_ = clean;
    m.index();
    return m;
  }

  std::size_t orig_length() const { return orig_length_; }
  std::size_t clean_length() const { return clean_length_; }
  const std::vector<Segment>& segments() const { return segments_; }

  bool is_identity() const {
    return orig_length_ == clean_length_ &&
           std::all_of(segments_.begin(), segments_.end(),
                       [](const Segment& s) { return s.kind == SegmentKind::copy; });
  }

  // Boundary functions, original -> clean.
  std::size_t start_to_clean(std::size_t b) const {
    if (stages_.empty()) return start_boundary(b, Side::orig);
    for (const auto& m : stages_) b = m.start_to_clean(b);
    return b;
  }
  std::size_t end_to_clean(std::size_t b) const {
    if (stages_.empty()) return end_boundary(b, Side::orig);
    for (const auto& m : stages_) b = m.end_to_clean(b);
    return b;
  }
  // Boundary functions, clean -> original.
  std::size_t start_to_orig(std::size_t b) const {
    if (stages_.empty()) return start_boundary(b, Side::clean);
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) b = it->start_to_orig(b);
    return b;
  }
  std::size_t end_to_orig(std::size_t b) const {
    if (stages_.empty()) return end_boundary(b, Side::clean);
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) b = it->end_to_orig(b);
    return b;
  }

  // A span dropped by any stage stays dropped.
  Projection project(std::size_t start, std::size_t end) const {
    if (start > end || end > orig_length_) throw DataError(bounds_message(start, end, orig_length_));
    if (stages_.empty()) return make_projection(start_to_clean(start), end_to_clean(end));
    Projection p{start, end, false};
    for (const auto& m : stages_) {
      p = m.project(p.start, p.end);
      if (p.dropped) break;
    }
    return p;
  }

  Projection project_back(std::size_t start, std::size_t end) const {
    if (start > end || end > clean_length_) throw DataError(bounds_message(start, end, clean_length_));
    if (stages_.empty()) return make_projection(start_to_orig(start), end_to_orig(end));
    Projection p{start, end, false};
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
      p = it->project_back(p.start, p.end);
      if (p.dropped) break;
    }
    return p;
  }

  // Maps this one was composed from, in application order; empty for a
  // plain map.
  const std::vector<OffsetMap>& stages() const { return stages_; }

  OffsetMap inverse() const {
    std::vector<Segment> out;
    out.reserve(segments_.size());
    for (const Segment& s : segments_) {
      SegmentKind k = s.kind;
      if (k == SegmentKind::remove) k = SegmentKind::insert;
      else if (k == SegmentKind::insert) k = SegmentKind::remove;
      out.push_back({s.orig_start, s.orig_end, s.clean_start, s.clean_end, k});
    }
    OffsetMap m = from_segments(std::move(out));
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) m.stages_.push_back(it->inverse());
    return m;
  }

  // Segment covering original code point `pos` (never an insert).
  const Segment& segment_at_orig(std::size_t pos) const {
    return segments_[find(pos, Side::orig)];
  }
  const Segment& segment_at_clean(std::size_t pos) const {
    return segments_[find(pos, Side::clean)];
  }

  friend bool operator==(const OffsetMap& a, const OffsetMap& b) {
    return a.segments_ == b.segments_ && a.orig_length_ == b.orig_length_ &&
           a.clean_length_ == b.clean_length_ && a.stages_ == b.stages_;
  }

  friend OffsetMap compose(const OffsetMap& first, const OffsetMap& second);

 private:
  enum class Side { orig, clean };

  static std::string bounds_message(std::size_t s, std::size_t e, std::size_t n) {
    return "span [" + std::to_string(s) + "," + std::to_string(e) +
           ") out of bounds for text of length " + std::to_string(n);
  }

  static Projection make_projection(std::size_t lo, std::size_t hi) {
    if (lo >= hi) return {std::min(lo, hi), std::min(lo, hi), true};
    return {lo, hi, false};
  }

  static std::size_t from_start(const Segment& s, Side side) {
    return side == Side::orig ? s.orig_start : s.clean_start;
  }
  static std::size_t from_end(const Segment& s, Side side) {
    return side == Side::orig ? s.orig_end : s.clean_end;
  }
  static std::size_t to_start(const Segment& s, Side side) {
    return side == Side::orig ? s.clean_start : s.orig_start;
  }
  static std::size_t to_end(const Segment& s, Side side) {
    return side == Side::orig ? s.clean_end : s.orig_end;
  }

  void index() {
    by_orig_.clear();
    by_clean_.clear();
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      if (segments_[i].orig_length() > 0) by_orig_.push_back(i);
      if (segments_[i].clean_length() > 0) by_clean_.push_back(i);
    }
  }

  // Index of the segment whose `side` range contains `pos`.
  std::size_t find(std::size_t pos, Side side) const {
    const auto& idx = side == Side::orig ? by_orig_ : by_clean_;
    auto it = std::upper_bound(idx.begin(), idx.end(), pos, [&](std::size_t p, std::size_t i) {
      return p < from_start(segments_[i], side);
    });
    if (it == idx.begin()) throw std::out_of_range("offset map lookup out of range");
    const std::size_t i = *std::prev(it);
    if (pos >= from_end(segments_[i], side)) throw std::out_of_range("offset map lookup out of range");
    return i;
  }

  std::size_t start_boundary(std::size_t b, Side side) const {
    const std::size_t n = side == Side::orig ? orig_length_ : clean_length_;
    if (b >= n) return side == Side::orig ? clean_length_ : orig_length_;
    const Segment& s = segments_[find(b, side)];
    if (s.kind == SegmentKind::copy) return to_start(s, side) + (b - from_start(s, side));
    // A start inside vanished text moves to the text that follows it.
    if (to_start(s, side) == to_end(s, side)) return start_boundary(from_end(s, side), side);
    return to_start(s, side);
  }

  std::size_t end_boundary(std::size_t b, Side side) const {
    if (b == 0) return 0;
    const Segment& s = segments_[find(b - 1, side)];
    if (s.kind == SegmentKind::copy) return to_start(s, side) + (b - from_start(s, side));
    // An end inside vanished text moves to the text that precedes it.
    if (to_start(s, side) == to_end(s, side)) return end_boundary(from_start(s, side), side);
    return to_end(s, side);
  }

  std::vector<Segment> segments_;
  std::size_t orig_length_ = 0;
  std::size_t clean_length_ = 0;
  std::vector<std::size_t> by_orig_;   // segments with non-empty original side
  std::vector<std::size_t> by_clean_;  // segments with non-empty clean side
  std::vector<OffsetMap> stages_;       // composite only
};

// Appends segments left to right, merging adjacent copy, delete and insert
// runs. Replacements are never merged: that would widen projections.
class OffsetMapBuilder {
 public:
  void copy(std::size_t n) { push(SegmentKind::copy, n, n); }
  void remove(std::size_t n) { push(SegmentKind::remove, n, 0); }
  void insert(std::size_t n) { push(SegmentKind::insert, 0, n); }

  // Picks the kind from the lengths.
  void replace(std::size_t orig_n, std::size_t clean_n) {
    if (orig_n == 0) insert(clean_n);
    else if (clean_n == 0) remove(orig_n);
    else push(SegmentKind::replace, orig_n, clean_n);
  }

  std::size_t orig_position() const { return orig_; }
  std::size_t clean_position() const { return clean_; }

  OffsetMap finish() && { return OffsetMap::from_segments(std::move(segments_)); }

 private:
  void push(SegmentKind kind, std::size_t orig_n, std::size_t clean_n) {
    if (orig_n == 0 && clean_n == 0) return;
    if (!segments_.empty() && kind != SegmentKind::replace && segments_.back().kind == kind) {
      segments_.back().orig_end += orig_n;
      segments_.back().clean_end += clean_n;
    } else {
      segments_.push_back({clean_, clean_ + clean_n, orig_, orig_ + orig_n, kind});
    }
    orig_ += orig_n;
    clean_ += clean_n;
  }

  std::vector<Segment> segments_;
  std::size_t orig_ = 0;
  std::size_t clean_ = 0;
};

// Map from the original side of `first` to the clean side of `second`.
// Projection through the result equals projection through `first` then
// `second`. The segments are a flattened alignment: every original code
// point is sent through both maps and code points whose images overlap are
// grouped into one replacement. They describe the composite exactly only
// when the edits of the two maps do not interact.
inline OffsetMap compose(const OffsetMap& first, const OffsetMap& second) {
  if (first.clean_length() != second.orig_length()) {
    throw DataError("cannot compose offset maps: middle text lengths differ (" +
                    std::to_string(first.clean_length()) + " vs " +
                    std::to_string(second.orig_length()) + ")");
  }
  OffsetMapBuilder b;
  const std::size_t n = first.orig_length();
  std::size_t cursor = 0;  // next clean position not yet covered

  struct Group {
    bool open = false;
    std::size_t orig_begin = 0, orig_end = 0, clean_begin = 0, clean_end = 0;
    bool copy_through = false;
  } g;

  auto close = [&] {
    if (!g.open) return;
    const std::size_t on = g.orig_end - g.orig_begin, cn = g.clean_end - g.clean_begin;
    if (g.copy_through && on == 1 && cn == 1) b.copy(1);
    else b.replace(on, cn);
    cursor = g.clean_end;
    g.open = false;
  };
  auto fill_to = [&](std::size_t pos) {
    if (pos > cursor) b.insert(pos - cursor);
    cursor = std::max(cursor, pos);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = second.start_to_clean(first.start_to_clean(i));
    const std::size_t hi = second.end_to_clean(first.end_to_clean(i + 1));
    if (g.open && lo < g.clean_end) {
      g.orig_end = i + 1;
      g.clean_end = std::max(g.clean_end, hi);
      g.copy_through = false;
      continue;
    }
    close();
    // Deletions go before an insertion at the same point, so a span ending
    // on deleted text does not pick up text inserted after it.
    if (hi <= lo) {
      b.remove(1);
      continue;
    }
    fill_to(lo);
    bool copy_through = false;
    const Segment& sa = first.segment_at_orig(i);
    if (sa.kind == SegmentKind::copy) {
      const std::size_t mid = sa.clean_start + (i - sa.orig_start);
      copy_through = second.segment_at_orig(mid).kind == SegmentKind::copy;
    }
    g = {true, i, i + 1, lo, hi, copy_through};
  }
  close();
  fill_to(second.clean_length());
  std::vector<OffsetMap> stages;
  for (const OffsetMap* m : {&first, &second}) {
    if (!m->stages_.empty()) stages.insert(stages.end(), m->stages_.begin(), m->stages_.end());
    else if (!m->is_identity()) stages.push_back(*m);
  }
  if (stages.size() == 1) return stages.front();
  OffsetMap out = std::move(b).finish();
  if (stages.size() > 1) out.stages_ = std::move(stages);
  return out;
}

}  // namespace onconer
