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

#include <gtest/gtest.h>

#include "onconer/offset_map.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace onconer {
namespace {

using testing::Rng;

// "Mama  derecha" -> "Mama derecha"
OffsetMap mama_map() {
  OffsetMapBuilder b;
  b.copy(5);
  b.remove(1);
  b.copy(7);
  return std::move(b).finish();
}

TEST(OffsetMap, Projections) {
  const OffsetMap m = mama_map();
  EXPECT_EQ(m.project(0, 4), (Projection{0, 4, false}));
  EXPECT_EQ(m.project(0, 13), (Projection{0, 12, false}));
  EXPECT_EQ(m.project(6, 13), (Projection{5, 12, false}));
  EXPECT_TRUE(m.project(5, 6).dropped);
  EXPECT_EQ(m.project(4, 7), (Projection{4, 6, false}));
  EXPECT_EQ(m.project_back(0, 12), (Projection{0, 13, false}));
  EXPECT_EQ(m.project_back(5, 12), (Projection{6, 13, false}));
}

TEST(OffsetMap, OutOfBounds) {
  const OffsetMap m = mama_map();
  EXPECT_THROW(m.project(0, 14), DataError);
  EXPECT_THROW(m.project(3, 2), DataError);
  EXPECT_THROW(m.project_back(0, 13), DataError);
}

TEST(OffsetMap, ReplaceWidensToWholeSegment) {
  OffsetMapBuilder b;
  b.copy(2);
  b.replace(3, 1);
  b.copy(2);
  const OffsetMap m = std::move(b).finish();
  EXPECT_EQ(m.project(3, 4), (Projection{2, 3, false}));
  EXPECT_EQ(m.project_back(2, 3), (Projection{2, 5, false}));
  EXPECT_EQ(m.project(0, 2), (Projection{0, 2, false}));
}

TEST(OffsetMap, InsertsAreOutsideProjections) {
  OffsetMapBuilder b;
  b.copy(2);
  b.insert(1);
  b.copy(2);
  const OffsetMap m = std::move(b).finish();
  EXPECT_EQ(m.project(0, 2), (Projection{0, 2, false}));
  EXPECT_EQ(m.project(2, 4), (Projection{3, 5, false}));
  EXPECT_EQ(m.project(0, 4), (Projection{0, 5, false}));
  EXPECT_TRUE(m.project_back(2, 3).dropped);
}

TEST(OffsetMap, FromSegmentsValidates) {
  EXPECT_THROW(OffsetMap::from_segments({{0, 2, 0, 3, SegmentKind::copy}}), DataError);
  EXPECT_THROW(OffsetMap::from_segments({{0, 1, 1, 2, SegmentKind::copy}}), DataError);
  EXPECT_THROW(OffsetMap::from_segments({{0, 0, 0, 2, SegmentKind::replace}}), DataError);
  EXPECT_NO_THROW(OffsetMap::from_segments({{0, 0, 0, 2, SegmentKind::remove},
                                            {0, 1, 2, 2, SegmentKind::insert}}));
}

TEST(OffsetMap, BuilderMerges) {
  OffsetMapBuilder b;
  b.copy(1);
  b.copy(2);
  b.replace(1, 1);
  b.replace(1, 1);
  b.remove(1);
  b.replace(2, 0);
  const OffsetMap m = std::move(b).finish();
  const auto& s = m.segments();
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0], (Segment{0, 3, 0, 3, SegmentKind::copy}));
  EXPECT_EQ(s[1].kind, SegmentKind::replace);
  EXPECT_EQ(s[2].kind, SegmentKind::replace);
  EXPECT_EQ(s[3], (Segment{5, 5, 5, 8, SegmentKind::remove}));
}

TEST(OffsetMap, Identity) {
  const auto id = OffsetMap::identity(5);
  EXPECT_TRUE(id.is_identity());
  EXPECT_EQ(id.project(1, 3), (Projection{1, 3, false}));
  EXPECT_TRUE(OffsetMap::identity(0).is_identity());
  EXPECT_FALSE(mama_map().is_identity());
}

TEST(Compose, IdentityLaws) {
  EXPECT_EQ(compose(OffsetMap::identity(7), OffsetMap::identity(7)), OffsetMap::identity(7));
  const OffsetMap m = mama_map();
  EXPECT_EQ(compose(m, OffsetMap::identity(12)), m);
  EXPECT_EQ(compose(OffsetMap::identity(13), m), m);
  EXPECT_THROW(compose(m, OffsetMap::identity(13)), DataError);
}

TEST(Compose, InverseRoundTrip) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const OffsetMap m = testing::random_map(rng, testing::uniform(rng, 0, 20));
    EXPECT_EQ(m.inverse().inverse(), m);
    EXPECT_EQ(m.inverse().orig_length(), m.clean_length());
  }
}

// Dropped projections carry no meaningful position.
bool same(const Projection& a, const Projection& b) {
  return a.dropped == b.dropped && (a.dropped || (a.start == b.start && a.end == b.end));
}

std::string describe(const OffsetMap& m) {
  std::string out;
  for (const auto& g : m.segments()) {
    out += std::string(segment_kind_name(g.kind)) + "(" + std::to_string(g.orig_length()) + "->" +
           std::to_string(g.clean_length()) + ") ";
  }
  return out;
}

void check_against_two_steps(const OffsetMap& a, const OffsetMap& b) {
  const OffsetMap c = compose(a, b);
  ASSERT_EQ(c.orig_length(), a.orig_length());
  ASSERT_EQ(c.clean_length(), b.clean_length());
  // The flattened segments alone reproduce the projection when the edits do not interact.
  const OffsetMap flat = OffsetMap::from_segments(c.segments());
  const bool exact = testing::laminar(a, b);
  const std::size_t n = a.orig_length();
  for (std::size_t s = 0; s <= n; ++s) {
    for (std::size_t e = s + 1; e <= n; ++e) {
      const std::string where = describe(a) + " then " + describe(b) + " span " + std::to_string(s) +
                                "," + std::to_string(e);
      const Projection two = testing::project_twice(a, b, s, e);
      ASSERT_TRUE(same(c.project(s, e), two)) << where;
      if (exact) ASSERT_TRUE(same(flat.project(s, e), two)) << "flattened: " << where;
    }
  }
  const std::size_t m = c.clean_length();
  for (std::size_t s = 0; s <= m; ++s) {
    for (std::size_t e = s + 1; e <= m; ++e) {
      const Projection mid = b.project_back(s, e);
      const Projection two = mid.dropped ? mid : a.project_back(mid.start, mid.end);
      ASSERT_TRUE(same(c.project_back(s, e), two)) << "back: " << describe(a) << " then " << describe(b);
    }
  }
}

TEST(Compose, MatchesTwoStepProjection) {
  Rng rng(99);
  int laminar = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const OffsetMap a = testing::random_map(rng, testing::uniform(rng, 0, 14));
    const OffsetMap b = testing::random_map(rng, a.clean_length());
    laminar += testing::laminar(a, b);
    check_against_two_steps(a, b);
    if (HasFatalFailure()) return;
  }
  EXPECT_GT(laminar, 300);
}

TEST(Compose, Associative) {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const OffsetMap a = testing::random_map(rng, testing::uniform(rng, 0, 10));
    const OffsetMap b = testing::random_map(rng, a.clean_length());
    const OffsetMap c = testing::random_map(rng, b.clean_length());
    const OffsetMap left = compose(compose(a, b), c);
    const OffsetMap right = compose(a, compose(b, c));
    EXPECT_EQ(left.stages(), right.stages());
    for (std::size_t s = 0; s <= a.orig_length(); ++s) {
      for (std::size_t e = s; e <= a.orig_length(); ++e) {
        ASSERT_TRUE(same(left.project(s, e), right.project(s, e)));
      }
    }
    for (std::size_t s = 0; s <= c.clean_length(); ++s) {
      for (std::size_t e = s; e <= c.clean_length(); ++e) {
        ASSERT_TRUE(same(left.project_back(s, e), right.project_back(s, e)));
      }
    }
  }
}

}  // namespace
}  // namespace onconer
