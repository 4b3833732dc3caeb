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

#include "onconer/tagcodec.hpp"
#include "support/generators.hpp"

namespace onconer {
namespace {

using testing::Rng;

std::vector<std::string> texts(const std::vector<Token>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.text);
  return out;
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(texts(tokenize(U"pT1N0M0.")), (std::vector<std::string>{"pT1N0M0", "."}));
  EXPECT_TRUE(tokenize(U"").empty());
  const auto t = tokenize(U"Mama derecha");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (Token{"Mama", 0, 4}));
  EXPECT_EQ(t[1], (Token{"derecha", 5, 12}));
}

TEST(Tokenize, Joiners) {
  EXPECT_EQ(texts(tokenize(U"c-erbB2 her2+ 1/3 -x y- (a)")),
            (std::vector<std::string>{"c-erbB2", "her2", "+", "1/3", "-", "x", "y", "-", "(",
                                      "a", ")"}));
  EXPECT_EQ(texts(tokenize(U"evolucio\u0301n\tmet\u00e1stasis")),
            (std::vector<std::string>{"evolucio\xcc\x81n", "met\xc3\xa1stasis"}));
}

TEST(TagScheme, CanonicalOrder) {
  const auto order = canonical_tag_order();
  ASSERT_EQ(order.size(), 17u);
  EXPECT_EQ(order.front(), "O");
  EXPECT_EQ(order[1], "B-ANTPERSON");
  EXPECT_EQ(order[2], "I-ANTPERSON");
  EXPECT_EQ(order[7], "B-MET");
  EXPECT_EQ(order.back(), "I-TTO");
  for (std::size_t i = 0; i < Tag::kCount; ++i) {
    EXPECT_EQ(Tag::from_index(i).index(), i);
    EXPECT_EQ(Tag::parse(order[i])->index(), i);
  }
  EXPECT_FALSE(Tag::parse("B-XYZ"));
  EXPECT_FALSE(Tag::parse("E-MET"));
  EXPECT_FALSE(Tag::parse("o"));
}

TEST(SpansToTags, Examples) {
  const auto tokens = tokenize(U"Mama derecha");
  auto e = spans_to_tags(tokens, {{0, 12, Label::PAT}});
  EXPECT_EQ(e.sequence.tags, (std::vector<Tag>{Tag::begin(Label::PAT), Tag::inside(Label::PAT)}));
  EXPECT_EQ(e.partial_tokens, 0u);
  e = spans_to_tags(tokens, {});
  EXPECT_EQ(e.sequence.tags, (std::vector<Tag>{Tag::outside(), Tag::outside()}));
  e = spans_to_tags(tokens, {{2, 4, Label::MET}});
  EXPECT_EQ(e.sequence.tags, (std::vector<Tag>{Tag::begin(Label::MET), Tag::outside()}));
  EXPECT_EQ(e.partial_tokens, 1u);
}

TEST(SpansToTags, SharedToken) {
  const auto tokens = tokenize(U"abcdef gh");
  const auto e = spans_to_tags(tokens, {{0, 2, Label::MET}, {3, 5, Label::PAT}});
  EXPECT_EQ(e.sequence.tags[0], Tag::begin(Label::MET));
  EXPECT_EQ(e.lost_spans, 1u);
  EXPECT_THROW(spans_to_tags(tokens, {{0, 3, Label::MET}, {2, 5, Label::PAT}}), DataError);
}

TEST(TagsToSpans, Examples) {
  const auto tokens = tokenize(U"Mama derecha");
  EXPECT_EQ(tags_to_spans(tokens, {Tag::begin(Label::PAT), Tag::inside(Label::PAT)}),
            (std::vector<Span>{{0, 12, Label::PAT}}));
  EXPECT_TRUE(tags_to_spans(tokens, {Tag::outside(), Tag::outside()}).empty());
  EXPECT_EQ(tags_to_spans({tokens[0]}, {Tag::inside(Label::MET)}),
            (std::vector<Span>{{0, 4, Label::MET}}));
  EXPECT_EQ(tags_to_spans(tokens, {Tag::begin(Label::PAT), Tag::inside(Label::MET)}),
            (std::vector<Span>{{0, 4, Label::PAT}, {5, 12, Label::MET}}));
  EXPECT_EQ(tags_to_spans(tokens, {Tag::begin(Label::PAT), Tag::begin(Label::PAT)}),
            (std::vector<Span>{{0, 4, Label::PAT}, {5, 12, Label::PAT}}));
  EXPECT_THROW(tags_to_spans(tokens, {Tag::outside()}), DataError);
}

TEST(Codec, RoundTripOnTokenAlignedSpans) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tokens = testing::random_tokens(rng);
    std::vector<Span> spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
      i += testing::uniform(rng, 0, 3);
      if (i >= tokens.size()) break;
      const std::size_t j = std::min(tokens.size(), i + testing::uniform(rng, 1, 4));
      spans.push_back({tokens[i].start, tokens[j - 1].end, testing::random_label(rng)});
      i = j;
    }
    const auto e = spans_to_tags(tokens, spans);
    ASSERT_EQ(e.partial_tokens, 0u);
    ASSERT_EQ(tags_to_spans(e.sequence), spans);
  }
}

TEST(Codec, DecoderTotal) {
  Rng rng(37);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tokens = testing::random_tokens(rng);
    std::vector<Tag> tags;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      tags.push_back(Tag::from_index(testing::uniform(rng, 0, Tag::kCount - 1)));
    }
    const auto spans = tags_to_spans(tokens, tags);
    for (std::size_t k = 0; k < spans.size(); ++k) {
      ASSERT_LT(spans[k].start, spans[k].end);
      if (k > 0) ASSERT_LE(spans[k - 1].end, spans[k].start);
    }
    // Decoding is stable: re-encoding the decoded spans gives a clean sequence.
    ASSERT_EQ(tags_to_spans(spans_to_tags(tokens, spans).sequence), spans);
  }
}

TEST(Conll, Export) {
  TaggedSequence s{"d", {{"Mama", 0, 4}}, {Tag::begin(Label::PAT)}};
  EXPECT_EQ(export_conll({s}), "Mama\tB-PAT\n");
  EXPECT_EQ(export_conll({TaggedSequence{}}), "");
  EXPECT_EQ(export_conll({s, TaggedSequence{}, s}), "Mama\tB-PAT\n\nMama\tB-PAT\n");
}

TEST(Conll, ImportErrors) {
  EXPECT_THROW(import_conll("Mama\tB-XYZ\n"), DataError);
  EXPECT_THROW(import_conll("Mama B-PAT\n"), DataError);
  EXPECT_THROW(import_conll("Mama\tB-PAT\textra\n"), DataError);
  EXPECT_TRUE(import_conll("").empty());
}

TEST(Conll, RoundTrip) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TaggedSequence> docs;
    const std::size_t n = testing::uniform(rng, 1, 4);
    for (std::size_t d = 0; d < n; ++d) {
      std::u32string text;
      while (text.empty()) text = testing::random_text(rng, 12);
      auto tokens = tokenize(text);
      if (tokens.empty()) continue;
      const auto spans = testing::random_spans(rng, text.size(), 4);
      auto seq = spans_to_tags(tokens, spans).sequence;
      docs.push_back(std::move(seq));
    }
    const auto back = import_conll(export_conll(docs));
    ASSERT_EQ(back.size(), docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
      EXPECT_EQ(back[d].document_id, std::to_string(d + 1));
      EXPECT_EQ(back[d].tags, docs[d].tags);
      EXPECT_EQ(texts(back[d].tokens), texts(docs[d].tokens));
      const auto doc = to_annotated_document(back[d]);
      EXPECT_EQ(encode_document(doc).sequence.tags, back[d].tags);
    }
  }
}

}  // namespace
}  // namespace onconer
