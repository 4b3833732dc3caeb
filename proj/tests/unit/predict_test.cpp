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

#include <cmath>
#include <sstream>

#include "onconer/predict.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/precise_loss.hpp"

namespace onconer {
namespace {

using testing::Rng;

std::string record(const std::string& probs, const char* extra = "") {
  std::string order = "[";
  for (const auto& t : canonical_tag_order()) order += (order.size() > 1 ? ",\"" : "\"") + t + "\"";
  order += "]";
  return std::string(R"({"doc_id":"d1","coords":"raw","tag_order":)") + order +
         R"(,"tokens":[{"start":0,"end":4,"word_id":0,"probs":)" + probs + "}" + extra + "]}";
}

std::string vec(std::size_t n, std::size_t hot, double v = 1.0) {
  std::string s = "[";
  for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + std::string(i == hot ? std::to_string(v) : "0");
  return s + "]";
}

TEST(ParsePredictions, OneHotValid) {
  const auto p = parse_predictions(record(vec(17, 0)));
  ASSERT_EQ(p.sets.size(), 1u);
  EXPECT_EQ(p.sets[0].document_id, "d1");
  EXPECT_EQ(p.sets[0].coords, Coords::raw);
  ASSERT_EQ(p.sets[0].tokens.size(), 1u);
  EXPECT_EQ(p.sets[0].tokens[0].probs[0], 1.0);
  EXPECT_TRUE(p.warnings.empty());
}

TEST(ParsePredictions, LengthError) {
  try {
    parse_predictions(record(vec(16, 0)));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("length 16"), std::string::npos);
  }
}

TEST(ParsePredictions, SumTolerance) {
  EXPECT_THROW(parse_predictions(record(vec(17, 0, 0.9))), DataError);
  const auto p = parse_predictions(record(vec(17, 0, 1.0005)));
  EXPECT_EQ(p.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(p.sets[0].tokens[0].probs[0], 1.0);
}

TEST(ParsePredictions, Rejections) {
  EXPECT_THROW(parse_predictions(record("[-1,2,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]")), DataError);
  std::string bad = record(vec(17, 0));
  bad.replace(bad.find("\"O\""), 3, "\"B-MET\"");
  EXPECT_THROW(parse_predictions(bad), DataError);
  std::string neg = record(vec(17, 0));
  neg.replace(neg.find("\"start\":0"), 9, "\"start\":-1");
  EXPECT_THROW(parse_predictions(neg), DataError);
  EXPECT_THROW(parse_predictions(record(vec(17, 0), R"(,{"start":2,"end":5,"word_id":1,"probs":)"
                                                    "[1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}")),
               DataError);
  EXPECT_THROW(parse_predictions(record(vec(17, 0), R"(,{"start":5,"end":6,"word_id":-1,"probs":)"
                                                    "[1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}")),
               DataError);
  EXPECT_THROW(parse_predictions(record(vec(17, 0), R"(,{"start":5,"end":5,"word_id":1,"probs":)"
                                                    "[1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}")),
               DataError);
  EXPECT_THROW(parse_predictions("{"), DataError);
  EXPECT_THROW(parse_predictions(R"({"doc_id":"d"})"), DataError);
}

TEST(ParsePredictions, WriteRoundTrip) {
  Rng rng(53);
  std::vector<PredictionSet> sets;
  for (int d = 0; d < 5; ++d) {
    PredictionSet s{"doc" + std::to_string(d), d % 2 ? Coords::clean : Coords::raw, {}};
    std::size_t pos = 0;
    for (std::int64_t w = 0; w < 6; ++w) {
      for (std::size_t k = testing::uniform(rng, 1, 3); k > 0; --k) {
        s.tokens.push_back({pos, pos + 2, w, testing::random_probs(rng)});
        pos += 2;
      }
      ++pos;
    }
    sets.push_back(std::move(s));
  }
  std::ostringstream out;
  write_predictions(out, sets);
  const auto back = parse_predictions(out.str());
  ASSERT_EQ(back.sets.size(), sets.size());
  for (std::size_t d = 0; d < sets.size(); ++d) {
    ASSERT_EQ(back.sets[d].tokens.size(), sets[d].tokens.size());
    for (std::size_t t = 0; t < sets[d].tokens.size(); ++t) {
      for (std::size_t k = 0; k < Tag::kCount; ++k) {
        EXPECT_NEAR(back.sets[d].tokens[t].probs[k], sets[d].tokens[t].probs[k], 1e-15);
      }
    }
  }
}

TokenPrediction tok(std::size_t s, std::size_t e, std::int64_t w,
                    std::initializer_list<std::pair<const char*, double>> probs) {
  TokenPrediction t{s, e, w, {}};
  for (auto [name, p] : probs) t.probs[Tag::parse(name)->index()] = p;
  return t;
}

TEST(Aggregate, IdenticalVectors) {
  PredictionSet s{"d", Coords::raw, {tok(0, 2, 0, {{"B-MET", 1}}), tok(2, 4, 0, {{"B-MET", 1}})}};
  const auto w = aggregate_average(s);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].tag, Tag::begin(Label::MET));
  EXPECT_EQ(w[0].score, 1.0);
  EXPECT_EQ(w[0].start, 0u);
  EXPECT_EQ(w[0].end, 4u);
}

TEST(Aggregate, MeanThenArgmax) {
  PredictionSet s{"d", Coords::raw,
                  {tok(0, 2, 0, {{"B-MET", 0.6}, {"O", 0.4}}), tok(2, 4, 0, {{"B-MET", 0.2}, {"O", 0.8}})}};
  const auto w = aggregate_average(s);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].tag, Tag::outside());
  EXPECT_NEAR(w[0].score, 0.6, 1e-12);
  EXPECT_NEAR(w[0].mean[Tag::begin(Label::MET).index()], 0.4, 1e-12);
}

TEST(Aggregate, TiesToLowerIndex) {
  PredictionSet s{"d", Coords::raw, {tok(0, 2, 0, {{"I-TTO", 0.5}, {"B-EVOL", 0.5}})}};
  EXPECT_EQ(aggregate_average(s)[0].tag, Tag::begin(Label::EVOL));
}

TEST(Aggregate, Empty) { EXPECT_TRUE(aggregate_average(PredictionSet{}).empty()); }

TEST(Aggregate, MatchesOracle) {
  Rng rng(59);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = testing::random_prediction_set(rng);
    const auto got = aggregate_average(s);
    const auto want = testing::mean_argmax(s);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].tag.index(), want[i].tag_index);
      ASSERT_NEAR(got[i].score, want[i].score, 1e-9);
    }
  }
}

TEST(Aggregate, MeansStayDistributions) {
  Rng rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    for (const auto& w : aggregate_average(testing::random_prediction_set(rng))) {
      double sum = 0.0;
      for (double p : w.mean) {
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, 1.0);
        sum += p;
      }
      ASSERT_NEAR(sum, 1.0, 1e-9);
      ASSERT_EQ(w.score, w.mean[w.tag.index()]);
    }
  }
}

WordPrediction word(std::size_t s, std::size_t e, Tag t, double score) {
  WordPrediction w{s, e, t, score, {}};
  w.mean[t.index()] = score;
  return w;
}

TEST(Assemble, Examples) {
  auto e = assemble_entities({word(0, 4, Tag::begin(Label::PAT), 0.9),
                              word(5, 12, Tag::inside(Label::PAT), 0.7)},
                             Coords::raw);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].span(), (Span{0, 12, Label::PAT}));
  EXPECT_NEAR(e[0].score, 0.8, 1e-12);
  EXPECT_TRUE(assemble_entities({word(0, 4, Tag::outside(), 0.9)}, Coords::raw).empty());
  e = assemble_entities({word(0, 4, Tag::inside(Label::MET), 0.6)}, Coords::raw);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].span(), (Span{0, 4, Label::MET}));
}

TEST(Assemble, CleanCoordinates) {
  OffsetMapBuilder b;
  b.copy(5);
  b.remove(1);
  b.copy(7);
  const OffsetMap m = std::move(b).finish();
  const auto e = assemble_entities({word(5, 12, Tag::begin(Label::PAT), 0.5)}, Coords::clean, &m);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].span(), (Span{6, 13, Label::PAT}));
  EXPECT_THROW(assemble_entities({}, Coords::clean), DataError);
}

TaggedSequence gold_of(std::vector<Tag> tags) {
  TaggedSequence g{"r", {}, std::move(tags)};
  for (std::size_t i = 0; i < g.tags.size(); ++i) g.tokens.push_back({"w", 2 * i, 2 * i + 1});
  return g;
}

TEST(Scores, Accuracy) {
  std::vector<WordPrediction> words;
  for (int i = 0; i < 4; ++i) words.push_back(word(2 * i, 2 * i + 1, Tag::outside(), 1.0));
  const auto g = gold_of({Tag::outside(), Tag::outside(), Tag::outside(), Tag::begin(Label::MET)});
  const auto s = score_words(words, g);
  EXPECT_DOUBLE_EQ(token_accuracy(s), 0.75);
  EXPECT_THROW(token_accuracy(WordScores{}), DataError);
  EXPECT_THROW(cross_entropy_loss(WordScores{}), DataError);
  EXPECT_THROW(token_accuracy(std::vector<PredictionSet>{}, std::vector<TaggedSequence>{}), DataError);
}

TEST(Scores, LossLn2) {
  PredictionSet s{"r", Coords::raw, {tok(0, 1, 0, {{"O", 0.5}, {"B-MET", 0.5}}),
                                     tok(2, 3, 1, {{"O", 0.5}, {"B-PAT", 0.5}})}};
  const auto g = gold_of({Tag::outside(), Tag::outside()});
  EXPECT_NEAR(cross_entropy_loss({s}, {g}), std::log(2.0), 1e-15);
}

TEST(Scores, OneHotOnGold) {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    PredictionSet s{"r", Coords::raw, {}};
    std::vector<Tag> tags;
    const std::size_t n = testing::uniform(rng, 1, 20);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t t = testing::uniform(rng, 0, 16);
      tags.push_back(Tag::from_index(t));
      for (std::size_t k = testing::uniform(rng, 1, 3); k > 0; --k) {
        s.tokens.push_back({2 * i, 2 * i + 1, static_cast<std::int64_t>(i), testing::one_hot(t)});
      }
    }
    const auto g = gold_of(tags);
    EXPECT_EQ(token_accuracy({s}, {g}), 1.0);
    EXPECT_LE(cross_entropy_loss({s}, {g}), 1e-10);
  }
}

TEST(Scores, LossMatchesHighPrecision) {
  Rng rng(67);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::random_prediction_set(rng);
    if (s.tokens.empty()) continue;
    const auto oracle = testing::mean_argmax(s);
    std::vector<Tag> tags;
    for (std::size_t i = 0; i < oracle.size(); ++i) tags.push_back(Tag::from_index(testing::uniform(rng, 0, 16)));
    const auto g = gold_of(tags);

    const double want = testing::precise_loss(s, tags);
    EXPECT_NEAR(cross_entropy_loss({s}, {g}), want, 1e-9);
  }
}

TEST(Scores, MismatchedWordCount) {
  PredictionSet s{"r", Coords::raw, {tok(0, 1, 0, {{"O", 1}})}};
  EXPECT_THROW(cross_entropy_loss({s}, {gold_of({Tag::outside(), Tag::outside()})}), DataError);
  EXPECT_THROW(cross_entropy_loss({s}, {TaggedSequence{"other", {}, {}}}), DataError);
}

}  // namespace
}  // namespace onconer
