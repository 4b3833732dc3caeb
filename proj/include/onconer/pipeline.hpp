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

// Corpus-level glue used by the command line tool: per-document work
// fanned out over threads, results kept in input order.

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "onconer/corpus.hpp"
#include "onconer/evaluate.hpp"
#include "onconer/gazetteer.hpp"
#include "onconer/predict.hpp"
#include "onconer/preprocess.hpp"
#include "onconer/tagcodec.hpp"

namespace onconer {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct PreprocessedAnnotated {
  PreprocessedDocument clean;
  std::vector<Span> spans;    // gold spans projected onto the clean text
  std::vector<Span> dropped;  // gold spans with no clean counterpart
};

inline PreprocessedAnnotated preprocess_document(const AnnotatedDocument& doc, const PassSet& passes) {
  PreprocessedAnnotated out{preprocess_utf8(doc.document.text, passes, doc.id()), {}, {}};
  for (const Span& s : doc.spans) {
    const Projection p = out.clean.map.project(s.start, s.end);
    if (p.dropped || (!out.spans.empty() && out.spans.back().end > p.start)) {
      out.dropped.push_back(s);
      continue;
    }
    out.spans.push_back({p.start, p.end, s.label});
  }
  return out;
}

// Gold tags over the words the model saw.
inline TaggedSequence gold_sequence(const AnnotatedDocument& doc, Coords coords,
                                    const PassSet& passes) {
  if (coords == Coords::raw) return encode_document(doc).sequence;
  const auto pre = preprocess_document(doc, passes);
  return spans_to_tags(tokenize(pre.clean.clean_text), pre.spans, doc.id()).sequence;
}

// Gazetteer tagging of every document, optionally on preprocessed text.
// Returned spans are in original coordinates.
inline std::vector<DocumentSpans> tag_corpus(const CompiledMatcher& matcher, const Corpus& corpus,
                                             const PassSet& passes, unsigned jobs = 1) {
  std::vector<DocumentSpans> out(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    const auto& doc = corpus.documents[i];
    out[i].id = doc.id();
    if (passes.empty()) {
      out[i].spans = tag_text(matcher, unicode::decode_utf8(doc.document.text));
    } else {
      const auto pre = preprocess_utf8(doc.document.text, passes, doc.id());
      out[i].spans = tag_text(matcher, pre.clean_text, &pre.map);
    }
  });
  return out;
}

struct DocumentEntities {
  std::string id;
  std::vector<PredictedEntity> entities;
};

struct AggregatedCorpus {
  std::vector<DocumentEntities> documents;  // same order as the prediction sets
  WordScores scores;
};

// Aggregates every prediction set, assembles entities in original
// coordinates and scores words against the gold annotations of `corpus`.
inline AggregatedCorpus aggregate_corpus(const std::vector<PredictionSet>& sets, const Corpus& corpus,
                                         const PassSet& passes, unsigned jobs = 1) {
  std::map<std::string, const AnnotatedDocument*> by_id;
  for (const auto& d : corpus.documents) by_id[d.id()] = &d;
  AggregatedCorpus out;
  out.documents.resize(sets.size());
  std::vector<WordScores> scores(sets.size());
  parallel_for(sets.size(), jobs, [&](std::size_t i) {
    const PredictionSet& set = sets[i];
    auto it = by_id.find(set.document_id);
    if (it == by_id.end()) throw DataError("predictions for unknown document " + set.document_id);
    const AnnotatedDocument& doc = *it->second;
    const auto words = aggregate_average(set);
    std::optional<PreprocessedDocument> pre;
    std::size_t seen_length = 0;
    if (set.coords == Coords::clean) {
      pre = preprocess_utf8(doc.document.text, passes, doc.id());
      seen_length = pre->clean_text.size();
    } else {
      seen_length = text_length(doc.document.text);
    }
    if (!set.tokens.empty() && set.tokens.back().end > seen_length) {
      throw DataError("document " + doc.id() + ": subtoken offsets exceed the text length");
    }
    out.documents[i] = {doc.id(), assemble_entities(words, set.coords, pre ? &pre->map : nullptr)};
    scores[i] = score_words(words, gold_sequence(doc, set.coords, passes));
  });
  for (const auto& s : scores) out.scores += s;
  return out;
}

inline std::vector<DocumentSpans> entity_spans(const std::vector<DocumentEntities>& docs) {
  std::vector<DocumentSpans> out;
  for (const auto& d : docs) {
    DocumentSpans ds{d.id, {}};
    for (const auto& e : d.entities) ds.spans.push_back(e.span());
    out.push_back(std::move(ds));
  }
  return out;
}

// Predicted entities in Doccano layout (id, text, label) with a parallel
// "score" array, so any span reader can consume them.
inline void write_entities(std::ostream& out, const Corpus& corpus,
                           const std::vector<DocumentSpans>& spans,
                           const std::vector<std::vector<double>>& scores = {}) {
  std::map<std::string, const AnnotatedDocument*> by_id;
  for (const auto& d : corpus.documents) by_id[d.id()] = &d;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    auto it = by_id.find(spans[i].id);
    if (it == by_id.end()) throw DataError("entities for unknown document " + spans[i].id);
    AnnotatedDocument doc{it->second->document, spans[i].spans};
    nlohmann::ordered_json j = to_json(doc);
    if (i < scores.size()) j["score"] = scores[i];
    out << j.dump() << '\n';
  }
}

}  // namespace onconer
