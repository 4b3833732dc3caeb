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

// onconer: command line front end.
//
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "onconer/onconer.hpp"

namespace fs = std::filesystem;
using namespace onconer;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

// "-" writes to standard output.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path != "-") {
      if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw DataError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw DataError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

void write_file(const std::string& path, const std::string& content) {
  Output out(path);
  out.stream() << content;
  out.close();
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

Corpus read_corpus(const std::string& path, const ParseOptions& options = {}) {
  auto in = open_in(path);
  try {
    auto r = parse_doccano(in, options);
    warn_all(r.warnings);
    return std::move(r.corpus);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

PassSet parse_passes(const std::string& s) { return PassSet::parse(s); }

unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<DocumentSpans> sorted_by_id(std::vector<DocumentSpans> v) {
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return v;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string in, out = "-";
  bool drop_overlaps = false, ignore_unknown = false;
};

int run_ingest(const IngestArgs& a) {
  Corpus c = read_corpus(a.in, {a.drop_overlaps, a.ignore_unknown});
  sort_by_id(c);
  Output out(a.out);
  write_doccano(out.stream(), c);
  out.close();
  std::size_t spans = 0;
  for (const auto& d : c.documents) spans += d.spans.size();
  std::cerr << "ingested " << c.size() << " documents, " << spans << " spans\n";
  return 0;
}

struct ValidateArgs {
  std::string in;
};

int run_validate(const ValidateArgs& a) {
  auto in = open_in(a.in);
  auto r = read_doccano_unchecked(in);
  warn_all(r.warnings);
  const auto violations = validate(r.corpus);
  for (const auto& v : violations) {
    std::cerr << violation_name(v.kind) << ": document " << v.document_id << ": " << v.message
              << '\n';
  }
  const bool ok = violations.empty() && r.warnings.empty();
  std::cerr << r.corpus.size() << " documents, " << violations.size() << " violations\n";
  return ok ? 0 : kExitData;
}

struct StatsArgs {
  std::string in, train, val, test, format = "txt", out = "-";
};

int run_stats(const StatsArgs& a) {
  const TableFormat format = parse_table_format(a.format);
  const Corpus c = read_corpus(a.in);
  std::optional<SplitAssignment> assignment;
  const std::pair<std::string, std::string> parts[] = {
      {"train", a.train}, {"validation", a.val}, {"test", a.test}};
  for (const auto& [name, path] : parts) {
    if (path.empty()) continue;
    if (!assignment) assignment.emplace();
    std::vector<std::string> ids;
    for (const auto& d : read_corpus(path).documents) ids.push_back(d.id());
    assignment->parts.emplace_back(name, std::move(ids));
  }
  const auto dist = label_distribution(c, assignment);
  Output out(a.out);
  out.stream() << render(distribution_table(dist), format);
  out.close();
  return 0;
}

struct SplitArgs {
  std::string in, train = "0.5", val = "0.25", test = "0.25", out_dir = ".";
  std::uint64_t seed = 42;
  bool no_stratify = false;
};

int run_split(const SplitArgs& a) {
  SplitSpec spec{Rational::parse(a.train), Rational::parse(a.val), Rational::parse(a.test), a.seed,
                 !a.no_stratify};
  check_fractions(spec);
  const Corpus c = read_corpus(a.in);
  const SplitResult r = split(c, spec);
  const Corpus* parts[] = {&r.train, &r.validation, &r.test};
  for (std::size_t p = 0; p < 3; ++p) {
    const std::string path = (fs::path(a.out_dir) / (std::string(kSplitNames[p]) + ".jsonl")).string();
    write_file(path, serialize_doccano(*parts[p]));
    std::cerr << kSplitNames[p] << ": " << parts[p]->size() << " documents -> " << path << '\n';
  }
  return 0;
}

struct PreprocessArgs {
  std::string in, out = "-", maps, passes = "all";
  unsigned jobs = 1;
};

nlohmann::ordered_json map_json(const PreprocessedDocument& p) {
  nlohmann::ordered_json j;
  j["id"] = p.document_id;
  j["passes"] = p.passes;
  auto segs = nlohmann::ordered_json::array();
  for (const auto& s : p.map.segments()) {
    segs.push_back({segment_kind_name(s.kind), s.orig_start, s.orig_end, s.clean_start, s.clean_end});
  }
  j["segments"] = std::move(segs);
  return j;
}

int run_preprocess(const PreprocessArgs& a) {
  const PassSet passes = parse_passes(a.passes);
  Corpus c = read_corpus(a.in);
  sort_by_id(c);
  std::vector<PreprocessedAnnotated> done(c.size());
  parallel_for(c.size(), resolve_jobs(a.jobs),
               [&](std::size_t i) { done[i] = preprocess_document(c.documents[i], passes); });
  Corpus clean;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (const auto& s : done[i].dropped) {
      std::cerr << "warning: document " << c.documents[i].id() << ": span " << to_string(s)
                << " has no counterpart in the clean text\n";
    }
    clean.documents.push_back({{c.documents[i].id(), c.documents[i].document.category,
                                done[i].clean.clean_utf8()},
                               done[i].spans});
  }
  Output out(a.out);
  write_doccano(out.stream(), clean);
  out.close();
  if (!a.maps.empty()) {
    Output maps(a.maps);
    for (const auto& d : done) maps.stream() << map_json(d.clean).dump() << '\n';
    maps.close();
  }
  return 0;
}

struct ConvertArgs {
  std::string in, out = "-", to;
};

int run_convert(const ConvertArgs& a) {
  if (a.to == "conll") {
    const Corpus c = read_corpus(a.in);
    std::vector<TaggedSequence> seqs;
    std::size_t partial = 0, lost = 0;
    for (const auto& d : c.documents) {
      auto e = encode_document(d);
      partial += e.partial_tokens;
      lost += e.lost_spans;
      seqs.push_back(std::move(e.sequence));
    }
    if (partial > 0) std::cerr << "warning: " << partial << " tokens only partly covered by their span\n";
    if (lost > 0) std::cerr << "warning: " << lost << " spans lost to a shared token\n";
    Output out(a.out);
    export_conll(out.stream(), seqs);
    out.close();
    return 0;
  }
  auto in = open_in(a.in);
  Corpus c;
  for (const auto& seq : import_conll(in)) c.documents.push_back(to_annotated_document(seq));
  Output out(a.out);
  write_doccano(out.stream(), c);
  out.close();
  return 0;
}

struct TagArgs {
  std::string dict, in, out = "-", passes = "none";
  unsigned jobs = 1;
};

int run_tag(const TagArgs& a) {
  const PassSet passes = parse_passes(a.passes);
  auto din = open_in(a.dict);
  DictionaryLoad load;
  try {
    load = load_dictionary(din);
  } catch (const DataError& e) {
    throw DataError(a.dict + ": " + e.what());
  }
  warn_all(load.warnings);
  const CompiledMatcher matcher(std::move(load.dictionary));
  Corpus c = read_corpus(a.in);
  sort_by_id(c);
  const auto spans = tag_corpus(matcher, c, passes, resolve_jobs(a.jobs));
  Output out(a.out);
  write_entities(out.stream(), c, spans);
  out.close();
  return 0;
}

struct AggregateArgs {
  std::string preds, corpus, out = "-", metrics, passes = "all";
  unsigned jobs = 1;
};

std::vector<PredictionSet> read_predictions(const std::string& path) {
  auto in = open_in(path);
  try {
    auto p = parse_predictions(in);
    warn_all(p.warnings);
    return std::move(p.sets);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

AggregatedCorpus aggregate_files(const std::string& preds, const Corpus& corpus,
                                 const PassSet& passes, unsigned jobs) {
  auto sets = read_predictions(preds);
  std::stable_sort(sets.begin(), sets.end(),
                   [](const auto& x, const auto& y) { return x.document_id < y.document_id; });
  for (std::size_t i = 1; i < sets.size(); ++i) {
    if (sets[i].document_id == sets[i - 1].document_id) {
      throw DataError(preds + ": duplicate predictions for document " + sets[i].document_id);
    }
  }
  return aggregate_corpus(sets, corpus, passes, jobs);
}

nlohmann::ordered_json word_metrics_json(const WordScores& s) {
  nlohmann::ordered_json j;
  j["words"] = s.total;
  j["correct"] = s.correct;
  j["accuracy"] = token_accuracy(s);
  j["loss"] = cross_entropy_loss(s);
  return j;
}

int run_aggregate(const AggregateArgs& a) {
  const PassSet passes = parse_passes(a.passes);
  const Corpus c = read_corpus(a.corpus);
  const auto agg = aggregate_files(a.preds, c, passes, resolve_jobs(a.jobs));
  std::vector<std::vector<double>> scores;
  for (const auto& d : agg.documents) {
    std::vector<double> s;
    for (const auto& e : d.entities) s.push_back(e.score);
    scores.push_back(std::move(s));
  }
  Output out(a.out);
  write_entities(out.stream(), c, entity_spans(agg.documents), scores);
  out.close();
  if (agg.scores.total > 0) {
    std::cerr << "words " << agg.scores.total << ", accuracy " << fixed(token_accuracy(agg.scores))
              << ", loss " << fixed(cross_entropy_loss(agg.scores)) << '\n';
    if (!a.metrics.empty()) write_file(a.metrics, word_metrics_json(agg.scores).dump(2) + "\n");
  } else if (!a.metrics.empty()) {
    throw DataError("no tokens: word metrics undefined");
  }
  return 0;
}

struct EvaluateArgs {
  std::string gold, pred, interchange, word_metrics, out, passes = "all";
  unsigned jobs = 1;
};

int run_evaluate(const EvaluateArgs& a) {
  const PassSet passes = parse_passes(a.passes);
  Corpus gold = read_corpus(a.gold);
  sort_by_id(gold);
  std::vector<DocumentSpans> pred;
  std::optional<double> accuracy, loss;
  if (!a.pred.empty()) {
    ParseOptions lenient;
    lenient.drop_overlaps = true;
    for (const auto& d : read_corpus(a.pred, lenient).documents) pred.push_back({d.id(), d.spans});
  } else {
    const auto agg = aggregate_files(a.interchange, gold, passes, resolve_jobs(a.jobs));
    pred = entity_spans(agg.documents);
    if (agg.scores.total > 0) {
      accuracy = token_accuracy(agg.scores);
      loss = cross_entropy_loss(agg.scores);
    }
  }
  if (!a.word_metrics.empty()) {
    auto in = open_in(a.word_metrics);
    try {
      const auto j = nlohmann::json::parse(in);
      accuracy = j.at("accuracy").get<double>();
      loss = j.at("loss").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(a.word_metrics + ": " + e.what());
    }
  }
  const Evaluation e = evaluate(gold_spans(gold), sorted_by_id(std::move(pred)), accuracy, loss);
  const std::string path = (fs::path(a.out) / "evaluation.json").string();
  write_file(path, to_json(e).dump(2) + "\n");
  std::cerr << "tp " << e.global.counts.tp << ", fp " << e.global.counts.fp << ", fn "
            << e.global.counts.fn << ", f1 " << fixed(e.global.f1) << " -> " << path << '\n';
  return 0;
}

struct CompareArgs {
  std::string gold, pred, format = "txt", out = "-";
};

int run_compare(const CompareArgs& a) {
  const TableFormat format = parse_table_format(a.format);
  ParseOptions lenient;
  lenient.drop_overlaps = true;
  const Corpus gold = read_corpus(a.gold);
  std::vector<DocumentSpans> pred;
  for (const auto& d : read_corpus(a.pred, lenient).documents) pred.push_back({d.id(), d.spans});
  const ComparisonReport r = compare_report(gold_spans(gold), pred);
  Output out(a.out);
  out.stream() << render(comparison_table(r), format);
  out.close();
  if (const auto p = r.hit_permille()) {
    std::cerr << "hits " << percent_from_permille(*p) << "%, misses "
              << percent_from_permille(1000 - *p) << "%\n";
  } else {
    std::cerr << "no predictions: hit fraction undefined\n";
  }
  return 0;
}

struct ReportArgs {
  std::string in, format = "txt", out = "-", charts;
};

int run_report(const ReportArgs& a) {
  const TableFormat format = parse_table_format(a.format);
  fs::path file = a.in;
  if (fs::is_directory(file)) file /= "evaluation.json";
  auto in = open_in(file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
  const Evaluation e = evaluation_from_json(j);
  Output out(a.out);
  out.stream() << render_tables(e, format);
  out.close();
  if (!a.charts.empty()) {
    const ChartData charts = emit_chart_data(e.comparison);
    for (const auto& n : charts.notices) std::cerr << "notice: " << n << '\n';
    for (const auto& c : charts.charts) {
      const char* name = c.kind == ChartSeries::Kind::pie ? "hits_pie.csv" : "entities_bar.csv";
      write_file((fs::path(a.charts) / name).string(), chart_csv(c));
    }
    write_file((fs::path(a.charts) / "charts.json").string(), charts_json(charts));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clinical named entity recognition toolkit for Spanish oncology reports", "onconer"};
  app.set_version_flag("--version", "onconer 0.1.0");
  app.require_subcommand(1);
  app.fallthrough(false);

  auto fractions = [](CLI::App* s, std::string& v, const char* name, const char* help) {
    s->add_option(name, v, help)->capture_default_str();
  };
  auto jobs_option = [](CLI::App* s, unsigned& jobs) {
    s->add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)")->capture_default_str();
  };

  IngestArgs ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Read a Doccano JSONL corpus, check it, write it back sorted by id");
  s_ingest->add_option("--in", ingest.in, "Doccano JSONL corpus")->required()->check(CLI::ExistingFile);
  s_ingest->add_option("--out", ingest.out, "Output file ('-' for stdout)")->capture_default_str();
  s_ingest->add_flag("--drop-overlaps", ingest.drop_overlaps, "Keep the longer of two overlapping spans");
  s_ingest->add_flag("--ignore-unknown-labels", ingest.ignore_unknown, "Drop spans with unknown labels");

  ValidateArgs val;
  auto* s_validate = app.add_subcommand("validate", "List every invariant violation in a corpus");
  s_validate->add_option("--in", val.in, "Doccano JSONL corpus")->required()->check(CLI::ExistingFile);

  StatsArgs stats;
  auto* s_stats = app.add_subcommand("stats", "Label distribution, optionally per split");
  s_stats->add_option("--in", stats.in, "Complete corpus")->required()->check(CLI::ExistingFile);
  s_stats->add_option("--train", stats.train, "Train split file")->check(CLI::ExistingFile);
  s_stats->add_option("--val", stats.val, "Validation split file")->check(CLI::ExistingFile);
  s_stats->add_option("--test", stats.test, "Test split file")->check(CLI::ExistingFile);
  s_stats->add_option("--format", stats.format, "csv, md or txt")->capture_default_str();
  s_stats->add_option("--out", stats.out, "Output file ('-' for stdout)")->capture_default_str();

  SplitArgs sp;
  auto* s_split = app.add_subcommand("split", "Seeded, stratified train/validation/test split");
  s_split->add_option("--in", sp.in, "Doccano JSONL corpus")->required()->check(CLI::ExistingFile);
  fractions(s_split, sp.train, "--train", "Train fraction (decimal or p/q)");
  fractions(s_split, sp.val, "--val", "Validation fraction");
  fractions(s_split, sp.test, "--test", "Test fraction");
  s_split->add_option("--seed", sp.seed, "Shuffle seed")->capture_default_str();
  s_split->add_option("--out-dir", sp.out_dir, "Directory for train/validation/test.jsonl")
      ->capture_default_str();
  s_split->add_flag("--no-stratify", sp.no_stratify, "Ignore document categories");

  PreprocessArgs pre;
  auto* s_pre = app.add_subcommand("preprocess", "Clean texts and carry spans onto the clean text");
  s_pre->add_option("--in", pre.in, "Doccano JSONL corpus")->required()->check(CLI::ExistingFile);
  s_pre->add_option("--out", pre.out, "Clean corpus ('-' for stdout)")->capture_default_str();
  s_pre->add_option("--maps", pre.maps, "Write offset maps (JSONL) here");
  s_pre->add_option("--passes", pre.passes,
                    "all, none or a list of nfc,collapse_spaces,dehyphenate,join_lines,bullets,tnm_spacing")
      ->capture_default_str();
  jobs_option(s_pre, pre.jobs);

  ConvertArgs conv;
  auto* s_conv = app.add_subcommand("convert", "Convert between Doccano spans and CoNLL tags");
  s_conv->add_option("--in", conv.in, "Input file")->required()->check(CLI::ExistingFile);
  s_conv->add_option("--out", conv.out, "Output file ('-' for stdout)")->capture_default_str();
  s_conv->add_option("--to", conv.to, "Target format")->required()->check(CLI::IsMember({"conll", "spans"}));

  TagArgs tag;
  auto* s_tag = app.add_subcommand("tag", "Dictionary tagging");
  s_tag->add_option("--dict", tag.dict, "Dictionary CSV")->required()->check(CLI::ExistingFile);
  s_tag->add_option("--in", tag.in, "Doccano JSONL corpus")->required()->check(CLI::ExistingFile);
  s_tag->add_option("--out", tag.out, "Predicted spans ('-' for stdout)")->capture_default_str();
  s_tag->add_option("--passes", tag.passes, "Preprocessing before matching")->capture_default_str();
  jobs_option(s_tag, tag.jobs);

  AggregateArgs agg;
  auto* s_agg = app.add_subcommand("aggregate", "Turn subtoken predictions into entities");
  s_agg->add_option("--preds", agg.preds, "Prediction interchange JSONL")->required()->check(CLI::ExistingFile);
  s_agg->add_option("--corpus", agg.corpus, "Annotated corpus the predictions cover")
      ->required()
      ->check(CLI::ExistingFile);
  s_agg->add_option("--out", agg.out, "Predicted entities ('-' for stdout)")->capture_default_str();
  s_agg->add_option("--metrics", agg.metrics, "Write word accuracy and loss (JSON) here");
  s_agg->add_option("--passes", agg.passes, "Passes that produced clean-coordinate predictions")
      ->capture_default_str();
  jobs_option(s_agg, agg.jobs);

  EvaluateArgs ev;
  auto* s_eval = app.add_subcommand("evaluate", "Strict entity evaluation into EVALDIR/evaluation.json");
  s_eval->add_option("--gold", ev.gold, "Gold corpus")->required()->check(CLI::ExistingFile);
  auto* o_pred = s_eval->add_option("--pred", ev.pred, "Predicted spans (Doccano JSONL)")->check(CLI::ExistingFile);
  auto* o_inter = s_eval->add_option("--interchange", ev.interchange, "Prediction interchange JSONL")
                      ->check(CLI::ExistingFile);
  o_pred->excludes(o_inter);
  s_eval->add_option("--word-metrics", ev.word_metrics, "Word accuracy and loss from aggregate")
      ->check(CLI::ExistingFile);
  s_eval->add_option("--out", ev.out, "Evaluation directory")->required();
  s_eval->add_option("--passes", ev.passes, "Passes for clean-coordinate predictions")->capture_default_str();
  jobs_option(s_eval, ev.jobs);

  CompareArgs cmp;
  auto* s_cmp = app.add_subcommand("compare", "Real, correct and incorrect entity counts per label");
  s_cmp->add_option("--gold", cmp.gold, "Gold corpus")->required()->check(CLI::ExistingFile);
  s_cmp->add_option("--pred", cmp.pred, "Predicted spans")->required()->check(CLI::ExistingFile);
  s_cmp->add_option("--format", cmp.format, "csv, md or txt")->capture_default_str();
  s_cmp->add_option("--out", cmp.out, "Output file ('-' for stdout)")->capture_default_str();

  ReportArgs rep;
  auto* s_rep = app.add_subcommand("report", "Render an evaluation as tables and chart data");
  s_rep->add_option("--in", rep.in, "EVALDIR or evaluation.json")->required()->check(CLI::ExistingPath);
  s_rep->add_option("--format", rep.format, "csv, md or txt")->capture_default_str();
  s_rep->add_option("--out", rep.out, "Output file ('-' for stdout)")->capture_default_str();
  s_rep->add_option("--charts", rep.charts, "Directory for chart data (CSV and JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*s_ingest) return run_ingest(ingest);
    if (*s_validate) return run_validate(val);
    if (*s_stats) return run_stats(stats);
    if (*s_split) return run_split(sp);
    if (*s_pre) return run_preprocess(pre);
    if (*s_conv) return run_convert(conv);
    if (*s_tag) return run_tag(tag);
    if (*s_agg) return run_aggregate(agg);
    if (*s_eval) {
      if (ev.pred.empty() && ev.interchange.empty()) {
        throw UsageError("evaluate needs --pred or --interchange");
      }
      return run_evaluate(ev);
    }
    if (*s_cmp) return run_compare(cmp);
    if (*s_rep) return run_report(rep);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
