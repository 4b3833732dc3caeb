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

// Table rendering (CSV, aligned text, Markdown) and chart data for the
// hit/miss pie and the real/correct/incorrect grouped bars.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "onconer/corpus.hpp"
#include "onconer/error.hpp"
#include "onconer/evaluate.hpp"

namespace onconer {

enum class TableFormat { csv, text, markdown };

inline TableFormat parse_table_format(std::string_view s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "txt" || s == "text") return TableFormat::text;
  if (s == "md" || s == "markdown") return TableFormat::markdown;
  throw UsageError("unknown table format '" + std::string(s) + "'");
}

inline std::string fixed(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string fixed_or_na(const std::optional<double>& v, int decimals = 4) {
  return v ? fixed(*v, decimals) : "n/a";
}

// A header row plus data rows. Column 0 is left aligned, the rest right.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string render(const Table& t, TableFormat format) {
  std::ostringstream out;
  switch (format) {
    case TableFormat::csv: {
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
      };
      line(t.header);
      for (const auto& r : t.rows) line(r);
      break;
    }
    case TableFormat::text: {
      std::vector<std::size_t> width(t.header.size());
      for (std::size_t i = 0; i < width.size(); ++i) {
        width[i] = t.header[i].size();
        for (const auto& r : t.rows) width[i] = std::max(width[i], r[i].size());
      }
      auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          const std::string pad(width[i] - cells[i].size(), ' ');
          if (i > 0) s += "  ";
          s += i == 0 ? cells[i] + pad : pad + cells[i];
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out << s << '\n';
      };
      line(t.header);
      std::size_t total = 0;
      for (std::size_t w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
      for (const auto& r : t.rows) line(r);
      break;
    }
    case TableFormat::markdown: {
      auto line = [&](const std::vector<std::string>& cells) {
        out << '|';
        for (const auto& c : cells) out << ' ' << c << " |";
        out << '\n';
      };
      line(t.header);
      out << '|';
      for (std::size_t i = 0; i < t.header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
      out << '\n';
      for (const auto& r : t.rows) line(r);
      break;
    }
  }
  return out.str();
}

inline Table per_label_table(const std::vector<LabelMetrics>& metrics) {
  Table t{{"Label", "F1", "Precision", "Recall", "Support"}, {}};
  for (const auto& m : metrics) {
    t.rows.push_back({std::string(label_name(m.label)), fixed(m.f1), fixed(m.precision),
                      fixed(m.recall), std::to_string(m.support)});
  }
  return t;
}

inline Table global_table(const GlobalMetrics& g) {
  return {{"Set", "Accuracy", "F1", "Precision", "Recall", "Loss"},
          {{"Global", fixed_or_na(g.accuracy), fixed(g.f1), fixed(g.precision), fixed(g.recall),
            fixed_or_na(g.loss)}}};
}

inline Table comparison_table(const ComparisonReport& r) {
  Table t{{"Entity", "Real", "Correct", "Incorrect", "Extra"}, {}};
  for (const auto& row : r.rows) {
    t.rows.push_back({row.category, std::to_string(row.real), std::to_string(row.correct),
                      std::to_string(row.incorrect), std::to_string(row.extra_detected)});
  }
  return t;
}

inline Table distribution_table(const LabelDistribution& d) {
  Table t{{"Set"}, {}};
  for (Label l : kTableOrder) t.header.emplace_back(label_name(l));
  auto row = [&](const std::string& name, const LabelCounts& c) {
    std::vector<std::string> cells{name};
    for (Label l : kTableOrder) cells.push_back(std::to_string(c[label_index(l)]));
    t.rows.push_back(std::move(cells));
  };
  for (const auto& [name, counts] : d.splits) row(name, counts);
  row("complete", d.complete);
  return t;
}

// Hit percentage to one decimal, e.g. "97.5".
inline std::string percent_from_permille(std::uint64_t permille) {
  return std::to_string(permille / 10) + "." + std::to_string(permille % 10);
}

// All evaluation tables in one stream: per label, global, comparison, then
// a summary. Sections are separated by a blank line; text and Markdown
// sections carry a title.
inline std::string render_tables(const Evaluation& e, TableFormat format) {
  std::ostringstream out;
  auto section = [&](std::string_view title, const Table& t, bool first = false) {
    if (!first) out << '\n';
    if (format == TableFormat::text) out << title << '\n';
    if (format == TableFormat::markdown) out << "### " << title << "\n\n";
    out << render(t, format);
  };
  section("Per-label metrics", per_label_table(e.per_label), true);
  section("Global metrics", global_table(e.global));
  section("Comparison with annotations", comparison_table(e.comparison));

  const auto permille = e.comparison.hit_permille();
  Table summary{{"Metric", "Value"},
                {{"tp", std::to_string(e.global.counts.tp)},
                 {"fp", std::to_string(e.global.counts.fp)},
                 {"fn", std::to_string(e.global.counts.fn)},
                 {"hits_percent", permille ? percent_from_permille(*permille) : "n/a"},
                 {"misses_percent", permille ? percent_from_permille(1000 - *permille) : "n/a"}}};
  section("Summary", summary);
  return out.str();
}

// ---------------------------------------------------------------------------
// Chart data

struct ChartSeries {
  enum class Kind { pie, grouped_bar };
  Kind kind = Kind::pie;
  std::string title;
  std::vector<std::string> categories;
  std::vector<std::pair<std::string, std::vector<double>>> series;
};

struct ChartData {
  std::vector<ChartSeries> charts;
  std::vector<std::string> notices;
};

inline ChartData emit_chart_data(const ComparisonReport& r) {
  ChartData out;
  if (const auto permille = r.hit_permille()) {
    ChartSeries pie{ChartSeries::Kind::pie, "Distribution of hits and misses", {"Hits", "Misses"}, {}};
    pie.series.push_back({"percent", {static_cast<double>(*permille) / 10.0,
                                      static_cast<double>(1000 - *permille) / 10.0}});
    out.charts.push_back(std::move(pie));
  } else {
    out.notices.push_back("no predictions: hit fraction undefined, pie chart omitted");
  }
  ChartSeries bar{ChartSeries::Kind::grouped_bar, "Detected entities versus annotations", {}, {}};
  std::vector<double> real, correct, incorrect;
  for (const auto& row : r.rows) {
    bar.categories.push_back(row.category);
    real.push_back(static_cast<double>(row.real));
    correct.push_back(static_cast<double>(row.correct));
    incorrect.push_back(static_cast<double>(row.incorrect));
  }
  bar.series = {{"Real entity", real},
                {"Correct predicted entity", correct},
                {"Incorrect predicted entity", incorrect}};
  out.charts.push_back(std::move(bar));
  return out;
}

inline std::string chart_value(const ChartSeries& c, double v) {
  return c.kind == ChartSeries::Kind::pie ? fixed(v, 1) : std::to_string(static_cast<long long>(v));
}

// category,<series 1>,<series 2>,...
inline std::string chart_csv(const ChartSeries& c) {
  std::ostringstream out;
  out << "category";
  for (const auto& [name, values] : c.series) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < c.categories.size(); ++i) {
    out << c.categories[i];
    for (const auto& [name, values] : c.series) out << ',' << chart_value(c, values[i]);
    out << '\n';
  }
  return out.str();
}

inline std::string charts_json(const ChartData& data) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : data.charts) {
    nlohmann::ordered_json j;
    j["kind"] = c.kind == ChartSeries::Kind::pie ? "pie" : "grouped_bar";
    j["title"] = c.title;
    j["categories"] = c.categories;
    nlohmann::ordered_json series = nlohmann::ordered_json::object();
    for (const auto& [name, values] : c.series) {
      // Keep the printed precision: one decimal for percentages, integers for counts.
      nlohmann::ordered_json vs = nlohmann::ordered_json::array();
      for (double v : values) vs.push_back(nlohmann::ordered_json::parse(chart_value(c, v)));
      series[name] = std::move(vs);
    }
    j["series"] = std::move(series);
    arr.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["charts"] = std::move(arr);
  root["notices"] = data.notices;
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Evaluation (de)serialization: the file `evaluate` writes and `report` reads.

inline nlohmann::ordered_json to_json(const Evaluation& e) {
  nlohmann::ordered_json j;
  auto labels = nlohmann::ordered_json::array();
  for (const auto& m : e.per_label) {
    labels.push_back({{"label", label_name(m.label)}, {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn},
                      {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                      {"support", m.support}});
  }
  j["per_label"] = std::move(labels);
  nlohmann::ordered_json g;
  g["accuracy"] = e.global.accuracy ? nlohmann::ordered_json(*e.global.accuracy) : nullptr;
  g["precision"] = e.global.precision;
  g["recall"] = e.global.recall;
  g["f1"] = e.global.f1;
  g["loss"] = e.global.loss ? nlohmann::ordered_json(*e.global.loss) : nullptr;
  g["tp"] = e.global.counts.tp;
  g["fp"] = e.global.counts.fp;
  g["fn"] = e.global.counts.fn;
  j["global"] = std::move(g);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : e.comparison.rows) {
    rows.push_back({{"category", r.category}, {"real", r.real}, {"correct", r.correct},
                    {"incorrect", r.incorrect}, {"extra_detected", r.extra_detected}});
  }
  j["comparison"] = std::move(rows);
  return j;
}

inline Evaluation evaluation_from_json(const nlohmann::json& j) {
  try {
    Evaluation e;
    for (const auto& m : j.at("per_label")) {
      auto label = parse_label(m.at("label").get<std::string>());
      if (!label) throw DataError("unknown label in evaluation file");
      LabelMetrics lm;
      lm.label = *label;
      lm.tp = m.at("tp").get<std::size_t>();
      lm.fp = m.at("fp").get<std::size_t>();
      lm.fn = m.at("fn").get<std::size_t>();
      lm.precision = m.at("precision").get<double>();
      lm.recall = m.at("recall").get<double>();
      lm.f1 = m.at("f1").get<double>();
      lm.support = m.at("support").get<std::size_t>();
      e.per_label.push_back(lm);
    }
    const auto& g = j.at("global");
    if (!g.at("accuracy").is_null()) e.global.accuracy = g.at("accuracy").get<double>();
    if (!g.at("loss").is_null()) e.global.loss = g.at("loss").get<double>();
    e.global.precision = g.at("precision").get<double>();
    e.global.recall = g.at("recall").get<double>();
    e.global.f1 = g.at("f1").get<double>();
    e.global.counts = {g.at("tp").get<std::size_t>(), g.at("fp").get<std::size_t>(),
                       g.at("fn").get<std::size_t>()};
    for (const auto& r : j.at("comparison")) {
      e.comparison.rows.push_back({r.at("category").get<std::string>(),
                                   r.at("real").get<std::size_t>(),
                                   r.at("correct").get<std::size_t>(),
                                   r.at("incorrect").get<std::size_t>(),
                                   r.at("extra_detected").get<std::size_t>()});
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("invalid evaluation file: ") + ex.what());
  }
}

}  // namespace onconer
