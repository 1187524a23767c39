// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/ensemble.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "infominer/error.hpp"

namespace infominer {

std::vector<int> majority_vote(const PredictionSet& ps) {
  const std::size_t seeds = ps.votes.size();
  if (seeds == 0 || seeds % 2 == 0) {
    throw ScoringError("majority vote needs an odd number of seeds, got " +
                       std::to_string(seeds));
  }
  const std::size_t n = ps.ids.empty() ? ps.votes.front().size() : ps.ids.size();
  for (const auto& row : ps.votes) {
    if (row.size() != n) throw ScoringError("seed prediction rows differ in length from the id list");
  }
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ones = 0;
    for (const auto& row : ps.votes) ones += row[i] == 1 ? 1 : 0;
    out[i] = 2 * ones > seeds ? 1 : 0;
  }
  return out;
}

double f1(std::span<const int> gold, std::span<const int> pred, int positive) {
  if (gold.size() != pred.size()) {
    throw ScoringError("gold has " + std::to_string(gold.size()) + " entries, predictions " +
                       std::to_string(pred.size()));
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == positive, p = pred[i] == positive;
    tp += g && p;
    fp += !g && p;
    fn += g && !p;
  }
  const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double macro_f1(std::span<const int> gold, std::span<const int> pred) {
  return (f1(gold, pred, 0) + f1(gold, pred, 1)) / 2.0;
}

double mean_f1(std::span<const double> per_label) {
  if (per_label.empty()) return 0.0;
  double total = 0.0;
  for (double v : per_label) total += v;
  return total / static_cast<double>(per_label.size());
}

int PredictionTable::column_of(LabelId label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

void write_predictions(std::ostream& out, const PredictionTable& table) {
  out << "id";
  for (auto l : table.labels) out << '\t' << label_key(l);
  out << '\n';
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    out << table.ids[i];
    for (const auto& col : table.columns) out << '\t' << (col[i] == 1 ? "yes" : "no");
    out << '\n';
  }
}

PredictionTable read_predictions(std::istream& in) {
  PredictionTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) fields.push_back(cell);
    if (line.back() == '\t') fields.emplace_back();

    if (!have_header) {
      if (fields.empty() || fields[0] != "id") {
        throw DataError("prediction file header must start with 'id'", line_no);
      }
      for (std::size_t k = 1; k < fields.size(); ++k) {
        const auto label = parse_label(fields[k]);
        if (!label) throw DataError("unknown label column '" + fields[k] + "'", line_no, fields[k]);
        if (table.column_of(*label) >= 0) {
          throw DataError("duplicate label column '" + fields[k] + "'", line_no, fields[k]);
        }
        table.labels.push_back(*label);
      }
      table.columns.resize(table.labels.size());
      have_header = true;
      continue;
    }
    if (fields.size() != table.labels.size() + 1) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(table.labels.size() + 1) + " columns, found " +
                          std::to_string(fields.size()),
                      line_no);
    }
    table.ids.push_back(fields[0]);
    for (std::size_t k = 0; k < table.labels.size(); ++k) {
      const auto v = parse_label_value(fields[k + 1]);
      if (!v || *v == LabelValue::Missing) {
        throw DataError("line " + std::to_string(line_no) + ": prediction must be yes or no, got '" +
                            fields[k + 1] + "'",
                        line_no, std::string(label_key(table.labels[k])));
      }
      table.columns[k].push_back(*v == LabelValue::Yes ? 1 : 0);
    }
  }
  if (!have_header) throw DataError("prediction file is empty");
  return table;
}

void save_predictions(const std::string& path, const PredictionTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_predictions(out, table);
}

PredictionTable load_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_predictions(in);
}

PredictionTable vote_tables(const std::vector<PredictionTable>& per_seed) {
  if (per_seed.empty()) throw ScoringError("no prediction files to vote over");
  const auto& first = per_seed.front();
  for (std::size_t s = 1; s < per_seed.size(); ++s) {
    if (per_seed[s].ids != first.ids) {
      throw ScoringError("prediction file " + std::to_string(s + 1) +
                         " lists different instance ids than file 1");
    }
    if (per_seed[s].labels != first.labels) {
      throw ScoringError("prediction file " + std::to_string(s + 1) +
                         " has different label columns than file 1");
    }
  }
  PredictionTable fused;
  fused.ids = first.ids;
  fused.labels = first.labels;
  for (std::size_t k = 0; k < first.labels.size(); ++k) {
    PredictionSet ps;
    ps.label = first.labels[k];
    ps.ids = first.ids;
    for (const auto& t : per_seed) ps.votes.push_back(t.columns[k]);
    fused.columns.push_back(majority_vote(ps));
  }
  return fused;
}

PredictionTable merge_tables(const std::vector<PredictionTable>& tables) {
  if (tables.empty()) throw ScoringError("no prediction tables to merge");
  std::vector<std::pair<LabelId, std::vector<int>>> cols;
  for (const auto& t : tables) {
    if (t.ids != tables.front().ids) {
      throw ScoringError("cannot merge prediction tables over different instance ids");
    }
    for (std::size_t k = 0; k < t.labels.size(); ++k) {
      for (const auto& c : cols) {
        if (c.first == t.labels[k]) {
          throw ScoringError("label " + std::string(label_key(t.labels[k])) +
                             " appears in more than one table");
        }
      }
      cols.emplace_back(t.labels[k], t.columns[k]);
    }
  }
  std::sort(cols.begin(), cols.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  PredictionTable merged;
  merged.ids = tables.front().ids;
  for (auto& [l, c] : cols) {
    merged.labels.push_back(l);
    merged.columns.push_back(std::move(c));
  }
  return merged;
}

ScoreReport score(const Corpus& gold, const PredictionTable& predictions) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < predictions.ids.size(); ++i) row_of.emplace(predictions.ids[i], i);

  ScoreReport report;
  std::vector<double> values;
  for (auto label : kAllLabels) {
    const int col = predictions.column_of(label);
    if (col < 0) continue;
    std::vector<int> g, p;
    for (const auto& inst : gold.instances) {
      const auto v = inst.label(label);
      if (v == LabelValue::Missing) continue;
      const auto it = row_of.find(inst.id);
      if (it == row_of.end()) {
        throw ScoringError("no prediction for id '" + inst.id + "' on label " +
                           std::string(label_key(label)));
      }
      g.push_back(v == LabelValue::Yes ? 1 : 0);
      p.push_back(predictions.columns[static_cast<std::size_t>(col)][it->second]);
    }
    report.labels.push_back({label, macro_f1(g, p), g.size()});
    values.push_back(report.labels.back().macro_f1);
  }
  report.mean_f1 = mean_f1(values);
  return report;
}

PredictionTable random_baseline(const Corpus& gold, Rng& rng) {
  PredictionTable table;
  table.labels.assign(kAllLabels.begin(), kAllLabels.end());
  table.columns.assign(kNumLabels, {});
  for (const auto& inst : gold.instances) {
    table.ids.push_back(inst.id);
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      table.columns[k].push_back(static_cast<int>(rng.uniform_index(2)));
    }
  }
  return table;
}

std::string report_tsv(const ScoreReport& report, const std::string& system) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  std::string out = "system";
  for (auto l : kAllLabels) out += "\tQ" + std::to_string(index_of(l) + 1);
  out += "\tMean\n" + system;
  for (auto l : kAllLabels) {
    const auto it = std::find_if(report.labels.begin(), report.labels.end(),
                                 [&](const LabelScore& s) { return s.label == l; });
    out += "\t" + (it == report.labels.end() ? std::string("-") : fmt(it->macro_f1));
  }
  out += "\t" + fmt(report.mean_f1) + "\n";
  return out;
}

nlohmann::json report_json(const ScoreReport& report, const std::string& system) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& s : report.labels) {
    labels[std::string(label_key(s.label))] = {{"macro_f1", s.macro_f1},
                                               {"n_scored", s.n_scored},
                                               {"name", std::string(label_name(s.label))}};
  }
  return {{"system", system}, {"labels", labels}, {"mean_f1", report.mean_f1}};
}

}  // namespace infominer
