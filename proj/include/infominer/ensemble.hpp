// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "infominer/corpus.hpp"
#include "infominer/rng.hpp"
#include "json.hpp"

namespace infominer {

/// Per-seed predicted classes for one label, seeds x instances.
struct PredictionSet {
  LabelId label = LabelId::Q1;
  std::vector<std::string> ids;
  std::vector<std::vector<int>> votes;
};

/// Class predicted by a strict majority of seeds for each instance.
/// Throws ScoringError for an even (or zero) seed count or ragged rows.
std::vector<int> majority_vote(const PredictionSet& ps);

/// F1 of class `positive`; every 0/0 ratio is taken as 0.
double f1(std::span<const int> gold, std::span<const int> pred, int positive);

/// Average of the class-0 and class-1 F1.
double macro_f1(std::span<const int> gold, std::span<const int> pred);

double mean_f1(std::span<const double> per_label);

/// Predictions for a subset of labels over a shared list of instance ids.
/// columns[k] holds the classes for labels[k], aligned with ids.
struct PredictionTable {
  std::vector<std::string> ids;
  std::vector<LabelId> labels;
  std::vector<std::vector<int>> columns;

  /// Index of `label` in labels, or -1.
  int column_of(LabelId label) const;
};

/// TSV with header `id` then one column per label ("q1".."q7", in label
/// order), cells "yes"/"no".
void write_predictions(std::ostream& out, const PredictionTable& table);
PredictionTable read_predictions(std::istream& in);
void save_predictions(const std::string& path, const PredictionTable& table);
PredictionTable load_predictions(const std::string& path);

/// Majority vote of per-seed tables column by column. All tables must carry
/// identical ids and labels; throws ScoringError otherwise.
PredictionTable vote_tables(const std::vector<PredictionTable>& per_seed);

/// Concatenates the label columns of tables over the same ids.
PredictionTable merge_tables(const std::vector<PredictionTable>& tables);

struct LabelScore {
  LabelId label = LabelId::Q1;
  double macro_f1 = 0.0;
  std::size_t n_scored = 0;
};

/// Scored labels in Q1..Q7 order and their arithmetic mean.
struct ScoreReport {
  std::vector<LabelScore> labels;
  double mean_f1 = 0.0;
};

/// Macro F1 for each label present in `predictions`, over gold instances
/// whose label is not Missing. Throws ScoringError naming the id and label
/// when a scored instance has no prediction.
ScoreReport score(const Corpus& gold, const PredictionTable& predictions);

/// Uniform independent class draws for every (instance, label), drawn
/// instance by instance in label order.
PredictionTable random_baseline(const Corpus& gold, Rng& rng);

/// Table-style row: header `system<TAB>Q1..Q7<TAB>Mean`, values rounded to
/// three decimals, "-" for labels that were not scored.
std::string report_tsv(const ScoreReport& report, const std::string& system);
/// Full-precision JSON variant.
nlohmann::json report_json(const ScoreReport& report, const std::string& system);

}  // namespace infominer
