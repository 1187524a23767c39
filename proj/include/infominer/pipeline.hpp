// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "infominer/corpus.hpp"
#include "infominer/encoder.hpp"
#include "infominer/ensemble.hpp"
#include "infominer/trainer.hpp"
#include "json.hpp"

namespace infominer {

/// Everything one run needs. A model vocab_size of 0 means "size of the
/// vocabulary built for each job".
struct PipelineConfig {
  std::string train_path;
  std::string dev_path;  // empty: score on the training file
  ColumnMap columns;
  Language language = Language::Other;
  ModelConfig model;
  TrainConfig training;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<LabelId> labels = {kAllLabels.begin(), kAllLabels.end()};
  std::string output_dir = "infominer-out";
  std::size_t jobs = 1;
  std::size_t min_frequency = 1;
  double split_ratio = 0.8;

  /// Throws ConfigError; with `check_paths` also IoError for missing files.
  void validate(bool check_paths) const;
  const std::string& scoring_path() const { return dev_path.empty() ? train_path : dev_path; }
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& c);
PipelineConfig load_pipeline_config(const std::string& path);

/// INFOMINER_OUTPUT_DIR and INFOMINER_JOBS, when set.
void apply_env_overrides(PipelineConfig& c);

/// File names used under the output directory.
struct JobPaths {
  std::filesystem::path checkpoint;
  std::filesystem::path vocab;
  std::filesystem::path history;
  std::filesystem::path predictions;
};

JobPaths job_paths(const std::filesystem::path& output_dir, LabelId label, std::uint64_t seed);
std::filesystem::path fused_path(const std::filesystem::path& output_dir, LabelId label);
/// report.tsv; report.json sits next to it.
std::filesystem::path report_path(const std::filesystem::path& output_dir);

/// Vocabulary file expected next to a checkpoint (same stem, .vocab).
std::filesystem::path vocab_path_for(const std::filesystem::path& checkpoint);

struct LabelSummary {
  LabelId label = LabelId::Q1;
  ClassCounts counts;
  std::size_t missing = 0;
};

struct DataSummary {
  std::string path;
  std::size_t instances = 0;
  std::vector<LabelSummary> labels;
};

/// Loads the configured data files and tallies classes per label.
std::vector<DataSummary> cmd_validate(const PipelineConfig& config);
std::string format_summary(const std::vector<DataSummary>& summaries);

struct TrainJobResult {
  JobPaths paths;
  TrainHistory history;
  double best_validation_loss = 0.0;
};

/// undersample -> split -> vocabulary from the train portion -> init ->
/// train, then writes checkpoint, vocabulary and history (JSON lines).
TrainJobResult cmd_train(const PipelineConfig& config, LabelId label, std::uint64_t seed);

/// Classifies every instance of `data_path` with the checkpoint's label.
/// `vocab` defaults to vocab_path_for(checkpoint).
PredictionTable cmd_predict(const std::string& checkpoint, const std::string& data_path,
                            const std::string& out_path, const ColumnMap& columns,
                            const std::string& vocab = {});

PredictionTable cmd_vote(const std::vector<std::string>& prediction_files,
                         const std::string& out_path);

ScoreReport cmd_score(const std::string& gold_path,
                      const std::vector<std::string>& prediction_files,
                      const ColumnMap& columns);

PredictionTable cmd_baseline(const std::string& gold_path, std::uint64_t seed,
                             const std::string& out_path, const ColumnMap& columns);

struct PipelineResult {
  ScoreReport report;
  std::vector<TrainJobResult> jobs;
};

/// Every (label, seed) job, then per-label votes and a score of the fused
/// predictions on the scoring file. Jobs run on `config.jobs` threads;
/// results do not depend on the thread count.
PipelineResult cmd_pipeline(const PipelineConfig& config);

}  // namespace infominer
