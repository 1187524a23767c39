// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "infominer/checkpoint.hpp"
#include "infominer/config_json.hpp"
#include "infominer/error.hpp"
#include "infominer/sampling.hpp"
#include "infominer/tokenizer.hpp"

namespace infominer {

namespace fs = std::filesystem;

void PipelineConfig::validate(bool check_paths) const {
  if (train_path.empty()) throw ConfigError("pipeline config: 'train' path is required");
  if (seeds.empty() || seeds.size() % 2 == 0) {
    throw ConfigError("pipeline config: seed list must have odd length, got " +
                      std::to_string(seeds.size()));
  }
  if (labels.empty()) throw ConfigError("pipeline config: label list is empty");
  if (jobs == 0) throw ConfigError("pipeline config: jobs must be positive");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw ConfigError("pipeline config: split_ratio must lie in (0, 1)");
  }
  training.validate();
  if (check_paths) {
    for (const auto& p : {train_path, dev_path}) {
      if (!p.empty() && !fs::exists(p)) throw IoError("data file not found: '" + p + "'");
    }
  }
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  static const std::vector<std::string> known = {
      "train", "dev", "columns", "language", "model", "training", "seeds",
      "labels", "output_dir", "jobs", "min_frequency", "split_ratio"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown pipeline config key '" + key + "'");
    }
  }
  PipelineConfig c;
  try {
    c.train_path = j.value("train", c.train_path);
    c.dev_path = j.value("dev", c.dev_path);
    if (j.contains("columns")) merge_json(j.at("columns"), c.columns);
    if (j.contains("language")) c.language = parse_language(j.at("language").get<std::string>());
    if (j.contains("model")) merge_json(j.at("model"), c.model);
    if (j.contains("training")) merge_json(j.at("training"), c.training);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("labels")) {
      c.labels.clear();
      for (const auto& l : j.at("labels")) {
        const auto id = parse_label(l.get<std::string>());
        if (!id) throw ConfigError("unknown label '" + l.get<std::string>() + "'");
        c.labels.push_back(*id);
      }
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", c.jobs);
    c.min_frequency = j.value("min_frequency", c.min_frequency);
    c.split_ratio = j.value("split_ratio", c.split_ratio);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad pipeline config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const PipelineConfig& c) {
  std::vector<std::string> labels;
  for (auto l : c.labels) labels.emplace_back(label_key(l));
  return {{"train", c.train_path},
          {"dev", c.dev_path},
          {"columns", to_json(c.columns)},
          {"language", std::string(language_tag(c.language))},
          {"model", to_json(c.model)},
          {"training", to_json(c.training)},
          {"seeds", c.seeds},
          {"labels", labels},
          {"output_dir", c.output_dir},
          {"jobs", c.jobs},
          {"min_frequency", c.min_frequency},
          {"split_ratio", c.split_ratio}};
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return pipeline_config_from_json(j);
}

void apply_env_overrides(PipelineConfig& c) {
  if (const char* dir = std::getenv("INFOMINER_OUTPUT_DIR"); dir && *dir) c.output_dir = dir;
  if (const char* jobs = std::getenv("INFOMINER_JOBS"); jobs && *jobs) {
    char* end = nullptr;
    const long n = std::strtol(jobs, &end, 10);
    if (*end != '\0' || n <= 0) {
      throw ConfigError("INFOMINER_JOBS must be a positive integer, got '" + std::string(jobs) + "'");
    }
    c.jobs = static_cast<std::size_t>(n);
  }
}

JobPaths job_paths(const fs::path& output_dir, LabelId label, std::uint64_t seed) {
  const fs::path dir = output_dir / std::string(label_key(label));
  const std::string stem = "seed" + std::to_string(seed);
  return {dir / (stem + ".imck"), dir / (stem + ".vocab"), dir / (stem + ".history.jsonl"),
          dir / (stem + ".pred.tsv")};
}

fs::path fused_path(const fs::path& output_dir, LabelId label) {
  return output_dir / std::string(label_key(label)) / "fused.tsv";
}

fs::path report_path(const fs::path& output_dir) { return output_dir / "report.tsv"; }

fs::path vocab_path_for(const fs::path& checkpoint) {
  fs::path p = checkpoint;
  return p.replace_extension(".vocab");
}

std::vector<DataSummary> cmd_validate(const PipelineConfig& config) {
  config.validate(true);
  std::vector<DataSummary> out;
  std::vector<std::string> paths = {config.train_path};
  if (!config.dev_path.empty()) paths.push_back(config.dev_path);
  for (const auto& path : paths) {
    const auto corpus = load_tsv_file(path, config.columns, config.language);
    DataSummary s{path, corpus.size(), {}};
    for (auto label : kAllLabels) {
      s.labels.push_back({label, class_counts(binary_view(corpus, label)),
                          missing_count(corpus, label)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_summary(const std::vector<DataSummary>& summaries) {
  std::ostringstream os;
  for (const auto& s : summaries) {
    os << s.path << ": " << s.instances << " instances\n";
    os << "label\tno\tyes\tmissing\n";
    for (const auto& l : s.labels) {
      os << label_key(l.label) << '\t' << l.counts.n_class0 << '\t' << l.counts.n_class1 << '\t'
         << l.missing << '\n';
    }
  }
  return os.str();
}

TrainJobResult cmd_train(const PipelineConfig& config, LabelId label, std::uint64_t seed) {
  config.validate(true);
  const auto corpus = load_tsv_file(config.train_path, config.columns, config.language);
  const auto view = binary_view(corpus, label);

  Rng undersample_rng = make_rng(seed, RngStream::Undersample);
  const auto balanced = undersample(view, undersample_rng);
  Rng split_rng = make_rng(seed, RngStream::Split);
  const auto parts = split(balanced, split_rng, config.split_ratio);

  std::vector<std::string> texts;
  for (const auto& item : parts.train.items) texts.push_back(item.text);
  const Vocab vocab = build_vocab(texts, config.min_frequency);

  ModelConfig mc = config.model;
  if (mc.vocab_size == 0) mc.vocab_size = vocab.size();
  TrainConfig tc = config.training;
  tc.seed = seed;

  Rng init_rng = make_rng(seed, RngStream::Init);
  auto result = train(init_model<float>(mc, init_rng), parts.train, parts.validation, vocab, tc);

  TrainJobResult out{job_paths(config.output_dir, label, seed), std::move(result.history),
                     result.best_validation_loss};
  fs::create_directories(out.paths.checkpoint.parent_path());
  save_checkpoint(out.paths.checkpoint.string(), result.model, vocab.hash(), tc,
                  result.best_validation_loss, std::string(label_key(label)));
  vocab.save(out.paths.vocab.string());
  std::ofstream hist(out.paths.history, std::ios::binary | std::ios::trunc);
  if (!hist) throw IoError("cannot write '" + out.paths.history.string() + "'");
  hist << history_to_jsonl(out.history);
  return out;
}

PredictionTable cmd_predict(const std::string& checkpoint, const std::string& data_path,
                            const std::string& out_path, const ColumnMap& columns,
                            const std::string& vocab) {
  const auto ckpt = load_checkpoint(checkpoint);
  const auto label = parse_label(ckpt.label);
  if (!label) throw CheckpointError("checkpoint '" + checkpoint + "' does not record its label");
  const std::string vpath = vocab.empty() ? vocab_path_for(checkpoint).string() : vocab;
  const Vocab v = Vocab::load(vpath);
  if (v.hash() != ckpt.vocab_hash) {
    throw CheckpointError("vocabulary '" + vpath + "' does not match checkpoint '" + checkpoint + "'");
  }

  ColumnMap schema = columns;
  schema.allow_missing_label_columns = true;
  const auto corpus = load_tsv_file(data_path, schema);

  PredictionTable table;
  table.labels = {*label};
  table.columns.resize(1);
  constexpr std::size_t kPredictBatch = 32;
  Rng unused(0);
  for (std::size_t start = 0; start < corpus.size(); start += kPredictBatch) {
    const std::size_t n = std::min(kPredictBatch, corpus.size() - start);
    std::vector<TokenSequence> seqs;
    for (std::size_t i = start; i < start + n; ++i) {
      seqs.push_back(encode(corpus.instances[i].text, v, ckpt.model_config.max_seq_len));
      table.ids.push_back(corpus.instances[i].id);
    }
    for (const auto& p : classify(ckpt.model, pad_batch(seqs), false, unused)) {
      table.columns[0].push_back(p.predicted_class);
    }
  }
  if (!out_path.empty()) {
    fs::path parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    save_predictions(out_path, table);
  }
  return table;
}

PredictionTable cmd_vote(const std::vector<std::string>& prediction_files,
                         const std::string& out_path) {
  std::vector<PredictionTable> tables;
  for (const auto& f : prediction_files) tables.push_back(load_predictions(f));
  auto fused = vote_tables(tables);
  if (!out_path.empty()) save_predictions(out_path, fused);
  return fused;
}

ScoreReport cmd_score(const std::string& gold_path,
                      const std::vector<std::string>& prediction_files,
                      const ColumnMap& columns) {
  const auto gold = load_tsv_file(gold_path, columns);
  std::vector<PredictionTable> tables;
  for (const auto& f : prediction_files) tables.push_back(load_predictions(f));
  return score(gold, merge_tables(tables));
}

PredictionTable cmd_baseline(const std::string& gold_path, std::uint64_t seed,
                             const std::string& out_path, const ColumnMap& columns) {
  ColumnMap schema = columns;
  schema.allow_missing_label_columns = true;
  const auto gold = load_tsv_file(gold_path, schema);
  Rng rng = make_rng(seed, RngStream::Baseline);
  auto table = random_baseline(gold, rng);
  if (!out_path.empty()) save_predictions(out_path, table);
  return table;
}

PipelineResult cmd_pipeline(const PipelineConfig& config) {
  config.validate(true);
  struct Job {
    LabelId label;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto label : config.labels)
    for (auto seed : config.seeds) jobs.push_back({label, seed});

  const std::string& scoring = config.scoring_path();
  std::vector<TrainJobResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = cmd_train(config, jobs[i].label, jobs[i].seed);
        cmd_predict(results[i].paths.checkpoint.string(), scoring,
                    results[i].paths.predictions.string(), config.columns);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(config.jobs, jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<std::string> fused_files;
  for (auto label : config.labels) {
    std::vector<std::string> files;
    for (auto seed : config.seeds) {
      files.push_back(job_paths(config.output_dir, label, seed).predictions.string());
    }
    fused_files.push_back(fused_path(config.output_dir, label).string());
    cmd_vote(files, fused_files.back());
  }

  PipelineResult out{cmd_score(scoring, fused_files, config.columns), std::move(results)};
  const fs::path report = report_path(config.output_dir);
  {
    std::ofstream tsv(report, std::ios::binary | std::ios::trunc);
    if (!tsv) throw IoError("cannot write '" + report.string() + "'");
    tsv << report_tsv(out.report, "infominer");
  }
  {
    fs::path json_path = report;
    std::ofstream js(json_path.replace_extension(".json"), std::ios::binary | std::ios::trunc);
    js << report_json(out.report, "infominer").dump(2) << '\n';
  }
  return out;
}

}  // namespace infominer
