// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: validate | train | predict | vote | score |
// baseline | pipeline. Precedence for settings is flags > environment >
// config file > built-in defaults.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infominer/error.hpp"
#include "infominer/pipeline.hpp"

namespace {

using namespace infominer;

struct Overrides {
  std::string config_path;
  std::string train_path;
  std::string dev_path;
  std::string output_dir;
  std::size_t jobs = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> labels;
  std::optional<double> learning_rate;
  std::optional<std::size_t> epochs;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "Pipeline config (JSON)");
  cmd->add_option("--train", o.train_path, "Training TSV");
  cmd->add_option("--dev", o.dev_path, "Development TSV used for scoring");
  cmd->add_option("-o,--output-dir", o.output_dir, "Output directory");
  cmd->add_option("-j,--jobs", o.jobs, "Concurrent (label, seed) jobs");
  cmd->add_option("--seeds", o.seeds, "Seed list (odd length)");
  cmd->add_option("--labels", o.labels, "Label subset, e.g. q1 q3");
  cmd->add_option("--lr", o.learning_rate, "Learning rate");
  cmd->add_option("--epochs", o.epochs, "Training epochs");
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig c = o.config_path.empty() ? PipelineConfig{} : load_pipeline_config(o.config_path);
  apply_env_overrides(c);
  if (!o.train_path.empty()) c.train_path = o.train_path;
  if (!o.dev_path.empty()) c.dev_path = o.dev_path;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (o.jobs) c.jobs = o.jobs;
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (!o.labels.empty()) {
    c.labels.clear();
    for (const auto& l : o.labels) {
      const auto id = parse_label(l);
      if (!id) throw ConfigError("unknown label '" + l + "'");
      c.labels.push_back(*id);
    }
  }
  if (o.learning_rate) c.training.learning_rate = *o.learning_rate;
  if (o.epochs) c.training.epochs = *o.epochs;
  return c;
}

ColumnMap columns_from(const std::string& config_path) {
  return config_path.empty() ? ColumnMap{} : load_pipeline_config(config_path).columns;
}

LabelId require_label(const std::string& text) {
  const auto id = parse_label(text);
  if (!id) throw ConfigError("unknown label '" + text + "'");
  return *id;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"InfoMiner: per-label transformer classifiers for COVID-19 tweet properties"};
  app.require_subcommand(1);

  Overrides o;

  auto* validate = app.add_subcommand("validate", "Parse data and print per-label class counts");
  add_config_flags(validate, o);

  std::string label_text;
  std::uint64_t seed = 1;
  auto* train = app.add_subcommand("train", "Train one (label, seed) model");
  add_config_flags(train, o);
  train->add_option("-l,--label", label_text, "Label (q1..q7)")->required();
  train->add_option("-s,--seed", seed, "Master seed");

  std::string checkpoint, data, out, vocab;
  auto* predict = app.add_subcommand("predict", "Classify a TSV with one checkpoint");
  predict->add_option("-c,--config", o.config_path, "Pipeline config for column names");
  predict->add_option("-m,--checkpoint", checkpoint, "Checkpoint file")->required();
  predict->add_option("--vocab", vocab, "Vocabulary file (default: next to checkpoint)");
  predict->add_option("-d,--data", data, "Input TSV")->required();
  predict->add_option("--out", out, "Output prediction TSV")->required();

  std::vector<std::string> files;
  auto* vote = app.add_subcommand("vote", "Majority vote over per-seed prediction files");
  vote->add_option("--out", out, "Fused prediction TSV")->required();
  vote->add_option("files", files, "Per-seed prediction files")->required();

  std::string gold, json_out, system = "infominer";
  auto* score = app.add_subcommand("score", "Per-label macro F1 and mean F1");
  score->add_option("-c,--config", o.config_path, "Pipeline config for column names");
  score->add_option("-g,--gold", gold, "Gold TSV")->required();
  score->add_option("predictions", files, "Prediction files")->required();
  score->add_option("--json", json_out, "Also write the JSON report here");
  score->add_option("--system", system, "Row name in the report");

  auto* baseline = app.add_subcommand("baseline", "Uniform random predictions for a gold file");
  baseline->add_option("-c,--config", o.config_path, "Pipeline config for column names");
  baseline->add_option("-g,--gold", gold, "Gold TSV")->required();
  baseline->add_option("-s,--seed", seed, "Seed");
  baseline->add_option("--out", out, "Output prediction TSV")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Train, predict, vote and score every label");
  add_config_flags(pipeline, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*validate) {
      std::cout << format_summary(cmd_validate(resolve(o)));
    } else if (*train) {
      const auto result = cmd_train(resolve(o), require_label(label_text), seed);
      std::cout << "checkpoint " << result.paths.checkpoint.string() << "\n"
                << "history " << result.paths.history.string() << "\n"
                << "best_validation_loss " << result.best_validation_loss << "\n"
                << "stopping_reason " << result.history.stopping_reason << "\n";
    } else if (*predict) {
      const auto table = cmd_predict(checkpoint, data, out, columns_from(o.config_path), vocab);
      std::cout << "predicted " << table.ids.size() << " instances -> " << out << "\n";
    } else if (*vote) {
      const auto table = cmd_vote(files, out);
      std::cout << "fused " << files.size() << " files over " << table.ids.size()
                << " instances -> " << out << "\n";
    } else if (*score) {
      const auto report = cmd_score(gold, files, columns_from(o.config_path));
      std::cout << report_tsv(report, system);
      if (!json_out.empty()) {
        std::ofstream js(json_out);
        if (!js) throw IoError("cannot write '" + json_out + "'");
        js << report_json(report, system).dump(2) << '\n';
      }
    } else if (*baseline) {
      const auto table = cmd_baseline(gold, seed, out, columns_from(o.config_path));
      std::cout << "baseline for " << table.ids.size() << " instances -> " << out << "\n";
    } else if (*pipeline) {
      const auto config = resolve(o);
      const auto result = cmd_pipeline(config);
      std::cout << report_tsv(result.report, "infominer");
      std::cout << "report " << report_path(config.output_dir).string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "infominer: error[" << e.category() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "infominer: error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
