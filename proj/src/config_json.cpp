// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/config_json.hpp"

#include <set>

#include "infominer/error.hpp"

namespace infominer {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigError(std::string("unknown ") + what + " key '" + key + "'");
    }
  }
}

template <typename V>
void read(const nlohmann::json& j, const char* key, V& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"d_model", c.d_model},
          {"n_heads", c.n_heads},       {"n_layers", c.n_layers},
          {"d_ff", c.d_ff},             {"max_seq_len", c.max_seq_len},
          {"dropout_rate", c.dropout_rate}, {"n_classes", c.n_classes},
          {"classifier_bias", c.classifier_bias}};
}

void merge_json(const nlohmann::json& j, ModelConfig& c) {
  reject_unknown(j,
                 {"vocab_size", "d_model", "n_heads", "n_layers", "d_ff", "max_seq_len",
                  "dropout_rate", "n_classes", "classifier_bias"},
                 "model");
  read(j, "vocab_size", c.vocab_size);
  read(j, "d_model", c.d_model);
  read(j, "n_heads", c.n_heads);
  read(j, "n_layers", c.n_layers);
  read(j, "d_ff", c.d_ff);
  read(j, "max_seq_len", c.max_seq_len);
  read(j, "dropout_rate", c.dropout_rate);
  read(j, "n_classes", c.n_classes);
  read(j, "classifier_bias", c.classifier_bias);
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"adam_epsilon", c.adam_epsilon},
          {"adam_betas", {c.adam_beta1, c.adam_beta2}},
          {"warmup_ratio", c.warmup_ratio},
          {"warmup_steps", c.warmup_steps},
          {"max_grad_norm", c.max_grad_norm},
          {"gradient_accumulation_steps", c.gradient_accumulation_steps},
          {"eval_interval_steps", c.eval_interval_steps},
          {"patience_rounds", c.patience_rounds},
          {"schedule", c.schedule == LrSchedule::Linear ? "linear" : "constant"},
          {"seed", c.seed}};
}

void merge_json(const nlohmann::json& j, TrainConfig& c) {
  reject_unknown(j,
                 {"learning_rate", "epochs", "batch_size", "adam_epsilon", "adam_betas",
                  "warmup_ratio", "warmup_steps", "max_grad_norm",
                  "gradient_accumulation_steps", "eval_interval_steps", "patience_rounds",
                  "schedule", "seed"},
                 "training");
  read(j, "learning_rate", c.learning_rate);
  read(j, "epochs", c.epochs);
  read(j, "batch_size", c.batch_size);
  read(j, "adam_epsilon", c.adam_epsilon);
  if (j.contains("adam_betas")) {
    std::vector<double> betas;
    read(j, "adam_betas", betas);
    if (betas.size() != 2) throw ConfigError("adam_betas must hold two values");
    c.adam_beta1 = betas[0];
    c.adam_beta2 = betas[1];
  }
  read(j, "warmup_ratio", c.warmup_ratio);
  read(j, "warmup_steps", c.warmup_steps);
  read(j, "max_grad_norm", c.max_grad_norm);
  read(j, "gradient_accumulation_steps", c.gradient_accumulation_steps);
  read(j, "eval_interval_steps", c.eval_interval_steps);
  read(j, "patience_rounds", c.patience_rounds);
  if (j.contains("schedule")) {
    std::string s;
    read(j, "schedule", s);
    if (s == "linear") c.schedule = LrSchedule::Linear;
    else if (s == "constant") c.schedule = LrSchedule::Constant;
    else throw ConfigError("schedule must be 'linear' or 'constant', got '" + s + "'");
  }
  read(j, "seed", c.seed);
}

nlohmann::json to_json(const ColumnMap& c) {
  return {{"id", c.id_column},
          {"text", c.text_column},
          {"labels", c.label_columns},
          {"allow_missing_label_columns", c.allow_missing_label_columns}};
}

void merge_json(const nlohmann::json& j, ColumnMap& c) {
  reject_unknown(j, {"id", "text", "labels", "allow_missing_label_columns"}, "columns");
  read(j, "id", c.id_column);
  read(j, "text", c.text_column);
  if (j.contains("labels")) {
    std::vector<std::string> labels;
    read(j, "labels", labels);
    if (labels.size() != kNumLabels) throw ConfigError("columns.labels must name 7 columns");
    std::copy(labels.begin(), labels.end(), c.label_columns.begin());
  }
  read(j, "allow_missing_label_columns", c.allow_missing_label_columns);
}

}  // namespace infominer
