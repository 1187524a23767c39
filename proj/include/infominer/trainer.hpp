// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infominer/corpus.hpp"
#include "infominer/encoder.hpp"
#include "infominer/tokenizer.hpp"

namespace infominer {

enum class LrSchedule { Linear, Constant };

/// Fine-tuning hyperparameters. Defaults:
/// lr 1e-5, 3 epochs, batch 8, Adam eps 1e-8, warmup ratio 0.1,
/// max grad norm 1.0, no gradient accumulation, patience 10 rounds.
struct TrainConfig {
  double learning_rate = 1e-5;
  std::size_t epochs = 3;
  std::size_t batch_size = 8;
  double adam_epsilon = 1e-8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double warmup_ratio = 0.1;
  std::size_t warmup_steps = 0;  // overrides warmup_ratio when nonzero
  double max_grad_norm = 1.0;
  std::size_t gradient_accumulation_steps = 1;
  std::size_t eval_interval_steps = 50;
  std::size_t patience_rounds = 10;
  LrSchedule schedule = LrSchedule::Linear;
  std::uint64_t seed = 1;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

std::size_t warmup_steps_for(std::size_t total_steps, const TrainConfig& cfg);

/// Learning rate for 0-based optimizer step `step` of `total_steps`:
/// lr * (step + 1) / W during warmup, then lr * (total - step) / (total - W)
/// (or lr with the constant schedule). Zero at step == total_steps.
double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg);

/// Scales all gradients by max_norm / g when their global L2 norm g exceeds
/// max_norm. Returns the applied factor (1 when unchanged). Throws
/// TrainingError naming the first parameter with a non-finite gradient.
template <typename T>
double clip_global_norm(const std::vector<NamedParam<T>>& params, double max_norm = 1.0);

template <typename T>
double global_grad_norm(const std::vector<NamedParam<T>>& params);

template <typename T>
struct AdamState {
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  std::uint64_t step = 0;

  /// Zeroed accumulators matching `params`.
  static AdamState zeros_like(const std::vector<NamedParam<T>>& params);
};

/// One bias-corrected Adam update from the parameters' current gradients.
template <typename T>
void adam_step(const std::vector<NamedParam<T>>& params, AdamState<T>& state, double lr,
               const TrainConfig& cfg);

/// Counts evaluation rounds without a strictly lower validation loss.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records a round; returns true when it is a new best.
  bool update(double validation_loss);
  bool should_stop() const { return rounds_without_improvement_ >= patience_; }
  double best_loss() const { return best_; }
  std::size_t best_round() const { return best_round_; }
  std::size_t rounds() const { return rounds_; }

 private:
  std::size_t patience_;
  double best_ = 0.0;
  std::size_t best_round_ = 0;  // 1-based, 0 before any round
  std::size_t rounds_ = 0;
  std::size_t rounds_without_improvement_ = 0;
};

struct EvalRound {
  std::size_t step = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double learning_rate = 0.0;

  friend bool operator==(const EvalRound&, const EvalRound&) = default;
};

struct TrainHistory {
  std::vector<EvalRound> rounds;
  std::size_t best_round = 0;  // index into rounds
  std::size_t total_steps = 0;
  std::string stopping_reason;  // "completed" or "early_stopping"

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

/// JSON lines: one object per round, then a summary line.
std::string history_to_jsonl(const TrainHistory& history);

template <typename T>
struct TrainResult {
  EncoderModel<T> model;
  TrainHistory history;
  double best_validation_loss = 0.0;
};

struct EncodedExample {
  TokenSequence tokens;
  int cls = 0;
};

std::vector<EncodedExample> encode_dataset(const BinaryDataset& ds, const Vocab& vocab,
                                           std::size_t max_len);

/// Batches `examples` in order and returns the mean loss with dropout
/// off, weighted by batch size.
template <typename T>
double dataset_loss(const EncoderModel<T>& model, const std::vector<EncodedExample>& examples,
                    std::size_t batch_size);

/// Fine-tunes `model` on `train_set`, evaluating on `val_set` every
/// eval_interval_steps optimizer steps and at the final step. Stops after
/// patience_rounds rounds without improvement and returns the parameters
/// of the best round. Deterministic given cfg.seed.
template <typename T>
TrainResult<T> train(EncoderModel<T> model, const BinaryDataset& train_set,
                     const BinaryDataset& val_set, const Vocab& vocab, const TrainConfig& cfg);

extern template double clip_global_norm<float>(const std::vector<NamedParam<float>>&, double);
extern template double clip_global_norm<double>(const std::vector<NamedParam<double>>&, double);

}  // namespace infominer
