// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infominer/error.hpp"
#include "infominer/sampling.hpp"
#include "json.hpp"

namespace infominer {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("train config: " + msg); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (epochs == 0) fail("epochs must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must lie in [0, 1)");
  if (!(warmup_ratio >= 0.0 && warmup_ratio <= 1.0)) fail("warmup_ratio must lie in [0, 1]");
  if (!(max_grad_norm > 0.0)) fail("max_grad_norm must be positive");
  if (gradient_accumulation_steps == 0) fail("gradient_accumulation_steps must be positive");
  if (eval_interval_steps == 0) fail("eval_interval_steps must be positive");
  if (patience_rounds == 0) fail("patience_rounds must be positive");
}

std::size_t warmup_steps_for(std::size_t total_steps, const TrainConfig& cfg) {
  if (cfg.warmup_steps != 0) return cfg.warmup_steps;
  return static_cast<std::size_t>(std::llround(cfg.warmup_ratio * static_cast<double>(total_steps)));
}

double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg) {
  if (total_steps == 0) throw ConfigError("lr_at: total_steps must be positive");
  if (step >= total_steps) return 0.0;
  const std::size_t warmup = warmup_steps_for(total_steps, cfg);
  if (step < warmup) {
    return cfg.learning_rate *
           (static_cast<double>(step + 1) / static_cast<double>(warmup));
  }
  if (cfg.schedule == LrSchedule::Constant) return cfg.learning_rate;
  return cfg.learning_rate * (static_cast<double>(total_steps - step) /
                              static_cast<double>(total_steps - warmup));
}

template <typename T>
double global_grad_norm(const std::vector<NamedParam<T>>& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    for (T g : p.tensor.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(sq);
}

template <typename T>
double clip_global_norm(const std::vector<NamedParam<T>>& params, double max_norm) {
  for (const auto& p : params) {
    for (T g : p.tensor.grad()) {
      if (!std::isfinite(g)) throw TrainingError("non-finite gradient in " + p.name);
    }
  }
  const double norm = global_grad_norm(params);
  if (norm <= max_norm) return 1.0;
  const double scale = max_norm / norm;
  for (const auto& p : params) {
    auto t = p.tensor;
    for (auto& g : t.grad()) g = static_cast<T>(g * scale);
  }
  return scale;
}

template <typename T>
AdamState<T> AdamState<T>::zeros_like(const std::vector<NamedParam<T>>& params) {
  AdamState s;
  for (const auto& p : params) {
    s.first_moment.emplace_back(p.tensor.size(), T(0));
    s.second_moment.emplace_back(p.tensor.size(), T(0));
  }
  return s;
}

template <typename T>
void adam_step(const std::vector<NamedParam<T>>& params, AdamState<T>& state, double lr,
               const TrainConfig& cfg) {
  if (state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state tracks " +
                     std::to_string(state.first_moment.size()) + " parameters, given " +
                     std::to_string(params.size()));
  }
  ++state.step;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto t = params[i].tensor;
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != t.size() || v.size() != t.size()) {
      throw ShapeError("adam_step: state shape mismatch for " + params[i].name);
    }
    auto values = t.values();
    auto grad = t.grad();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grad[j];
      m[j] = static_cast<T>(b1 * m[j] + (1.0 - b1) * g);
      v[j] = static_cast<T>(b2 * v[j] + (1.0 - b2) * g * g);
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      values[j] = static_cast<T>(values[j] - lr * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon));
    }
  }
}

bool EarlyStopping::update(double validation_loss) {
  ++rounds_;
  if (rounds_ == 1 || validation_loss < best_) {
    best_ = validation_loss;
    best_round_ = rounds_;
    rounds_without_improvement_ = 0;
    return true;
  }
  ++rounds_without_improvement_;
  return false;
}

std::string history_to_jsonl(const TrainHistory& history) {
  std::string out;
  for (const auto& r : history.rounds) {
    nlohmann::json j = {{"step", r.step},
                        {"train_loss", r.train_loss},
                        {"validation_loss", r.validation_loss},
                        {"learning_rate", r.learning_rate}};
    out += j.dump() + "\n";
  }
  nlohmann::json summary = {{"best_round", history.best_round},
                            {"total_steps", history.total_steps},
                            {"stopping_reason", history.stopping_reason}};
  out += summary.dump() + "\n";
  return out;
}

std::vector<EncodedExample> encode_dataset(const BinaryDataset& ds, const Vocab& vocab,
                                           std::size_t max_len) {
  std::vector<EncodedExample> out;
  out.reserve(ds.size());
  for (const auto& item : ds.items) out.push_back({encode(item.text, vocab, max_len), item.cls});
  return out;
}

namespace {

Batch make_batch(const std::vector<EncodedExample>& examples,
                 std::span<const std::size_t> indices, std::vector<int>& gold) {
  std::vector<TokenSequence> seqs;
  gold.clear();
  for (auto i : indices) {
    seqs.push_back(examples[i].tokens);
    gold.push_back(examples[i].cls);
  }
  return pad_batch(seqs);
}

}  // namespace

template <typename T>
double dataset_loss(const EncoderModel<T>& model, const std::vector<EncodedExample>& examples,
                    std::size_t batch_size) {
  if (examples.empty()) throw TrainingError("loss over an empty dataset");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng unused(0);
  std::vector<int> gold;
  double total = 0.0;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, order.size() - start);
    const auto batch = make_batch(examples, std::span(order).subspan(start, n), gold);
    auto graph = Graph<T>::no_grad();
    const auto loss = classification_loss(model, batch, gold, false, unused, graph);
    total += static_cast<double>(loss.item()) * static_cast<double>(n);
  }
  return total / static_cast<double>(examples.size());
}

template <typename T>
TrainResult<T> train(EncoderModel<T> model, const BinaryDataset& train_set,
                     const BinaryDataset& val_set, const Vocab& vocab, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw TrainingError("training set is empty");
  if (val_set.empty()) throw TrainingError("validation set is empty");
  if (vocab.size() > model.config().vocab_size) {
    throw ConfigError("vocabulary of " + std::to_string(vocab.size()) +
                      " tokens exceeds model vocab_size " +
                      std::to_string(model.config().vocab_size));
  }

  const std::size_t max_len = model.config().max_seq_len;
  const auto train_examples = encode_dataset(train_set, vocab, max_len);
  const auto val_examples = encode_dataset(val_set, vocab, max_len);

  const std::size_t batches_per_epoch = (train_examples.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t steps_per_epoch =
      (batches_per_epoch + cfg.gradient_accumulation_steps - 1) / cfg.gradient_accumulation_steps;
  const std::size_t total_steps = steps_per_epoch * cfg.epochs;

  Rng shuffle_rng = make_rng(cfg.seed, RngStream::Shuffle);
  Rng dropout_rng = make_rng(cfg.seed, RngStream::Dropout);

  model.set_requires_grad(true);
  model.zero_grad();
  const auto params = model.parameters();
  auto adam = AdamState<T>::zeros_like(params);

  TrainHistory history;
  history.total_steps = total_steps;
  history.stopping_reason = "completed";
  EarlyStopping stopper(cfg.patience_rounds);
  EncoderModel<T> best = model;

  std::size_t step = 0;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  double last_lr = 0.0;
  std::vector<int> gold;

  auto evaluate_round = [&] {
    const double val_loss = dataset_loss(model, val_examples, cfg.batch_size);
    if (!std::isfinite(val_loss)) {
      throw TrainingError("non-finite validation loss at step " + std::to_string(step),
                          static_cast<long>(step));
    }
    history.rounds.push_back(
        {step, loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0, val_loss, last_lr});
    loss_sum = 0.0;
    loss_count = 0;
    if (stopper.update(val_loss)) {
      best = model;
      history.best_round = history.rounds.size() - 1;
    }
    return stopper.should_stop();
  };

  bool stop = false;
  for (std::size_t epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    std::vector<std::size_t> order(train_examples.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_in_place(order, shuffle_rng);

    std::size_t micro = 0;
    for (std::size_t b = 0; b < batches_per_epoch && !stop; ++b) {
      const std::size_t start = b * cfg.batch_size;
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      const auto batch = make_batch(train_examples, std::span(order).subspan(start, n), gold);

      Graph<T> graph;
      auto loss = classification_loss(model, batch, gold, true, dropout_rng, graph);
      const double value = static_cast<double>(loss.item());
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite training loss at step " + std::to_string(step),
                            static_cast<long>(step));
      }
      loss_sum += value;
      ++loss_count;
      if (cfg.gradient_accumulation_steps > 1) {
        loss = graph.scale(loss, static_cast<T>(1.0 / static_cast<double>(cfg.gradient_accumulation_steps)));
      }
      graph.backward(loss);
      ++micro;

      const bool last_in_epoch = b + 1 == batches_per_epoch;
      if (micro == cfg.gradient_accumulation_steps || last_in_epoch) {
        micro = 0;
        try {
          clip_global_norm(params, cfg.max_grad_norm);
        } catch (const TrainingError& e) {
          throw TrainingError(std::string(e.what()) + " at step " + std::to_string(step),
                              static_cast<long>(step));
        }
        last_lr = lr_at(step, total_steps, cfg);
        adam_step(params, adam, last_lr, cfg);
        model.zero_grad();
        ++step;
        if (step % cfg.eval_interval_steps == 0 || step == total_steps) {
          stop = evaluate_round();
          if (stop) history.stopping_reason = "early_stopping";
        }
      }
    }
  }

  best.zero_grad();
  return {std::move(best), std::move(history), stopper.best_loss()};
}

#define INFOMINER_INSTANTIATE(T)                                                          \
  template double global_grad_norm<T>(const std::vector<NamedParam<T>>&);                \
  template double clip_global_norm<T>(const std::vector<NamedParam<T>>&, double);        \
  template struct AdamState<T>;                                                           \
  template void adam_step<T>(const std::vector<NamedParam<T>>&, AdamState<T>&, double,   \
                             const TrainConfig&);                                         \
  template double dataset_loss<T>(const EncoderModel<T>&, const std::vector<EncodedExample>&, \
                                  std::size_t);                                           \
  template TrainResult<T> train<T>(EncoderModel<T>, const BinaryDataset&,                 \
                                   const BinaryDataset&, const Vocab&, const TrainConfig&);

INFOMINER_INSTANTIATE(float)
INFOMINER_INSTANTIATE(double)

#undef INFOMINER_INSTANTIATE

}  // namespace infominer
