// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "infominer/autodiff.hpp"
#include "infominer/rng.hpp"
#include "infominer/tokenizer.hpp"

namespace infominer {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 32;
  std::size_t n_heads = 4;
  std::size_t n_layers = 2;
  std::size_t d_ff = 64;
  std::size_t max_seq_len = kMaxSeqLen;
  double dropout_rate = 0.1;
  std::size_t n_classes = 2;
  /// softmax(W h + b) when set, the bias-free softmax(W h) otherwise.
  bool classifier_bias = true;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

template <typename T>
struct NamedParam {
  std::string name;
  Tensor<T> tensor;
};

/// Post-layer-norm transformer encoder with a softmax head on the [CLS]
/// position. Copies are deep.
template <typename T>
class EncoderModel {
 public:
  struct Layer {
    Tensor<T> query_w, query_b, key_w, key_b, value_w, value_b, output_w, output_b;
    Tensor<T> attention_norm_gain, attention_norm_bias;
    Tensor<T> ffn_in_w, ffn_in_b, ffn_out_w, ffn_out_b;
    Tensor<T> ffn_norm_gain, ffn_norm_bias;
  };

  /// All weights zero, gains one. Use init_model for training.
  explicit EncoderModel(ModelConfig config);

  EncoderModel(const EncoderModel& other);
  EncoderModel& operator=(const EncoderModel& other);
  EncoderModel(EncoderModel&&) noexcept = default;
  EncoderModel& operator=(EncoderModel&&) noexcept = default;

  const ModelConfig& config() const { return config_; }

  /// Every parameter in checkpoint order. Handles share storage with the model.
  std::vector<NamedParam<T>> parameters() const;
  /// Names in checkpoint order, derived from the config alone.
  static std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& config);

  std::size_t num_parameters() const;
  void zero_grad();
  void set_requires_grad(bool on);

  Tensor<T> token_embedding, position_embedding;
  std::vector<Layer> layers;
  Tensor<T> classifier_w;  // [n_classes, d_model]
  Tensor<T> classifier_b;  // [n_classes], undefined without classifier_bias

 private:
  ModelConfig config_;
};

/// Weights ~ Normal(0, 0.02), layer-norm gains 1, biases 0. Draws follow
/// parameter order, so the result depends only on (config, seed).
template <typename T>
EncoderModel<T> init_model(const ModelConfig& config, Rng& rng);

/// Hidden states for every position, rows grouped by sequence.
template <typename T>
struct HiddenStates {
  Tensor<T> states;  // [batch * seq_len, d_model]
  std::size_t batch = 0;
  std::size_t seq_len = 0;
};

/// Per-layer attention weights captured during a forward pass, each laid out
/// [batch][head][query][key].
template <typename T>
struct AttentionTrace {
  std::vector<std::vector<T>> per_layer;
};

template <typename T>
HiddenStates<T> forward(const EncoderModel<T>& model, const Batch& batch, bool train_mode,
                        Rng& rng, Graph<T>& graph, AttentionTrace<T>* trace = nullptr);

/// Probabilities [batch, n_classes] and the pooled [CLS] states [batch, d_model].
template <typename T>
struct HeadOutput {
  Tensor<T> probs;
  Tensor<T> pooled;
  Tensor<T> logits;
};

template <typename T>
HeadOutput<T> classify_tensors(const EncoderModel<T>& model, const Batch& batch,
                               bool train_mode, Rng& rng, Graph<T>& graph);

struct Prediction {
  std::vector<double> probabilities;
  int predicted_class = 0;
  std::vector<double> cls_hidden;
};

/// Argmax with ties resolved to the lower index.
int argmax(std::span<const double> values);

template <typename T>
std::vector<Prediction> classify(const EncoderModel<T>& model, const Batch& batch,
                                 bool train_mode, Rng& rng);

/// Mean cross-entropy of the head probabilities against `gold`.
template <typename T>
Tensor<T> classification_loss(const EncoderModel<T>& model, const Batch& batch,
                               std::span<const int> gold, bool train_mode, Rng& rng,
                               Graph<T>& graph);

extern template class EncoderModel<float>;
extern template class EncoderModel<double>;

}  // namespace infominer
