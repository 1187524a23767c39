// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/encoder.hpp"

#include <cmath>

#include "infominer/error.hpp"

namespace infominer {

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("model config: " + msg); };
  if (vocab_size < kNumSpecials) fail("vocab_size must cover the 4 special tokens");
  if (d_model == 0) fail("d_model must be positive");
  if (n_heads == 0 || d_model % n_heads != 0) fail("d_model must be divisible by n_heads");
  if (d_ff == 0) fail("d_ff must be positive");
  if (max_seq_len == 0 || max_seq_len > kMaxSeqLen)
    fail("max_seq_len must lie in [1, " + std::to_string(kMaxSeqLen) + "]");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must lie in [0, 1)");
  if (n_classes != 2) fail("n_classes must be 2");
}

namespace {

// Visits (name, tensor) pairs in checkpoint order.
template <typename Model, typename Fn>
void visit_parameters(Model& m, Fn&& fn) {
  fn(std::string("embeddings.token"), m.token_embedding);
  fn(std::string("embeddings.position"), m.position_embedding);
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    auto& l = m.layers[i];
    const std::string p = "layers." + std::to_string(i) + ".";
    fn(p + "attention.query.weight", l.query_w);
    fn(p + "attention.query.bias", l.query_b);
    fn(p + "attention.key.weight", l.key_w);
    fn(p + "attention.key.bias", l.key_b);
    fn(p + "attention.value.weight", l.value_w);
    fn(p + "attention.value.bias", l.value_b);
    fn(p + "attention.output.weight", l.output_w);
    fn(p + "attention.output.bias", l.output_b);
    fn(p + "attention_norm.gain", l.attention_norm_gain);
    fn(p + "attention_norm.bias", l.attention_norm_bias);
    fn(p + "ffn.in.weight", l.ffn_in_w);
    fn(p + "ffn.in.bias", l.ffn_in_b);
    fn(p + "ffn.out.weight", l.ffn_out_w);
    fn(p + "ffn.out.bias", l.ffn_out_b);
    fn(p + "ffn_norm.gain", l.ffn_norm_gain);
    fn(p + "ffn_norm.bias", l.ffn_norm_bias);
  }
  fn(std::string("classifier.weight"), m.classifier_w);
  if (m.classifier_b.defined()) fn(std::string("classifier.bias"), m.classifier_b);
}

bool is_gain(const std::string& name) { return name.ends_with(".gain"); }
bool is_bias(const std::string& name) { return name.ends_with(".bias"); }

}  // namespace

template <typename T>
EncoderModel<T>::EncoderModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t d = config_.d_model, ff = config_.d_ff;
  auto z = [](Shape s) { return Tensor<T>::zeros(std::move(s), true); };
  auto one = [](Shape s) { return Tensor<T>::full(std::move(s), T(1), true); };
  token_embedding = z({config_.vocab_size, d});
  position_embedding = z({config_.max_seq_len, d});
  layers.resize(config_.n_layers);
  for (auto& l : layers) {
    l.query_w = z({d, d});
    l.query_b = z({d});
    l.key_w = z({d, d});
    l.key_b = z({d});
    l.value_w = z({d, d});
    l.value_b = z({d});
    l.output_w = z({d, d});
    l.output_b = z({d});
    l.attention_norm_gain = one({d});
    l.attention_norm_bias = z({d});
    l.ffn_in_w = z({ff, d});
    l.ffn_in_b = z({ff});
    l.ffn_out_w = z({d, ff});
    l.ffn_out_b = z({d});
    l.ffn_norm_gain = one({d});
    l.ffn_norm_bias = z({d});
  }
  classifier_w = z({config_.n_classes, d});
  if (config_.classifier_bias) classifier_b = z({config_.n_classes});
}

template <typename T>
EncoderModel<T>::EncoderModel(const EncoderModel& other)
    : token_embedding(other.token_embedding),
      position_embedding(other.position_embedding),
      layers(other.layers),
      classifier_w(other.classifier_w),
      classifier_b(other.classifier_b),
      config_(other.config_) {
  visit_parameters(*this, [](const std::string&, Tensor<T>& t) { t = t.clone(); });
}

template <typename T>
EncoderModel<T>& EncoderModel<T>::operator=(const EncoderModel& other) {
  if (this != &other) {
    EncoderModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
std::vector<NamedParam<T>> EncoderModel<T>::parameters() const {
  std::vector<NamedParam<T>> out;
  visit_parameters(*this, [&](const std::string& name, const Tensor<T>& t) {
    out.push_back({name, t});
  });
  return out;
}

template <typename T>
std::vector<std::pair<std::string, Shape>> EncoderModel<T>::parameter_layout(
    const ModelConfig& config) {
  std::vector<std::pair<std::string, Shape>> out;
  for (const auto& p : EncoderModel(config).parameters()) {
    out.emplace_back(p.name, p.tensor.shape());
  }
  return out;
}

template <typename T>
std::size_t EncoderModel<T>::num_parameters() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor.size();
  return n;
}

template <typename T>
void EncoderModel<T>::zero_grad() {
  visit_parameters(*this, [](const std::string&, Tensor<T>& t) { t.zero_grad(); });
}

template <typename T>
void EncoderModel<T>::set_requires_grad(bool on) {
  visit_parameters(*this, [on](const std::string&, Tensor<T>& t) { t.set_requires_grad(on); });
}

template <typename T>
EncoderModel<T> init_model(const ModelConfig& config, Rng& rng) {
  EncoderModel<T> model(config);
  constexpr double kInitStd = 0.02;
  for (auto& p : model.parameters()) {
    if (is_gain(p.name) || is_bias(p.name)) continue;
    for (auto& v : p.tensor.values()) v = static_cast<T>(rng.normal(0.0, kInitStd));
  }
  return model;
}

template <typename T>
HiddenStates<T> forward(const EncoderModel<T>& model, const Batch& batch, bool train_mode,
                        Rng& rng, Graph<T>& graph, AttentionTrace<T>* trace) {
  const auto& cfg = model.config();
  if (batch.rows == 0 || batch.width == 0) throw ShapeError("forward: empty batch");
  if (batch.width > cfg.max_seq_len) {
    throw ShapeError("forward: batch width " + std::to_string(batch.width) +
                     " exceeds max_seq_len " + std::to_string(cfg.max_seq_len));
  }
  const std::size_t rows = batch.rows * batch.width;
  const double drop = train_mode ? cfg.dropout_rate : 0.0;

  std::vector<std::int32_t> positions(rows);
  for (std::size_t r = 0; r < rows; ++r) positions[r] = static_cast<std::int32_t>(r % batch.width);

  auto x = graph.add(graph.embedding_lookup(model.token_embedding, batch.ids),
                     graph.embedding_lookup(model.position_embedding, positions));
  x = graph.dropout(x, drop, rng);

  if (trace) trace->per_layer.clear();
  for (const auto& l : model.layers) {
    auto q = graph.linear(x, l.query_w, l.query_b);
    auto k = graph.linear(x, l.key_w, l.key_b);
    auto v = graph.linear(x, l.value_w, l.value_b);
    std::vector<T>* probs = nullptr;
    if (trace) probs = &trace->per_layer.emplace_back();
    auto ctx = graph.attention(q, k, v, batch.mask, batch.rows, batch.width, cfg.n_heads, probs);
    auto attn = graph.dropout(graph.linear(ctx, l.output_w, l.output_b), drop, rng);
    x = graph.layer_norm(graph.add(x, attn), l.attention_norm_gain, l.attention_norm_bias);

    auto hidden = graph.gelu(graph.linear(x, l.ffn_in_w, l.ffn_in_b));
    auto ffn = graph.dropout(graph.linear(hidden, l.ffn_out_w, l.ffn_out_b), drop, rng);
    x = graph.layer_norm(graph.add(x, ffn), l.ffn_norm_gain, l.ffn_norm_bias);
  }
  return {x, batch.rows, batch.width};
}

template <typename T>
HeadOutput<T> classify_tensors(const EncoderModel<T>& model, const Batch& batch,
                               bool train_mode, Rng& rng, Graph<T>& graph) {
  auto hidden = forward(model, batch, train_mode, rng, graph);
  std::vector<std::size_t> cls_rows(batch.rows);
  for (std::size_t b = 0; b < batch.rows; ++b) cls_rows[b] = b * batch.width;
  auto pooled = graph.select_rows(hidden.states, cls_rows);
  const double drop = train_mode ? model.config().dropout_rate : 0.0;
  auto logits = graph.linear(graph.dropout(pooled, drop, rng), model.classifier_w,
                             model.classifier_b);
  auto probs = graph.softmax(logits, 1);
  return {probs, pooled, logits};
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

template <typename T>
std::vector<Prediction> classify(const EncoderModel<T>& model, const Batch& batch,
                                 bool train_mode, Rng& rng) {
  auto graph = Graph<T>::no_grad();
  const auto head = classify_tensors(model, batch, train_mode, rng, graph);
  const std::size_t c = model.config().n_classes, d = model.config().d_model;
  std::vector<Prediction> out(batch.rows);
  for (std::size_t b = 0; b < batch.rows; ++b) {
    auto& p = out[b];
    for (std::size_t j = 0; j < c; ++j) p.probabilities.push_back(head.probs[b * c + j]);
    for (std::size_t j = 0; j < d; ++j) p.cls_hidden.push_back(head.pooled[b * d + j]);
    p.predicted_class = argmax(p.probabilities);
  }
  return out;
}

template <typename T>
Tensor<T> classification_loss(const EncoderModel<T>& model, const Batch& batch,
                              std::span<const int> gold, bool train_mode, Rng& rng,
                              Graph<T>& graph) {
  for (int g : gold) {
    if (g != 0 && g != 1) throw ShapeError("gold class must be 0 or 1");
  }
  const auto head = classify_tensors(model, batch, train_mode, rng, graph);
  return graph.cross_entropy(head.probs, gold);
}

#define INFOMINER_INSTANTIATE(T)                                                        \
  template class EncoderModel<T>;                                                      \
  template EncoderModel<T> init_model<T>(const ModelConfig&, Rng&);                    \
  template HiddenStates<T> forward<T>(const EncoderModel<T>&, const Batch&, bool, Rng&, \
                                      Graph<T>&, AttentionTrace<T>*);                  \
  template HeadOutput<T> classify_tensors<T>(const EncoderModel<T>&, const Batch&, bool, \
                                             Rng&, Graph<T>&);                          \
  template std::vector<Prediction> classify<T>(const EncoderModel<T>&, const Batch&,    \
                                               bool, Rng&);                             \
  template Tensor<T> classification_loss<T>(const EncoderModel<T>&, const Batch&,       \
                                            std::span<const int>, bool, Rng&, Graph<T>&);

INFOMINER_INSTANTIATE(float)
INFOMINER_INSTANTIATE(double)

#undef INFOMINER_INSTANTIATE

}  // namespace infominer
