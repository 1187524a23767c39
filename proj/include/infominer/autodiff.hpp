// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "infominer/rng.hpp"

namespace infominer {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major tensor handle. Copies share storage; use clone() for a
/// deep copy. Gradient storage is allocated on first use.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<T> values, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(s_); }
  const Shape& shape() const { return s_->shape; }
  std::size_t dim(std::size_t axis) const { return s_->shape.at(axis); }
  std::size_t rank() const { return s_->shape.size(); }
  std::size_t size() const { return s_->values.size(); }

  std::span<T> values() { return s_->values; }
  std::span<const T> values() const { return s_->values; }
  T& operator[](std::size_t i) { return s_->values[i]; }
  const T& operator[](std::size_t i) const { return s_->values[i]; }
  T item() const;

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool on) { s_->requires_grad = on; }

  bool has_grad() const { return !s_->grad.empty(); }
  /// Allocates zeroed gradient storage if absent.
  std::span<T> grad();
  std::span<const T> grad() const { return s_->grad; }
  void zero_grad();

  Tensor clone() const;
  bool same_storage(const Tensor& other) const { return s_ == other.s_; }

 private:
  struct Storage {
    Shape shape;
    std::vector<T> values;
    std::vector<T> grad;
    bool requires_grad = false;
  };

  explicit Tensor(std::shared_ptr<Storage> s) : s_(std::move(s)) {}

  std::shared_ptr<Storage> s_;
};

/// Records differentiable operations in execution order. Ops whose inputs
/// do not require gradients are evaluated without recording. A graph can be
/// differentiated once; build a new graph for the next step.
template <typename T>
class Graph {
 public:
  explicit Graph(bool recording = true) : recording_(recording) {}

  /// A graph that never records, for inference and finite differences.
  static Graph no_grad() { return Graph(false); }

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  std::size_t num_nodes() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
  /// x[m,k] * w[n,k]^T + bias[n]; bias may be undefined.
  Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias);
  Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
  Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
  Tensor<T> scale(const Tensor<T>& a, T factor);
  /// Scalar sum of every element.
  Tensor<T> sum(const Tensor<T>& a);
  /// Max-subtracted softmax along `axis`.
  Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);
  /// Normalizes each row of x[m,n] over its last axis, then gain * x + bias.
  Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                       T eps = T(1e-12));
  /// 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
  Tensor<T> gelu(const Tensor<T>& x);
  /// Inverted dropout; identity when rate == 0.
  Tensor<T> dropout(const Tensor<T>& x, double rate, Rng& rng);
  /// Rows of table[V,d] at `ids`; throws ShapeError for ids outside [0, V).
  Tensor<T> embedding_lookup(const Tensor<T>& table, std::span<const std::int32_t> ids);
  /// Gathers rows of x[m,n].
  Tensor<T> select_rows(const Tensor<T>& x, std::span<const std::size_t> rows);
  /// Mean over rows of -log(max(probs[i, gold_i], 1e-12)).
  Tensor<T> cross_entropy(const Tensor<T>& probs, std::span<const int> gold);

  /// Masked multi-head scaled dot-product attention.
  ///
  /// q, k, v are [batch * seq_len, d_model] with rows grouped by sequence;
  /// heads split d_model into n_heads contiguous slices. `key_mask` is
  /// [batch * seq_len]; keys with mask 0 get -1e9 added to their scores
  /// before the softmax. If `probs_out` is non-null it receives the
  /// attention weights laid out [batch][head][query][key].
  Tensor<T> attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                      std::span<const std::uint8_t> key_mask, std::size_t batch,
                      std::size_t seq_len, std::size_t n_heads,
                      std::vector<T>* probs_out = nullptr);

  /// Populates gradients of every recorded tensor that requires them.
  /// Throws GraphError if `loss` is not a scalar or the graph was already
  /// differentiated.
  void backward(const Tensor<T>& loss);

 private:
  bool tracks(std::initializer_list<const Tensor<T>*> inputs) const;
  void record(std::function<void()> fn) { nodes_.push_back(std::move(fn)); }

  bool recording_;
  bool consumed_ = false;
  std::vector<std::function<void()>> nodes_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;
extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace infominer
