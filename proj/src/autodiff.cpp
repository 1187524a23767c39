// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "infominer/error.hpp"

namespace infominer {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// Tensor

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  auto s = std::make_shared<Storage>();
  s->values.assign(shape_size(shape), value);
  s->shape = std::move(shape);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

template <typename T>
Tensor<T> Tensor<T>::from(Shape shape, std::vector<T> values, bool requires_grad) {
  if (values.size() != shape_size(shape)) {
    throw ShapeError("tensor of shape " + shape_string(shape) + " given " +
                     std::to_string(values.size()) + " values");
  }
  auto s = std::make_shared<Storage>();
  s->shape = std::move(shape);
  s->values = std::move(values);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + shape_string(shape()));
  return s_->values[0];
}

template <typename T>
std::span<T> Tensor<T>::grad() {
  if (s_->grad.empty()) s_->grad.assign(s_->values.size(), T(0));
  return s_->grad;
}

template <typename T>
void Tensor<T>::zero_grad() {
  std::fill(s_->grad.begin(), s_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  auto s = std::make_shared<Storage>(*s_);
  return Tensor(std::move(s));
}

// ---------------------------------------------------------------------------
// Graph

namespace {

template <typename T>
void require_matrix(const Tensor<T>& t, const char* op) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + " expects a matrix, got " + shape_string(t.shape()));
  }
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
  }
}

}  // namespace

template <typename T>
bool Graph<T>::tracks(std::initializer_list<const Tensor<T>*> inputs) const {
  if (!recording_) return false;
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor<T>* t) { return t->defined() && t->requires_grad(); });
}

template <typename T>
Tensor<T> Graph<T>::matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions differ, " + shape_string(a.shape()) + " * " +
                     shape_string(b.shape()));
  }
  const bool track = tracks({&a, &b});
  auto out = Tensor<T>::zeros({m, n}, track);
  auto av = a.values();
  auto bv = b.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) ov[i * n + j] += aip * bv[p * n + j];
    }
  }
  if (track) {
    record([a = Tensor<T>(a), b = Tensor<T>(b), out, m, k, n]() mutable {
      auto go = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        auto bv = b.values();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            T acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += go[i * n + j] * bv[p * n + j];
            ga[i * k + p] += acc;
          }
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        auto av = a.values();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const T aip = av[i * k + p];
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * go[i * n + j];
          }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias) {
  require_matrix(x, "linear");
  require_matrix(w, "linear");
  const std::size_t m = x.dim(0), k = x.dim(1), n = w.dim(0);
  if (w.dim(1) != k) {
    throw ShapeError("linear: input width " + std::to_string(k) + " vs weight " +
                     shape_string(w.shape()));
  }
  if (bias.defined() && bias.size() != n) {
    throw ShapeError("linear: bias of shape " + shape_string(bias.shape()) + " for " +
                     std::to_string(n) + " outputs");
  }
  const bool track = tracks({&x, &w, &bias});
  auto out = Tensor<T>::zeros({m, n}, track);
  auto xv = x.values();
  auto wv = w.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t o = 0; o < n; ++o) {
      T acc = bias.defined() ? bias[o] : T(0);
      for (std::size_t p = 0; p < k; ++p) acc += xv[i * k + p] * wv[o * k + p];
      ov[i * n + o] = acc;
    }
  }
  if (track) {
    record([x = Tensor<T>(x), w = Tensor<T>(w), bias = Tensor<T>(bias), out, m, k, n]() mutable {
      auto go = out.grad();
      if (x.requires_grad()) {
        auto gx = x.grad();
        auto wv = w.values();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t o = 0; o < n; ++o) {
            const T g = go[i * n + o];
            for (std::size_t p = 0; p < k; ++p) gx[i * k + p] += g * wv[o * k + p];
          }
      }
      if (w.requires_grad()) {
        auto gw = w.grad();
        auto xv = x.values();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t o = 0; o < n; ++o) {
            const T g = go[i * n + o];
            for (std::size_t p = 0; p < k; ++p) gw[o * k + p] += g * xv[i * k + p];
          }
      }
      if (bias.defined() && bias.requires_grad()) {
        auto gb = bias.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t o = 0; o < n; ++o) gb[o] += go[i * n + o];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "add");
  const bool track = tracks({&a, &b});
  auto out = Tensor<T>::zeros(a.shape(), track);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  if (track) {
    record([a = Tensor<T>(a), b = Tensor<T>(b), out]() mutable {
      auto go = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a, b, "mul");
  const bool track = tracks({&a, &b});
  auto out = Tensor<T>::zeros(a.shape(), track);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  if (track) {
    record([a = Tensor<T>(a), b = Tensor<T>(b), out]() mutable {
      auto go = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * b[i];
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i] * a[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::scale(const Tensor<T>& a, T factor) {
  const bool track = tracks({&a});
  auto out = Tensor<T>::zeros(a.shape(), track);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * factor;
  if (track) {
    record([a = Tensor<T>(a), out, factor]() mutable {
      auto go = out.grad();
      auto ga = a.grad();
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * factor;
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::sum(const Tensor<T>& a) {
  const bool track = tracks({&a});
  T acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i];
  auto out = Tensor<T>::scalar(acc, track);
  if (track) {
    record([a = Tensor<T>(a), out]() mutable {
      const T g = out.grad()[0];
      auto ga = a.grad();
      for (auto& x : ga) x += g;
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::softmax(const Tensor<T>& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw ShapeError("softmax: axis " + std::to_string(axis) + " out of range for " +
                     shape_string(x.shape()));
  }
  const auto& shape = x.shape();
  const std::size_t n = shape[axis];
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= shape[d];
  for (std::size_t d = axis + 1; d < shape.size(); ++d) inner *= shape[d];

  const bool track = tracks({&x});
  auto out = Tensor<T>::zeros(shape, track);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      T mx = x[base];
      for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[base + j * inner]);
      T denom = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const T e = std::exp(x[base + j * inner] - mx);
        out[base + j * inner] = e;
        denom += e;
      }
      for (std::size_t j = 0; j < n; ++j) out[base + j * inner] /= denom;
    }
  }
  if (track) {
    record([x = Tensor<T>(x), out, outer, inner, n]() mutable {
      auto go = out.grad();
      auto gx = x.grad();
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          const std::size_t base = o * n * inner + in;
          T dot = 0;
          for (std::size_t j = 0; j < n; ++j) dot += go[base + j * inner] * out[base + j * inner];
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = base + j * inner;
            gx[idx] += out[idx] * (go[idx] - dot);
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::layer_norm(const Tensor<T>& x, const Tensor<T>& gain,
                               const Tensor<T>& bias, T eps) {
  require_matrix(x, "layer_norm");
  const std::size_t m = x.dim(0), n = x.dim(1);
  if (gain.size() != n || bias.size() != n) {
    throw ShapeError("layer_norm: gain/bias must have " + std::to_string(n) + " entries");
  }
  const bool track = tracks({&x, &gain, &bias});
  auto out = Tensor<T>::zeros(x.shape(), track);
  std::vector<T> xhat(m * n);
  std::vector<T> inv_std(m);
  for (std::size_t i = 0; i < m; ++i) {
    T mean = 0;
    for (std::size_t j = 0; j < n; ++j) mean += x[i * n + j];
    mean /= static_cast<T>(n);
    T var = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const T d = x[i * n + j] - mean;
      var += d * d;
    }
    var /= static_cast<T>(n);
    inv_std[i] = T(1) / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (x[i * n + j] - mean) * inv_std[i];
      out[i * n + j] = gain[j] * xhat[i * n + j] + bias[j];
    }
  }
  if (track) {
    record([x = Tensor<T>(x), gain = Tensor<T>(gain), bias = Tensor<T>(bias), out, m, n, xhat = std::move(xhat), inv_std = std::move(inv_std)]() mutable {
      auto go = out.grad();
      if (gain.requires_grad()) {
        auto gg = gain.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gg[j] += go[i * n + j] * xhat[i * n + j];
      }
      if (bias.requires_grad()) {
        auto gb = bias.grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gb[j] += go[i * n + j];
      }
      if (x.requires_grad()) {
        auto gx = x.grad();
        std::vector<T> dxhat(n);
        for (std::size_t i = 0; i < m; ++i) {
          T mean_d = 0, mean_dx = 0;
          for (std::size_t j = 0; j < n; ++j) {
            dxhat[j] = go[i * n + j] * gain[j];
            mean_d += dxhat[j];
            mean_dx += dxhat[j] * xhat[i * n + j];
          }
          mean_d /= static_cast<T>(n);
          mean_dx /= static_cast<T>(n);
          for (std::size_t j = 0; j < n; ++j) {
            gx[i * n + j] += inv_std[i] * (dxhat[j] - mean_d - xhat[i * n + j] * mean_dx);
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::gelu(const Tensor<T>& x) {
  constexpr T kAlpha = static_cast<T>(0.7978845608028654);  // sqrt(2/pi)
  constexpr T kBeta = static_cast<T>(0.044715);
  const bool track = tracks({&x});
  auto out = Tensor<T>::zeros(x.shape(), track);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T v = x[i];
    out[i] = T(0.5) * v * (T(1) + std::tanh(kAlpha * (v + kBeta * v * v * v)));
  }
  if (track) {
    record([x = Tensor<T>(x), out]() mutable {
      auto go = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < go.size(); ++i) {
        const T v = x[i];
        const T t = std::tanh(kAlpha * (v + kBeta * v * v * v));
        const T d = T(0.5) * (T(1) + t) +
                    T(0.5) * v * (T(1) - t * t) * kAlpha * (T(1) + T(3) * kBeta * v * v);
        gx[i] += go[i] * d;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::dropout(const Tensor<T>& x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  if (rate >= 1.0) throw ShapeError("dropout rate must be below 1");
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> mask(x.size());
  for (auto& m : mask) m = rng.bernoulli(rate) ? T(0) : keep_scale;
  const bool track = tracks({&x});
  auto out = Tensor<T>::zeros(x.shape(), track);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * mask[i];
  if (track) {
    record([x = Tensor<T>(x), out, mask = std::move(mask)]() mutable {
      auto go = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * mask[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::embedding_lookup(const Tensor<T>& table,
                                     std::span<const std::int32_t> ids) {
  require_matrix(table, "embedding_lookup");
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw ShapeError("embedding_lookup: id " + std::to_string(id) + " outside table of " +
                       std::to_string(vocab) + " rows");
    }
  }
  const bool track = tracks({&table});
  auto out = Tensor<T>::zeros({ids.size(), d}, track);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto src = static_cast<std::size_t>(ids[r]) * d;
    std::copy_n(table.values().begin() + static_cast<std::ptrdiff_t>(src), d,
                out.values().begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  if (track) {
    record([table = Tensor<T>(table), out, rows = std::vector<std::int32_t>(ids.begin(), ids.end()), d]() mutable {
      auto go = out.grad();
      auto gt = table.grad();
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto dst = static_cast<std::size_t>(rows[r]) * d;
        for (std::size_t j = 0; j < d; ++j) gt[dst + j] += go[r * d + j];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::select_rows(const Tensor<T>& x, std::span<const std::size_t> rows) {
  require_matrix(x, "select_rows");
  const std::size_t m = x.dim(0), n = x.dim(1);
  for (auto r : rows) {
    if (r >= m) throw ShapeError("select_rows: row " + std::to_string(r) + " out of range");
  }
  const bool track = tracks({&x});
  auto out = Tensor<T>::zeros({rows.size(), n}, track);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = x[rows[i] * n + j];
  if (track) {
    record([x = Tensor<T>(x), out, picked = std::vector<std::size_t>(rows.begin(), rows.end()), n]() mutable {
      auto go = out.grad();
      auto gx = x.grad();
      for (std::size_t i = 0; i < picked.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) gx[picked[i] * n + j] += go[i * n + j];
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::cross_entropy(const Tensor<T>& probs, std::span<const int> gold) {
  require_matrix(probs, "cross_entropy");
  const std::size_t n = probs.dim(0), c = probs.dim(1);
  if (gold.size() != n) {
    throw ShapeError("cross_entropy: " + std::to_string(gold.size()) + " labels for " +
                     std::to_string(n) + " rows");
  }
  for (auto g : gold) {
    if (g < 0 || static_cast<std::size_t>(g) >= c) {
      throw ShapeError("cross_entropy: gold class " + std::to_string(g) + " outside [0, " +
                       std::to_string(c) + ")");
    }
  }
  constexpr T kFloor = static_cast<T>(1e-12);
  T total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total -= std::log(std::max(probs[i * c + static_cast<std::size_t>(gold[i])], kFloor));
  }
  const bool track = tracks({&probs});
  auto out = Tensor<T>::scalar(total / static_cast<T>(n), track);
  if (track) {
    record([probs = Tensor<T>(probs), out, labels = std::vector<int>(gold.begin(), gold.end()), n, c]() mutable {
      const T g = out.grad()[0] / static_cast<T>(n);
      auto gp = probs.grad();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = i * c + static_cast<std::size_t>(labels[i]);
        if (probs[idx] >= kFloor) gp[idx] -= g / probs[idx];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Graph<T>::attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                              std::span<const std::uint8_t> key_mask, std::size_t batch,
                              std::size_t seq_len, std::size_t n_heads,
                              std::vector<T>* probs_out) {
  require_matrix(q, "attention");
  require_same_shape(q, k, "attention");
  require_same_shape(q, v, "attention");
  const std::size_t rows = q.dim(0), d_model = q.dim(1);
  if (rows != batch * seq_len || key_mask.size() != rows) {
    throw ShapeError("attention: " + std::to_string(rows) + " rows for batch " +
                     std::to_string(batch) + " x seq_len " + std::to_string(seq_len));
  }
  if (n_heads == 0 || d_model % n_heads != 0) {
    throw ShapeError("attention: d_model " + std::to_string(d_model) +
                     " not divisible by n_heads " + std::to_string(n_heads));
  }
  const std::size_t dh = d_model / n_heads;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
  constexpr T kMaskedScore = static_cast<T>(-1e9);

  const bool track = tracks({&q, &k, &v});
  auto out = Tensor<T>::zeros({rows, d_model}, track);
  // probs[((b * H + h) * L + i) * L + j]
  std::vector<T> probs(batch * n_heads * seq_len * seq_len);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < n_heads; ++h) {
      const std::size_t col = h * dh;
      for (std::size_t i = 0; i < seq_len; ++i) {
        T* p = &probs[((b * n_heads + h) * seq_len + i) * seq_len];
        const std::size_t qi = (b * seq_len + i) * d_model + col;
        T mx = std::numeric_limits<T>::lowest();
        for (std::size_t j = 0; j < seq_len; ++j) {
          const std::size_t kj = (b * seq_len + j) * d_model + col;
          T s = 0;
          for (std::size_t t = 0; t < dh; ++t) s += q[qi + t] * k[kj + t];
          s *= inv_sqrt;
          if (!key_mask[b * seq_len + j]) s += kMaskedScore;
          p[j] = s;
          mx = std::max(mx, s);
        }
        T denom = 0;
        for (std::size_t j = 0; j < seq_len; ++j) {
          p[j] = std::exp(p[j] - mx);
          denom += p[j];
        }
        for (std::size_t j = 0; j < seq_len; ++j) p[j] /= denom;
        for (std::size_t j = 0; j < seq_len; ++j) {
          const std::size_t vj = (b * seq_len + j) * d_model + col;
          for (std::size_t t = 0; t < dh; ++t) out[qi + t] += p[j] * v[vj + t];
        }
      }
    }
  }
  if (probs_out) *probs_out = probs;
  if (track) {
    record([q = Tensor<T>(q), k = Tensor<T>(k), v = Tensor<T>(v), out, probs = std::move(probs), batch, seq_len, n_heads, d_model, dh, inv_sqrt]() mutable {
      auto go = out.grad();
      T* gq = q.requires_grad() ? q.grad().data() : nullptr;
      T* gk = k.requires_grad() ? k.grad().data() : nullptr;
      T* gv = v.requires_grad() ? v.grad().data() : nullptr;
      std::vector<T> dp(seq_len);
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t h = 0; h < n_heads; ++h) {
          const std::size_t col = h * dh;
          for (std::size_t i = 0; i < seq_len; ++i) {
            const T* p = &probs[((b * n_heads + h) * seq_len + i) * seq_len];
            const std::size_t qi = (b * seq_len + i) * d_model + col;
            T dot = 0;
            for (std::size_t j = 0; j < seq_len; ++j) {
              const std::size_t vj = (b * seq_len + j) * d_model + col;
              T s = 0;
              for (std::size_t t = 0; t < dh; ++t) s += go[qi + t] * v[vj + t];
              dp[j] = s;
              dot += p[j] * s;
              if (gv)
                for (std::size_t t = 0; t < dh; ++t) gv[vj + t] += p[j] * go[qi + t];
            }
            for (std::size_t j = 0; j < seq_len; ++j) {
              const T ds = p[j] * (dp[j] - dot) * inv_sqrt;
              if (ds == T(0)) continue;
              const std::size_t kj = (b * seq_len + j) * d_model + col;
              if (gq)
                for (std::size_t t = 0; t < dh; ++t) gq[qi + t] += ds * k[kj + t];
              if (gk)
                for (std::size_t t = 0; t < dh; ++t) gk[kj + t] += ds * q[qi + t];
            }
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
void Graph<T>::backward(const Tensor<T>& loss) {
  if (consumed_) {
    throw GraphError("backward called twice on the same graph; record a new graph");
  }
  if (!loss.defined() || loss.size() != 1) {
    throw GraphError("backward needs a scalar loss");
  }
  if (!loss.requires_grad()) {
    throw GraphError("loss does not depend on any tensor that requires gradients");
  }
  consumed_ = true;
  Tensor<T> root = loss;
  root.grad()[0] = T(1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
  nodes_.clear();
}

template class Tensor<float>;
template class Tensor<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace infominer
