#include "htmlphish/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "htmlphish/error.hpp"

namespace htmlphish::nn {
namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                     t.shape_string());
  }
}

void require_same(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

Tensor embedding_forward(std::span<const std::uint32_t> ids, const Tensor& table) {
  require_rank(table, 2, "embedding");
  const std::size_t d = table.dim(1);
  Tensor out({ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= table.dim(0)) {
      throw ShapeError("embedding: index " + std::to_string(ids[i]) + " out of range for " +
                       std::to_string(table.dim(0)) + " rows");
    }
    std::copy_n(table.row(ids[i]).data(), d, out.row(i).data());
  }
  return out;
}

void embedding_backward(std::span<const std::uint32_t> ids, const Tensor& grad_out,
                        Tensor& table_grad) {
  require_rank(table_grad, 2, "embedding backward");
  if (grad_out.rank() != 2 || grad_out.dim(0) != ids.size() ||
      grad_out.dim(1) != table_grad.dim(1)) {
    throw ShapeError("embedding backward: gradient " + grad_out.shape_string() +
                     " does not match ids/table");
  }
  const std::size_t d = table_grad.dim(1);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= table_grad.dim(0)) throw ShapeError("embedding backward: index out of range");
    axpy(1.0, grad_out.row(i).data(), table_grad.row(ids[i]).data(), d);
  }
}

Tensor conv1d_forward(const Tensor& input, const Tensor& filters, const Tensor& bias) {
  require_rank(input, 2, "conv1d input");
  require_rank(filters, 3, "conv1d filters");
  require_rank(bias, 1, "conv1d bias");
  const std::size_t length = input.dim(0);
  const std::size_t depth = input.dim(1);
  const std::size_t nf = filters.dim(0);
  const std::size_t width = filters.dim(1);
  if (filters.dim(2) != depth || bias.dim(0) != nf) {
    throw ShapeError("conv1d: filters " + filters.shape_string() + " / bias " +
                     bias.shape_string() + " incompatible with input " + input.shape_string());
  }
  if (length < width) {
    throw ShapeError("conv1d: sequence length " + std::to_string(length) +
                     " shorter than kernel " + std::to_string(width));
  }
  const std::size_t out_len = length - width + 1;
  const std::size_t window = width * depth;
  Tensor out({out_len, nf});
  // Rows are contiguous, so each window is one flat run of width*depth values.
  const double* in = input.data().data();
  const double* w = filters.data().data();
  for (std::size_t i = 0; i < out_len; ++i) {
    const double* win = in + i * depth;
    double* o = out.row(i).data();
    for (std::size_t f = 0; f < nf; ++f) o[f] = dot(win, w + f * window, window) + bias[f];
  }
  return out;
}

Conv1dGrads conv1d_backward(const Tensor& input, const Tensor& filters, const Tensor& grad_out) {
  require_rank(grad_out, 2, "conv1d grad");
  const std::size_t depth = input.dim(1);
  const std::size_t nf = filters.dim(0);
  const std::size_t width = filters.dim(1);
  if (input.dim(0) < width || grad_out.dim(0) != input.dim(0) - width + 1 ||
      grad_out.dim(1) != nf) {
    throw ShapeError("conv1d backward: gradient " + grad_out.shape_string() +
                     " does not match forward shapes");
  }
  const std::size_t out_len = grad_out.dim(0);
  const std::size_t window = width * depth;
  Conv1dGrads g{Tensor(input.shape()), Tensor(filters.shape()), Tensor({nf})};
  const double* in = input.data().data();
  const double* w = filters.data().data();
  double* gin = g.input.data().data();
  double* gw = g.filters.data().data();
  for (std::size_t i = 0; i < out_len; ++i) {
    const double* go = grad_out.row(i).data();
    for (std::size_t f = 0; f < nf; ++f) {
      const double gf = go[f];
      if (gf == 0.0) continue;
      g.bias[f] += gf;
      axpy(gf, in + i * depth, gw + f * window, window);
      axpy(gf, w + f * window, gin + i * depth, window);
    }
  }
  return g;
}

Tensor relu_forward(const Tensor& input) {
  Tensor out = input;
  for (double& x : out.data()) x = x > 0.0 ? x : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  require_same(input, grad_out, "relu backward");
  Tensor g(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) g[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
  return g;
}

MaxPoolResult maxpool1d_forward(const Tensor& input, std::size_t pool) {
  require_rank(input, 2, "maxpool1d");
  if (pool == 0) throw ShapeError("maxpool1d: pool size must be positive");
  if (input.dim(0) < pool) {
    throw ShapeError("maxpool1d: length " + std::to_string(input.dim(0)) + " below pool size " +
                     std::to_string(pool));
  }
  const std::size_t out_len = input.dim(0) / pool;
  const std::size_t channels = input.dim(1);
  MaxPoolResult r{Tensor({out_len, channels}), std::vector<std::size_t>(out_len * channels)};
  for (std::size_t i = 0; i < out_len; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::size_t best = (i * pool) * channels + c;
      for (std::size_t k = 1; k < pool; ++k) {
        const std::size_t idx = (i * pool + k) * channels + c;
        if (input[idx] > input[best]) best = idx;
      }
      r.output(i, c) = input[best];
      r.argmax[i * channels + c] = best;
    }
  }
  return r;
}

Tensor maxpool1d_backward(const MaxPoolResult& forward, const Tensor& input,
                          const Tensor& grad_out) {
  require_same(forward.output, grad_out, "maxpool1d backward");
  Tensor g(input.shape());
  for (std::size_t j = 0; j < grad_out.size(); ++j) g[forward.argmax[j]] += grad_out[j];
  return g;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require_rank(input, 1, "dense input");
  require_rank(weights, 2, "dense weights");
  require_rank(bias, 1, "dense bias");
  const std::size_t k = input.dim(0);
  const std::size_t units = weights.dim(1);
  if (weights.dim(0) != k || bias.dim(0) != units) {
    throw ShapeError("dense: input " + input.shape_string() + ", weights " +
                     weights.shape_string() + ", bias " + bias.shape_string());
  }
  Tensor out = bias;
  double* o = out.data().data();
  for (std::size_t i = 0; i < k; ++i) {
    if (input[i] != 0.0) axpy(input[i], weights.row(i).data(), o, units);
  }
  return out;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out) {
  require_rank(grad_out, 1, "dense grad");
  const std::size_t k = input.dim(0);
  const std::size_t units = weights.dim(1);
  if (grad_out.dim(0) != units || weights.dim(0) != k) {
    throw ShapeError("dense backward: gradient " + grad_out.shape_string() +
                     " does not match weights " + weights.shape_string());
  }
  DenseGrads g{Tensor({k}), Tensor({k, units}), grad_out};
  const double* go = grad_out.data().data();
  for (std::size_t i = 0; i < k; ++i) {
    const double* w = weights.row(i).data();
    g.input[i] = dot(w, go, units);
    if (input[i] != 0.0) axpy(input[i], go, g.weights.row(i).data(), units);
  }
  return g;
}

DropoutResult dropout_forward(const Tensor& input, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  DropoutResult r{input, Tensor(input.shape(), 1.0)};
  if (mode == Mode::Infer || rate == 0.0) return r;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double m = rng.uniform() < rate ? 0.0 : keep_scale;
    r.mask[i] = m;
    r.output[i] = input[i] * m;
  }
  return r;
}

Tensor dropout_backward(const Tensor& mask, const Tensor& grad_out) {
  require_same(mask, grad_out, "dropout backward");
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= mask[i];
  return g;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid_forward(const Tensor& input) {
  Tensor out = input;
  for (double& x : out.data()) x = sigmoid(x);
  return out;
}

Tensor sigmoid_backward(const Tensor& output, const Tensor& grad_out) {
  require_same(output, grad_out, "sigmoid backward");
  Tensor g(output.shape());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_out[i] * output[i] * (1.0 - output[i]);
  return g;
}

LossResult bce_loss(double probability, int label) {
  constexpr double kClamp = 1e-12;
  const double y = label ? 1.0 : 0.0;
  const double p = std::clamp(probability, kClamp, 1.0 - kClamp);
  return {-(y * std::log(p) + (1.0 - y) * std::log1p(-p)), probability - y};
}

LossResult bce_with_logit(double logit, int label) {
  const double y = label ? 1.0 : 0.0;
  // log(1 + e^z) - y z, written so neither branch overflows.
  const double loss = std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
  return {loss, sigmoid(logit) - y};
}

}  // namespace htmlphish::nn
