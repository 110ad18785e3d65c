#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "htmlphish/rng.hpp"
#include "htmlphish/tensor.hpp"

namespace htmlphish::nn {

enum class Mode { Train, Infer };

// Embedding gather: row i of the result is table row ids[i].
Tensor embedding_forward(std::span<const std::uint32_t> ids, const Tensor& table);
// Scatter-adds grad_out rows into table_grad; repeated ids accumulate.
void embedding_backward(std::span<const std::uint32_t> ids, const Tensor& grad_out,
                        Tensor& table_grad);

// Valid 1D convolution with stride 1.
//   input   [L, d]
//   filters [F, n, d]
//   bias    [F]
//   result  [L - n + 1, F]
Tensor conv1d_forward(const Tensor& input, const Tensor& filters, const Tensor& bias);

struct Conv1dGrads {
  Tensor input;
  Tensor filters;
  Tensor bias;
};
Conv1dGrads conv1d_backward(const Tensor& input, const Tensor& filters, const Tensor& grad_out);

Tensor relu_forward(const Tensor& input);
// Passes gradient where input > 0.
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

struct MaxPoolResult {
  Tensor output;                    // [floor(L / pool), F]
  std::vector<std::size_t> argmax;  // flat input index per output element
};
// Non-overlapping windows along axis 0; the first maximum wins ties and a
// trailing partial window is dropped.
MaxPoolResult maxpool1d_forward(const Tensor& input, std::size_t pool = 2);
Tensor maxpool1d_backward(const MaxPoolResult& forward, const Tensor& input,
                          const Tensor& grad_out);

// input [k] . weights [k, u] + bias [u]
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};
DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out);

struct DropoutResult {
  Tensor output;
  Tensor mask;  // 0 for dropped elements, 1 / (1 - rate) for survivors
};
// Inverted dropout. Infer mode and rate 0 are the identity and draw nothing
// from `rng`. Throws htmlphish::Error for rate outside [0, 1).
DropoutResult dropout_forward(const Tensor& input, double rate, Mode mode, Rng& rng);
Tensor dropout_backward(const Tensor& mask, const Tensor& grad_out);

double sigmoid(double x);
Tensor sigmoid_forward(const Tensor& input);
Tensor sigmoid_backward(const Tensor& output, const Tensor& grad_out);

struct LossResult {
  double loss;
  double logit_grad;  // dloss / dlogit = p - y
};

// Binary cross-entropy from a probability, clamped away from 0 and 1.
LossResult bce_loss(double probability, int label);
// Same loss evaluated from the pre-sigmoid logit without forming log(p).
LossResult bce_with_logit(double logit, int label);

}  // namespace htmlphish::nn
