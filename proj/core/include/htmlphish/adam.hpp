#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "htmlphish/tensor.hpp"

namespace htmlphish::nn {

struct AdamConfig {
  double learning_rate = 0.0015;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  // beta^t, tracked by repeated multiplication so every platform agrees.
  double beta1_power = 1.0;
  double beta2_power = 1.0;

  // Zero moments shaped like `params`.
  static AdamState init(const AdamConfig& config, std::span<const Tensor* const> params);
};

// One bias-corrected Adam update of every tensor in `params`.
// Throws ShapeError when a gradient or moment tensor does not match its parameter.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               AdamState& state);

}  // namespace htmlphish::nn
