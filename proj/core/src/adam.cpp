#include "htmlphish/adam.hpp"

#include <cmath>

#include "htmlphish/error.hpp"

namespace htmlphish::nn {

AdamState AdamState::init(const AdamConfig& config, std::span<const Tensor* const> params) {
  AdamState s;
  s.config = config;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const Tensor* p : params) {
    s.m.emplace_back(p->shape());
    s.v.emplace_back(p->shape());
  }
  return s;
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ShapeError("adam: parameter, gradient and state counts differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k]->same_shape(*grads[k]) || !params[k]->same_shape(state.m[k])) {
      throw ShapeError("adam: shape mismatch for parameter " + std::to_string(k) + ": " +
                       params[k]->shape_string() + " vs grad " + grads[k]->shape_string());
    }
  }

  const auto& c = state.config;
  ++state.step;
  state.beta1_power *= c.beta1;
  state.beta2_power *= c.beta2;
  const double correction1 = 1.0 - state.beta1_power;
  const double correction2 = 1.0 - state.beta2_power;

  for (std::size_t k = 0; k < params.size(); ++k) {
    auto theta = params[k]->data();
    auto g = grads[k]->data();
    auto m = state.m[k].data();
    auto v = state.v[k].data();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace htmlphish::nn
