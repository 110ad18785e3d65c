#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>

#include "htmlphish/rng.hpp"
#include "htmlphish/tensor.hpp"

namespace htmlphish::testing {

inline constexpr double kGradTolerance = 1e-6;
inline constexpr double kFdStep = 1e-5;

// |a - n| / max(|a|, |n|), with a tiny floor so two exact zeros compare as 0.
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / scale;
}

// Central difference (f(x + h) - f(x - h)) / 2h at x[i]; x is restored
// afterwards.
inline double numeric_derivative(nn::Tensor& x, std::size_t i, const std::function<double()>& f,
                                 double h = kFdStep) {
  const double saved = x[i];
  auto at = [&](double offset) {
    x[i] = saved + offset;
    return f();
  };
  const double d = (at(h) - at(-h)) / (2 * h);
  x[i] = saved;
  return d;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;

  bool ok(double tolerance = kGradTolerance) const { return max_rel_error <= tolerance; }
};

// Compares `analytic` against the numeric gradient of f with respect to
// every element of x.
inline GradCheck check_gradient(nn::Tensor& x, const nn::Tensor& analytic,
                                const std::function<double()>& f) {
  GradCheck out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double err = relative_error(analytic[i], numeric_derivative(x, i, f));
    if (err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst_index = i;
    }
    ++out.checked;
  }
  return out;
}

inline void merge(GradCheck& into, const GradCheck& other) {
  if (other.max_rel_error > into.max_rel_error) {
    into.max_rel_error = other.max_rel_error;
    into.worst_index = other.worst_index;
  }
  into.checked += other.checked;
}

inline nn::Tensor random_tensor(std::initializer_list<std::size_t> shape, nn::Rng& rng,
                                double lo = -1.0, double hi = 1.0) {
  nn::Tensor t(shape);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// Sum of out * weights: a scalar probe whose gradient w.r.t. out is weights.
inline double probe(const nn::Tensor& out, const nn::Tensor& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
  return s;
}

}  // namespace htmlphish::testing
