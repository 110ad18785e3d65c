#include "htmlphish/tensor.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>

#include "htmlphish/error.hpp"

namespace htmlphish::nn {
namespace {

std::size_t product(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::span<const std::size_t> shape, double fill) {
  if (shape.empty() || shape.size() > kMaxRank) {
    throw ShapeError("tensor rank must be between 1 and 3");
  }
  rank_ = shape.size();
  std::copy(shape.begin(), shape.end(), dims_.begin());
  data_.assign(product(shape), fill);
}

Tensor Tensor::from(std::initializer_list<std::size_t> shape, std::vector<double> data) {
  return from(std::span<const std::size_t>(shape.begin(), shape.size()), std::move(data));
}

Tensor Tensor::from(std::span<const std::size_t> shape, std::vector<double> data) {
  Tensor t(shape);
  if (data.size() != t.size()) {
    throw ShapeError("tensor " + t.shape_string() + " needs " + std::to_string(t.size()) +
                     " values, got " + std::to_string(data.size()));
  }
  t.data_ = std::move(data);
  return t;
}

bool Tensor::same_shape(const Tensor& other) const {
  return rank_ == other.rank_ && std::equal(dims_.begin(), dims_.begin() + rank_, other.dims_.begin());
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) s += ",";
    s += std::to_string(dims_[i]);
  }
  return s + "]";
}

std::span<double> Tensor::row(std::size_t i) {
  const std::size_t stride = size() / dims_[0];
  return std::span<double>(data_).subspan(i * stride, stride);
}

std::span<const double> Tensor::row(std::size_t i) const {
  const std::size_t stride = size() / dims_[0];
  return std::span<const double>(data_).subspan(i * stride, stride);
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Tensor::add_scaled(const Tensor& other, double scale) {
  if (!same_shape(other)) {
    throw ShapeError("add_scaled: " + shape_string() + " vs " + other.shape_string());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

Tensor Tensor::reshaped(std::span<const std::size_t> shape) const {
  if (product(shape) != size()) {
    throw ShapeError("cannot reshape " + shape_string() + " to " + std::to_string(product(shape)) +
                     " elements");
  }
  Tensor t(shape);
  t.data_ = data_;
  return t;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.same_shape(b) &&
         (a.data_.empty() ||
          std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(double)) == 0);
}

}  // namespace htmlphish::nn
