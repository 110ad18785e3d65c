#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace htmlphish::nn {

// Dense row-major array of doubles with rank 1 to 3.
class Tensor {
 public:
  static constexpr std::size_t kMaxRank = 3;

  Tensor() : Tensor({0}) {}
  explicit Tensor(std::span<const std::size_t> shape, double fill = 0.0);
  Tensor(std::initializer_list<std::size_t> shape, double fill = 0.0)
      : Tensor(std::span<const std::size_t>(shape.begin(), shape.size()), fill) {}

  // Throws ShapeError when data.size() != product(shape).
  static Tensor from(std::initializer_list<std::size_t> shape, std::vector<double> data);
  static Tensor from(std::span<const std::size_t> shape, std::vector<double> data);

  std::size_t rank() const { return rank_; }
  std::size_t dim(std::size_t axis) const { return dims_[axis]; }
  std::span<const std::size_t> shape() const { return {dims_.data(), rank_}; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor& other) const;
  std::string shape_string() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dims_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dims_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  // Contiguous slice along the leading axis.
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;

  void fill(double value);
  // Element-wise this += scale * other.
  void add_scaled(const Tensor& other, double scale);
  // Same shape, viewed with a different rank/extent list.
  Tensor reshaped(std::span<const std::size_t> shape) const;
  Tensor reshaped(std::initializer_list<std::size_t> shape) const {
    return reshaped(std::span<const std::size_t>(shape.begin(), shape.size()));
  }

  bool all_finite() const;

  // Exact comparison: identical shape and identical bit patterns.
  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  std::array<std::size_t, kMaxRank> dims_{};
  std::size_t rank_ = 0;
  std::vector<double> data_;
};

}  // namespace htmlphish::nn
