#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fedmho {

// Dense row-major array of 64-bit floats. The substrate for every parameter,
// activation, and image in the simulator.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape_in);
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);

  std::size_t numel() const;
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  void fill(double value);
  bool all_finite() const;
  std::string shape_str() const;
};

// (m x k) * (k x n) -> (m x n). Throws std::invalid_argument on mismatch.
Tensor matmul(const Tensor& a, const Tensor& b);

// Throws std::invalid_argument if a and b differ in shape.
void check_same_shape(const Tensor& a, const Tensor& b, const char* where);

}  // namespace fedmho
