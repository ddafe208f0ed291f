#include "fedmho/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fedmho {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    n *= d;
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_in)
    : shape(std::move(shape_in)), data(shape_product(shape), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
  if (shape_product(shape) != data.size()) {
    throw std::invalid_argument("Tensor: shape " + shape_str() + " does not match data length " +
                                std::to_string(data.size()));
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  return Tensor(std::move(shape));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

std::size_t Tensor::numel() const {
  return data.size();
}

std::size_t Tensor::rows() const {
  return shape.empty() ? 0 : shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() == 1) {
    return shape[0];
  }
  return shape.size() < 2 ? 0 : shape[1];
}

double& Tensor::at(std::size_t r, std::size_t c) {
  return data[r * cols() + c];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return data[r * cols() + c];
}

void Tensor::fill(double value) {
  for (auto& x : data) {
    x = value;
  }
}

bool Tensor::all_finite() const {
  for (double x : data) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    os << shape[i] << (i + 1 < shape.size() ? "x" : "");
  }
  os << "]";
  return os.str();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2) {
    throw std::invalid_argument("matmul: expected 2-D tensors, got " + a.shape_str() + " and " +
                                b.shape_str());
  }
  std::size_t m = a.shape[0];
  std::size_t k = a.shape[1];
  std::size_t n = b.shape[1];
  if (b.shape[0] != k) {
    throw std::invalid_argument("matmul: inner dimensions disagree, " + a.shape_str() + " vs " +
                                b.shape_str());
  }
  Tensor out({m, n});
  const double* ap = a.data.data();
  const double* bp = b.data.data();
  double* op = out.data.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = op + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      double aik = ap[i * k + kk];
      const double* brow = bp + kk * n;
      for (std::size_t j = 0; j < n; ++j) {
        orow[j] += aik * brow[j];
      }
    }
  }
  return out;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* where) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(where) + ": shape mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  }
}

}  // namespace fedmho
