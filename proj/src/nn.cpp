#include "fedmho/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fedmho {

namespace {

constexpr double kLogFloor = 1e-12;

double apply_activation(Activation act, double x) {
  switch (act) {
    case Activation::Identity:
      return x;
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double activation_grad(Activation act, double preact) {
  switch (act) {
    case Activation::Identity:
      return 1.0;
    case Activation::Relu:
      return preact < 0.0 ? 0.0 : 1.0;
    case Activation::Sigmoid: {
      double s = 1.0 / (1.0 + std::exp(-preact));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

void softmax_into(const double* logits, double* out, std::size_t n) {
  double max_logit = logits[0];
  for (std::size_t i = 1; i < n; ++i) {
    max_logit = std::max(max_logit, logits[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    total += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] /= total;
  }
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw std::invalid_argument("softmax: empty input");
  }
  std::vector<double> out(logits.size());
  softmax_into(logits.data(), out.data(), logits.size());
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  if (logits.shape.size() != 2) {
    throw std::invalid_argument("softmax_rows: expected 2-D logits, got " + logits.shape_str());
  }
  std::size_t batch = logits.shape[0];
  std::size_t classes = logits.shape[1];
  Tensor out({batch, classes});
  for (std::size_t i = 0; i < batch; ++i) {
    softmax_into(logits.data.data() + i * classes, out.data.data() + i * classes, classes);
  }
  return out;
}

CrossEntropyResult cross_entropy(const Tensor& logits, std::span<const int> labels,
                                 Reduction reduction) {
  if (logits.shape.size() != 2) {
    throw std::invalid_argument("cross_entropy: expected 2-D logits, got " + logits.shape_str());
  }
  std::size_t batch = logits.shape[0];
  std::size_t classes = logits.shape[1];
  if (labels.size() != batch) {
    throw std::invalid_argument("cross_entropy: batch has " + std::to_string(batch) +
                                " rows but " + std::to_string(labels.size()) + " labels");
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw std::invalid_argument("cross_entropy: label " + std::to_string(label) +
                                  " out of range for " + std::to_string(classes) + " classes");
    }
  }
  double scale = reduction == Reduction::Mean ? 1.0 / static_cast<double>(batch) : 1.0;
  double loss = 0.0;
  Tensor grad({batch, classes});
  for (std::size_t i = 0; i < batch; ++i) {
    const double* row = logits.data.data() + i * classes;
    double max_logit = row[0];
    for (std::size_t c = 1; c < classes; ++c) {
      max_logit = std::max(max_logit, row[c]);
    }
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      sum_exp += std::exp(row[c] - max_logit);
    }
    double log_sum = max_logit + std::log(sum_exp);
    std::size_t y = static_cast<std::size_t>(labels[i]);
    loss += (log_sum - row[y]) * scale;
    double* grow = grad.data.data() + i * classes;
    for (std::size_t c = 0; c < classes; ++c) {
      grow[c] = std::exp(row[c] - log_sum) * scale;
    }
    grow[y] -= scale;
  }
  return {loss, std::move(grad)};
}

double kl_categorical(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw std::invalid_argument("kl_categorical: size mismatch or empty input");
  }
  double psum = 0.0;
  double qsum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) {
      throw std::invalid_argument("kl_categorical: negative entry");
    }
    psum += p[i];
    qsum += q[i];
  }
  if (std::abs(psum - 1.0) > 1e-9 || std::abs(qsum - 1.0) > 1e-9) {
    throw std::invalid_argument("kl_categorical: inputs must sum to 1");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) {
      continue;
    }
    kl += p[i] * (std::log(std::max(p[i], kLogFloor)) - std::log(std::max(q[i], kLogFloor)));
  }
  return kl;
}

DenseLayer::DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act)
    : weight(Tensor::zeros({in_dim, out_dim})), bias(Tensor::zeros({out_dim})), activation(act) {}

void DenseLayer::init_params(Rng& rng) {
  std::size_t fan_in = in_dim();
  std::size_t fan_out = out_dim();
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& w : weight.value.data) {
    w = rng.uniform(-limit, limit);
  }
  bias.value.fill(0.0);
}

Tensor DenseLayer::forward(const Tensor& input) const {
  Tensor preact;
  return forward_cached(input, preact);
}

Tensor DenseLayer::forward_cached(const Tensor& input, Tensor& preact) const {
  if (input.shape.size() != 2 || input.shape[1] != in_dim()) {
    throw std::invalid_argument("DenseLayer: input " + input.shape_str() + " does not match " +
                                std::to_string(in_dim()) + " inputs");
  }
  preact = matmul(input, weight.value);
  std::size_t batch = preact.shape[0];
  std::size_t width = preact.shape[1];
  for (std::size_t i = 0; i < batch; ++i) {
    double* row = preact.data.data() + i * width;
    for (std::size_t j = 0; j < width; ++j) {
      row[j] += bias.value[j];
    }
  }
  Tensor out({batch, width});
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = apply_activation(activation, preact.data[i]);
  }
  return out;
}

Tensor DenseLayer::backward(const Tensor& input, const Tensor& preact, const Tensor& upstream) {
  check_same_shape(preact, upstream, "DenseLayer::backward");
  Tensor delta(upstream.shape);
  for (std::size_t i = 0; i < delta.data.size(); ++i) {
    delta.data[i] = upstream.data[i] * activation_grad(activation, preact.data[i]);
  }
  return backward_preact(input, delta);
}

Tensor DenseLayer::backward_preact(const Tensor& input, const Tensor& delta) {
  std::size_t batch = input.shape[0];
  std::size_t in_width = in_dim();
  std::size_t out_width = out_dim();

  // dW[k][j] += sum_i input[i][k] * delta[i][j]
  for (std::size_t i = 0; i < batch; ++i) {
    const double* in_row = input.data.data() + i * in_width;
    const double* d_row = delta.data.data() + i * out_width;
    for (std::size_t k = 0; k < in_width; ++k) {
      double xik = in_row[k];
      double* g_row = weight.grad.data.data() + k * out_width;
      for (std::size_t j = 0; j < out_width; ++j) {
        g_row[j] += xik * d_row[j];
      }
    }
    for (std::size_t j = 0; j < out_width; ++j) {
      bias.grad[j] += d_row[j];
    }
  }

  // dX[i][k] = sum_j delta[i][j] * W[k][j]
  Tensor grad_input({batch, in_width});
  for (std::size_t i = 0; i < batch; ++i) {
    const double* d_row = delta.data.data() + i * out_width;
    double* gi_row = grad_input.data.data() + i * in_width;
    for (std::size_t k = 0; k < in_width; ++k) {
      const double* w_row = weight.value.data.data() + k * out_width;
      double acc = 0.0;
      for (std::size_t j = 0; j < out_width; ++j) {
        acc += d_row[j] * w_row[j];
      }
      gi_row[k] = acc;
    }
  }
  return grad_input;
}

}  // namespace fedmho
