#pragma once

#include <span>
#include <vector>

#include "fedmho/rng.hpp"
#include "fedmho/tensor.hpp"

namespace fedmho {

// Trainable value with an accumulated gradient of identical shape.
// Gradients accumulate across calls; training loops zero them between batches.
struct Parameter {
  Tensor value;
  Tensor grad;

  Parameter() = default;
  explicit Parameter(Tensor v) : value(std::move(v)), grad(Tensor::zeros(value.shape)) {}

  void zero_grad() { grad.fill(0.0); }
};

enum class Activation { Identity, Relu, Sigmoid };

enum class Reduction { Sum, Mean };

// One-row softmax with max-subtraction.
std::vector<double> softmax(std::span<const double> logits);

// Row-wise softmax of a [B x C] tensor.
Tensor softmax_rows(const Tensor& logits);

struct CrossEntropyResult {
  double loss;
  Tensor grad_logits;
};

// Cross-entropy from logits via fused log-softmax. Sum reduction adds the
// per-row losses; Mean divides loss and gradient by the batch size.
CrossEntropyResult cross_entropy(const Tensor& logits, std::span<const int> labels,
                                 Reduction reduction = Reduction::Sum);

// KL(p || q) for probability vectors, with 0*log(0/q) = 0 and both log
// arguments floored at 1e-12 so bitwise-equal inputs give exactly zero.
double kl_categorical(std::span<const double> p, std::span<const double> q);

// Fully connected layer: output = activation(input * W + b).
struct DenseLayer {
  Parameter weight;  // in x out
  Parameter bias;    // out
  Activation activation = Activation::Identity;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act);

  std::size_t in_dim() const { return weight.value.shape[0]; }
  std::size_t out_dim() const { return weight.value.shape[1]; }

  // Glorot-uniform weights, zero biases.
  void init_params(Rng& rng);

  Tensor forward(const Tensor& input) const;

  // forward that also hands back the pre-activation needed by backward.
  Tensor forward_cached(const Tensor& input, Tensor& preact) const;

  // Accumulates parameter gradients and returns the gradient w.r.t. input.
  Tensor backward(const Tensor& input, const Tensor& preact, const Tensor& upstream);

  // backward where `delta` is already the gradient w.r.t. the pre-activation
  // (used by losses fused with the output nonlinearity).
  Tensor backward_preact(const Tensor& input, const Tensor& delta);
};

}  // namespace fedmho
