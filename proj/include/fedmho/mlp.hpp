#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedmho/nn.hpp"
#include "fedmho/rng.hpp"

namespace fedmho {

// Fully connected classifier: ReLU on hidden layers, identity on the output
// layer (logits). dims = [in, hidden..., num_classes], at least [in, out].
class MlpClassifier {
public:
  explicit MlpClassifier(std::vector<std::size_t> dims);

  void init_params(Rng& rng);

  std::size_t in_dim() const { return dims_.front(); }
  std::size_t num_classes() const { return dims_.back(); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  // [B, in] -> logits [B, num_classes].
  Tensor forward(const Tensor& input) const;

  // Forward pass that keeps per-layer inputs and pre-activations for backward.
  Tensor forward_cached(const Tensor& input, std::vector<Tensor>& inputs,
                        std::vector<Tensor>& preacts) const;

  // Backprop of an arbitrary logits gradient; accumulates parameter gradients.
  void backward(const std::vector<Tensor>& inputs, const std::vector<Tensor>& preacts,
                Tensor grad_logits);

  // Cross-entropy over a batch; accumulates gradients into the parameters.
  double loss_and_grad(const Tensor& input, std::span<const int> labels,
                       Reduction reduction);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  void zero_grad();

  // Deep copy (values and grads).
  MlpClassifier clone() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

private:
  std::vector<std::size_t> dims_;
  std::vector<DenseLayer> layers_;
};

}  // namespace fedmho
