#include "fedmho/mlp.hpp"

#include <stdexcept>

namespace fedmho {

MlpClassifier::MlpClassifier(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) {
    throw std::invalid_argument("mlp: need at least [in, out] dims");
  }
  for (std::size_t d : dims_) {
    if (d == 0) {
      throw std::invalid_argument("mlp: zero layer width");
    }
  }
  layers_.reserve(dims_.size() - 1);
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
    const bool last = (i + 2 == dims_.size());
    layers_.emplace_back(dims_[i], dims_[i + 1],
                         last ? Activation::Identity : Activation::Relu);
  }
}

void MlpClassifier::init_params(Rng& rng) {
  for (DenseLayer& layer : layers_) {
    layer.init_params(rng);
  }
}

Tensor MlpClassifier::forward(const Tensor& input) const {
  Tensor h = input;
  for (const DenseLayer& layer : layers_) {
    h = layer.forward(h);
  }
  return h;
}

Tensor MlpClassifier::forward_cached(const Tensor& input, std::vector<Tensor>& inputs,
                                     std::vector<Tensor>& preacts) const {
  inputs.clear();
  preacts.assign(layers_.size(), Tensor());
  inputs.reserve(layers_.size());
  inputs.push_back(input);
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    inputs.push_back(layers_[i].forward_cached(inputs.back(), preacts[i]));
  }
  return layers_.back().forward_cached(inputs.back(), preacts.back());
}

void MlpClassifier::backward(const std::vector<Tensor>& inputs,
                             const std::vector<Tensor>& preacts, Tensor grad_logits) {
  Tensor upstream = std::move(grad_logits);
  for (std::size_t j = layers_.size(); j-- > 0;) {
    upstream = layers_[j].backward(inputs[j], preacts[j], upstream);
  }
}

double MlpClassifier::loss_and_grad(const Tensor& input, std::span<const int> labels,
                                    Reduction reduction) {
  std::vector<Tensor> inputs;
  std::vector<Tensor> preacts;
  Tensor logits = forward_cached(input, inputs, preacts);
  CrossEntropyResult ce = cross_entropy(logits, labels, reduction);
  backward(inputs, preacts, std::move(ce.grad_logits));
  return ce.loss;
}

std::vector<Parameter*> MlpClassifier::parameters() {
  std::vector<Parameter*> params;
  params.reserve(2 * layers_.size());
  for (DenseLayer& layer : layers_) {
    params.push_back(&layer.weight);
    params.push_back(&layer.bias);
  }
  return params;
}

std::vector<const Parameter*> MlpClassifier::parameters() const {
  std::vector<const Parameter*> params;
  params.reserve(2 * layers_.size());
  for (const DenseLayer& layer : layers_) {
    params.push_back(&layer.weight);
    params.push_back(&layer.bias);
  }
  return params;
}

void MlpClassifier::zero_grad() {
  for (DenseLayer& layer : layers_) {
    layer.weight.zero_grad();
    layer.bias.zero_grad();
  }
}

MlpClassifier MlpClassifier::clone() const { return *this; }

}  // namespace fedmho
