#include "fedmho/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace fedmho {

OptimizerSpec OptimizerSpec::sgd(double lr, double momentum) {
  OptimizerSpec spec;
  spec.kind = Kind::SgdMomentum;
  spec.lr = lr;
  spec.momentum = momentum;
  spec.validate();
  return spec;
}

OptimizerSpec OptimizerSpec::adam(double lr, double beta1, double beta2, double epsilon) {
  OptimizerSpec spec;
  spec.kind = Kind::Adam;
  spec.lr = lr;
  spec.beta1 = beta1;
  spec.beta2 = beta2;
  spec.epsilon = epsilon;
  spec.validate();
  return spec;
}

void OptimizerSpec::validate() const {
  if (!(lr >= 0.0)) {
    throw std::invalid_argument("optimizer: learning rate must be >= 0");
  }
  if (kind == Kind::SgdMomentum) {
    if (!(momentum >= 0.0 && momentum < 1.0)) {
      throw std::invalid_argument("optimizer: momentum must be in [0, 1)");
    }
  } else {
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("optimizer: Adam betas must be in (0, 1)");
    }
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument("optimizer: Adam epsilon must be > 0");
    }
  }
}

Optimizer::Optimizer(OptimizerSpec spec, std::vector<Parameter*> params)
    : spec_(spec), params_(std::move(params)) {
  spec_.validate();
  if (params_.empty()) {
    throw std::invalid_argument("optimizer: empty parameter list");
  }
  momentum_.reserve(params_.size());
  for (const Parameter* p : params_) {
    if (p == nullptr) {
      throw std::invalid_argument("optimizer: null parameter");
    }
    momentum_.push_back(Tensor::zeros(p->value.shape));
  }
  if (spec_.kind == OptimizerSpec::Kind::Adam) {
    second_moment_.reserve(params_.size());
    for (const Parameter* p : params_) {
      second_moment_.push_back(Tensor::zeros(p->value.shape));
    }
  }
}

void Optimizer::step() {
  ++step_count_;
  if (spec_.kind == OptimizerSpec::Kind::SgdMomentum) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Parameter& p = *params_[i];
      Tensor& buf = momentum_[i];
      for (std::size_t j = 0; j < p.value.data.size(); ++j) {
        buf.data[j] = spec_.momentum * buf.data[j] + p.grad.data[j];
        p.value.data[j] -= spec_.lr * buf.data[j];
      }
    }
    return;
  }
  // Adam with bias correction.
  const double t = static_cast<double>(step_count_);
  const double bc1 = 1.0 - std::pow(spec_.beta1, t);
  const double bc2 = 1.0 - std::pow(spec_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    Tensor& m = momentum_[i];
    Tensor& v = second_moment_[i];
    for (std::size_t j = 0; j < p.value.data.size(); ++j) {
      const double g = p.grad.data[j];
      m.data[j] = spec_.beta1 * m.data[j] + (1.0 - spec_.beta1) * g;
      v.data[j] = spec_.beta2 * v.data[j] + (1.0 - spec_.beta2) * g * g;
      const double m_hat = m.data[j] / bc1;
      const double v_hat = v.data[j] / bc2;
      p.value.data[j] -= spec_.lr * m_hat / (std::sqrt(v_hat) + spec_.epsilon);
    }
  }
}

}  // namespace fedmho
