#pragma once

#include <vector>

#include "fedmho/nn.hpp"

namespace fedmho {

struct OptimizerSpec {
  enum class Kind { SgdMomentum, Adam };

  Kind kind = Kind::SgdMomentum;
  double lr = 0.01;
  double momentum = 0.0;   // SGD only
  double beta1 = 0.9;      // Adam only
  double beta2 = 0.999;    // Adam only
  double epsilon = 1e-8;   // Adam only

  static OptimizerSpec sgd(double lr, double momentum);
  static OptimizerSpec adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                            double epsilon = 1e-8);

  // lr >= 0 (lr == 0 is a valid null update), 0 <= momentum < 1,
  // 0 < beta1, beta2 < 1, epsilon > 0. Throws std::invalid_argument.
  void validate() const;
};

// Owns per-parameter moment buffers for a fixed registration of parameters.
class Optimizer {
public:
  Optimizer(OptimizerSpec spec, std::vector<Parameter*> params);

  // Applies one update from the accumulated gradients. Does not zero them.
  void step();

  const OptimizerSpec& spec() const { return spec_; }
  std::size_t step_count() const { return step_count_; }

  // Moment buffers, exposed for tests: SGD uses momentum_ only.
  const std::vector<Tensor>& momentum_buffers() const { return momentum_; }
  const std::vector<Tensor>& second_moment_buffers() const { return second_moment_; }

private:
  OptimizerSpec spec_;
  std::vector<Parameter*> params_;
  std::vector<Tensor> momentum_;       // SGD velocity or Adam first moment
  std::vector<Tensor> second_moment_;  // Adam only
  std::size_t step_count_ = 0;
};

}  // namespace fedmho
