#pragma once

#include <cstdint>
#include <vector>

#include "fedmho/data.hpp"
#include "fedmho/mlp.hpp"

namespace fedmho {

struct EvalReport {
  double top1 = 0.0;
  std::vector<double> per_class_accuracy;           // [N_c]
  std::vector<std::vector<std::int64_t>> confusion; // [N_c][N_c], rows = true class
};

// Argmax prediction with ties broken toward the lowest class index.
EvalReport top1_accuracy(const MlpClassifier& model, const Dataset& test);

// Total-variation distance between the normalized histograms, 0.5 * sum |p - q|.
double tv_distance(const LabelDistribution& p, const LabelDistribution& q);

}  // namespace fedmho
