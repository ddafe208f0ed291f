#include "fedmho/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fedmho {

EvalReport top1_accuracy(const MlpClassifier& model, const Dataset& test) {
  if (model.num_classes() != test.num_classes) {
    throw std::invalid_argument("top1_accuracy: model output width != dataset class count");
  }
  const std::size_t num_classes = test.num_classes;
  EvalReport report;
  report.confusion.assign(num_classes, std::vector<std::int64_t>(num_classes, 0));

  Tensor logits = model.forward(test.images);
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double* row = logits.data.data() + i * num_classes;
    std::size_t pred = 0;
    for (std::size_t c = 1; c < num_classes; ++c) {
      if (row[c] > row[pred]) {
        pred = c;
      }
    }
    const std::size_t truth = static_cast<std::size_t>(test.labels[i]);
    ++report.confusion[truth][pred];
    if (pred == truth) {
      ++correct;
    }
  }

  report.top1 = test.size() == 0 ? 0.0 : static_cast<double>(correct) / test.size();
  report.per_class_accuracy.assign(num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::int64_t row_total = 0;
    for (std::int64_t v : report.confusion[c]) {
      row_total += v;
    }
    if (row_total > 0) {
      report.per_class_accuracy[c] = static_cast<double>(report.confusion[c][c]) / row_total;
    }
  }
  return report;
}

double tv_distance(const LabelDistribution& p, const LabelDistribution& q) {
  if (p.counts.size() != q.counts.size()) {
    throw std::invalid_argument("tv_distance: histogram length mismatch");
  }
  const double p_total = static_cast<double>(p.total());
  const double q_total = static_cast<double>(q.total());
  if (p_total <= 0.0 || q_total <= 0.0) {
    throw std::invalid_argument("tv_distance: zero-total histogram");
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < p.counts.size(); ++c) {
    acc += std::abs(p.counts[c] / p_total - q.counts[c] / q_total);
  }
  return 0.5 * acc;
}

}  // namespace fedmho
