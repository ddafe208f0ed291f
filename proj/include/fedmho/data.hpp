#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fedmho/rng.hpp"
#include "fedmho/tensor.hpp"

namespace fedmho {

// Immutable labeled dataset: row-major images in [0,1], one integer label per row.
struct Dataset {
  Tensor images;            // [N, D]
  std::vector<int> labels;  // [N], entries in [0, num_classes)
  std::size_t num_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return images.shape.size() == 2 ? images.shape[1] : 0; }

  // Throws std::invalid_argument when any invariant fails.
  void validate() const;
};

// Per-class sample counts for one client's local data.
struct LabelDistribution {
  std::vector<std::int64_t> counts;

  std::int64_t total() const;
};

// Assignment of dataset rows to clients.
struct Partition {
  std::vector<std::vector<std::size_t>> client_indices;
  double alpha = 0.0;
  std::uint64_t seed = 0;
};

// Reads an IDX image/label file pair (the MNIST-family archive format:
// big-endian magic 0x803 for images, 0x801 for labels). Pixels are scaled from
// [0,255] bytes to [0,1]; num_classes = max label + 1.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Inverse of load_idx: images as rows*cols bytes (rounded from [0,1]), labels
// as bytes. Round-trips bit-exactly with load_idx.
void write_idx(const Dataset& dataset, const std::string& images_path,
               const std::string& labels_path);

// Fixed per-class Gaussian centers used by make_blobs, [num_classes, dim].
Tensor blob_centers(std::size_t num_classes, std::size_t dim, std::uint64_t seed);

// Synthetic dataset: sample = sigmoid(center_c + spread * eps), eps ~ N(0, I).
// Rows are class-major (all of class 0, then class 1, ...). Deterministic per seed.
Dataset make_blobs(std::size_t num_classes, std::size_t per_class, std::size_t dim,
                   double spread, std::uint64_t seed);

// Non-IID split: for each class, proportions ~ Dir(alpha * 1_K) turned into
// integer quotas by largest-remainder rounding over that class's shuffled
// indices. Every row is assigned; clients left empty are repaired by taking one
// sample from the largest client.
Partition dirichlet_partition(const Dataset& dataset, std::size_t num_clients, double alpha,
                              std::uint64_t seed);

LabelDistribution label_histogram(const Dataset& dataset, const std::vector<std::size_t>& indices);

// Convenience: materializes the subset of `dataset` selected by `indices`.
Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices);

}  // namespace fedmho
