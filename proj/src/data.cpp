#include "fedmho/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace fedmho {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr double kCenterScale = 1.5;  // std-dev of blob center coordinates

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path, const char* field) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw std::runtime_error(path + ": truncated while reading " + field);
  }
  return (std::uint32_t(bytes[0]) << 24) | (std::uint32_t(bytes[1]) << 16) |
         (std::uint32_t(bytes[2]) << 8) | std::uint32_t(bytes[3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
  unsigned char bytes[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

void Dataset::validate() const {
  if (images.shape.size() != 2) {
    throw std::invalid_argument("Dataset: images must be [N, D], got " + images.shape_str());
  }
  if (images.shape[0] != labels.size()) {
    throw std::invalid_argument("Dataset: image/label count mismatch");
  }
  for (double v : images.data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("Dataset: pixel outside [0, 1]");
    }
  }
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw std::invalid_argument("Dataset: label " + std::to_string(label) +
                                  " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

std::int64_t LabelDistribution::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) {
    throw std::runtime_error(images_path + ": cannot open image file");
  }
  const std::uint32_t img_magic = read_u32_be(img, images_path, "image magic");
  if (img_magic != kImageMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "bad image magic 0x%08x (want 0x%08x)", img_magic,
                  kImageMagic);
    throw std::runtime_error(images_path + ": " + buf);
  }
  const std::uint32_t count = read_u32_be(img, images_path, "image count");
  const std::uint32_t rows = read_u32_be(img, images_path, "image rows");
  const std::uint32_t cols = read_u32_be(img, images_path, "image cols");
  const std::size_t dim = std::size_t(rows) * cols;
  std::vector<unsigned char> pixels(std::size_t(count) * dim);
  if (!img.read(reinterpret_cast<char*>(pixels.data()),
                static_cast<std::streamsize>(pixels.size()))) {
    throw std::runtime_error(images_path + ": truncated while reading pixel data");
  }

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) {
    throw std::runtime_error(labels_path + ": cannot open label file");
  }
  const std::uint32_t lab_magic = read_u32_be(lab, labels_path, "label magic");
  if (lab_magic != kLabelMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "bad label magic 0x%08x (want 0x%08x)", lab_magic,
                  kLabelMagic);
    throw std::runtime_error(labels_path + ": " + buf);
  }
  const std::uint32_t lab_count = read_u32_be(lab, labels_path, "label count");
  if (lab_count != count) {
    throw std::runtime_error(labels_path + ": label count " + std::to_string(lab_count) +
                             " does not match image count " + std::to_string(count));
  }
  std::vector<unsigned char> raw_labels(lab_count);
  if (!lab.read(reinterpret_cast<char*>(raw_labels.data()),
                static_cast<std::streamsize>(raw_labels.size()))) {
    throw std::runtime_error(labels_path + ": truncated while reading label data");
  }

  Dataset ds;
  ds.images = Tensor({count, dim});
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    ds.images.data[i] = pixels[i] / 255.0;
  }
  ds.labels.resize(count);
  int max_label = -1;
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    ds.labels[i] = raw_labels[i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.num_classes = static_cast<std::size_t>(max_label + 1);
  return ds;
}

void write_idx(const Dataset& dataset, const std::string& images_path,
               const std::string& labels_path) {
  dataset.validate();
  const std::size_t n = dataset.size();
  const std::size_t dim = dataset.dim();

  std::ofstream img(images_path, std::ios::binary);
  if (!img) {
    throw std::runtime_error(images_path + ": cannot open for writing");
  }
  write_u32_be(img, kImageMagic);
  write_u32_be(img, static_cast<std::uint32_t>(n));
  write_u32_be(img, 1);
  write_u32_be(img, static_cast<std::uint32_t>(dim));
  std::vector<unsigned char> pixels(n * dim);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<unsigned char>(std::lround(dataset.images.data[i] * 255.0));
  }
  img.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!img) {
    throw std::runtime_error(images_path + ": write failed");
  }

  std::ofstream lab(labels_path, std::ios::binary);
  if (!lab) {
    throw std::runtime_error(labels_path + ": cannot open for writing");
  }
  write_u32_be(lab, kLabelMagic);
  write_u32_be(lab, static_cast<std::uint32_t>(n));
  std::vector<unsigned char> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dataset.labels[i] > 255) {
      throw std::runtime_error(labels_path + ": label does not fit in a byte");
    }
    raw[i] = static_cast<unsigned char>(dataset.labels[i]);
  }
  lab.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!lab) {
    throw std::runtime_error(labels_path + ": write failed");
  }
}

Tensor blob_centers(std::size_t num_classes, std::size_t dim, std::uint64_t seed) {
  Rng rng(mix_seed(seed, seed_tags::kDatasetCenters));
  Tensor centers({num_classes, dim});
  for (double& v : centers.data) {
    v = kCenterScale * rng.normal();
  }
  return centers;
}

Dataset make_blobs(std::size_t num_classes, std::size_t per_class, std::size_t dim,
                   double spread, std::uint64_t seed) {
  if (num_classes == 0 || per_class == 0 || dim == 0) {
    throw std::invalid_argument("make_blobs: num_classes, per_class, dim must all be >= 1");
  }
  Tensor centers = blob_centers(num_classes, dim, seed);
  Rng noise(mix_seed(seed, seed_tags::kDatasetNoise));

  Dataset ds;
  ds.num_classes = num_classes;
  ds.images = Tensor({num_classes * per_class, dim});
  ds.labels.resize(num_classes * per_class);
  std::size_t row = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double* center = centers.data.data() + c * dim;
    for (std::size_t i = 0; i < per_class; ++i, ++row) {
      double* dst = ds.images.data.data() + row * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        dst[j] = sigmoid(center[j] + spread * noise.normal());
      }
      ds.labels[row] = static_cast<int>(c);
    }
  }
  return ds;
}

Partition dirichlet_partition(const Dataset& dataset, std::size_t num_clients, double alpha,
                              std::uint64_t seed) {
  if (num_clients == 0) {
    throw std::invalid_argument("dirichlet_partition: need at least one client");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("dirichlet_partition: alpha must be > 0");
  }
  if (dataset.size() < num_clients) {
    throw std::invalid_argument("dirichlet_partition: dataset smaller than client count");
  }

  Rng rng(mix_seed(seed, seed_tags::kPartition));
  Partition part;
  part.alpha = alpha;
  part.seed = seed;
  part.client_indices.assign(num_clients, {});

  for (std::size_t c = 0; c < dataset.num_classes; ++c) {
    std::vector<std::size_t> class_rows;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.labels[i] == static_cast<int>(c)) {
        class_rows.push_back(i);
      }
    }
    if (class_rows.empty()) {
      continue;
    }
    rng.shuffle(class_rows);
    std::vector<double> props = rng.dirichlet(alpha, num_clients);

    // Largest-remainder rounding of props * n into integer quotas.
    const double n = static_cast<double>(class_rows.size());
    std::vector<std::size_t> quota(num_clients);
    std::vector<std::pair<double, std::size_t>> remainder(num_clients);
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < num_clients; ++k) {
      const double exact = props[k] * n;
      quota[k] = static_cast<std::size_t>(std::floor(exact));
      remainder[k] = {exact - std::floor(exact), k};
      assigned += quota[k];
    }
    std::stable_sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t extra = 0; extra < class_rows.size() - assigned; ++extra) {
      ++quota[remainder[extra % num_clients].second];
    }

    std::size_t cursor = 0;
    for (std::size_t k = 0; k < num_clients; ++k) {
      for (std::size_t j = 0; j < quota[k]; ++j) {
        part.client_indices[k].push_back(class_rows[cursor++]);
      }
    }
  }

  // Repair: every client must end up with at least one sample.
  for (std::size_t k = 0; k < num_clients; ++k) {
    if (!part.client_indices[k].empty()) {
      continue;
    }
    std::size_t donor = 0;
    for (std::size_t j = 1; j < num_clients; ++j) {
      if (part.client_indices[j].size() > part.client_indices[donor].size()) {
        donor = j;
      }
    }
    if (part.client_indices[donor].size() <= 1) {
      throw std::runtime_error("dirichlet_partition: cannot repair empty client");
    }
    part.client_indices[k].push_back(part.client_indices[donor].back());
    part.client_indices[donor].pop_back();
  }
  return part;
}

LabelDistribution label_histogram(const Dataset& dataset,
                                  const std::vector<std::size_t>& indices) {
  LabelDistribution dist;
  dist.counts.assign(dataset.num_classes, 0);
  for (std::size_t idx : indices) {
    if (idx >= dataset.size()) {
      throw std::invalid_argument("label_histogram: index " + std::to_string(idx) +
                                  " out of range");
    }
    ++dist.counts[static_cast<std::size_t>(dataset.labels[idx])];
  }
  return dist;
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  const std::size_t dim = dataset.dim();
  Dataset out;
  out.num_classes = dataset.num_classes;
  out.images = Tensor({indices.size(), dim});
  out.labels.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t idx = indices[i];
    if (idx >= dataset.size()) {
      throw std::invalid_argument("subset: index out of range");
    }
    const double* src = dataset.images.data.data() + idx * dim;
    std::copy(src, src + dim, out.images.data.data() + i * dim);
    out.labels[i] = dataset.labels[idx];
  }
  return out;
}

}  // namespace fedmho
