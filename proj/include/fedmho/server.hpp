#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fedmho/client.hpp"
#include "fedmho/mlp.hpp"
#include "fedmho/optim.hpp"

namespace fedmho {

// Server-side training variants: plain fused training, multi-teacher
// distillation, self-distillation, and the optional combined form.
enum class Variant { FedMho, FedMhoMd, FedMhoSd, FedMhoMdSd };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);

// Labeled synthetic samples decoded server-side, with provenance.
struct SyntheticDataset {
  Tensor samples;                          // [M, D], entries in (0,1)
  std::vector<int> labels;                 // [M]
  std::vector<std::size_t> source_client;  // [M]
  std::size_t num_classes = 0;

  std::size_t size() const { return labels.size(); }
};

struct FusionConfig {
  Variant variant = Variant::FedMhoMd;
  double lambda = 0.5;             // trade-off between CE and KL terms
  std::size_t global_epochs = 20;  // E_g
  OptimizerSpec optimizer = OptimizerSpec::adam(1e-3);
  std::size_t batch_size = 64;
  std::size_t total_synthetic = 2000;  // M
  double retention_ratio = 0.8;        // share of synthetic samples kept per class
  std::uint64_t seed = 0;

  void validate() const;
};

// The global classifier plus a frozen snapshot of its initialized state, which
// self-distillation uses as its teacher.
struct GlobalModel {
  MlpClassifier model;
  MlpClassifier init_state;
};

// Unweighted elementwise mean of the uploaded classifier parameters, summed in
// ascending client-id order (so the result is independent of list order).
GlobalModel init_global(const std::vector<ClientUpdate>& classifier_updates);

// Decodes `total` samples from the uploaded decoders: the total is split evenly
// across clients (remainder to lowest ids), and each client's share follows its
// label histogram via largest-remainder rounding. Clients whose histogram is
// all zero are skipped with a warning (ids reported via `skipped` if non-null)
// and the total is split over the rest.
SyntheticDataset generate_samples(const std::vector<ClientUpdate>& generative_updates,
                                  std::size_t total, std::uint64_t seed,
                                  std::vector<std::size_t>* skipped = nullptr);

// Per-class outlier removal: each class is clustered to its mean, samples are
// ranked by Euclidean distance to it, and the floor((1 - ratio) * n) farthest
// are dropped (ties keep the lower original index; at least one sample per
// class survives). Output rows are ordered by (class, original index).
SyntheticDataset optimize_samples(const SyntheticDataset& ds, double retention_ratio);

// Reference distribution for multi-teacher distillation: softmax over the
// arithmetic mean of all teachers' logits, row per sample.
Tensor teacher_logits_md(const std::vector<ClientUpdate>& classifier_updates,
                         const Tensor& batch);

// Per-epoch fused-training diagnostics (means over the epoch's batches).
struct FusionMetrics {
  std::vector<double> ce;  // cross-entropy term
  std::vector<double> kl;  // distillation term (0 when the variant has none)
};

// Called after each global epoch with (epoch index, current model); lets the
// caller track test accuracy without this function ever seeing test data.
using EpochObserver = std::function<void(std::size_t, const MlpClassifier&)>;

// Trains the global model on the synthetic dataset for E_g epochs of Adam.
// Loss: FedMho = CE; Md = lambda*CE + (1-lambda)*KL(teacher_mean || student);
// Sd = lambda*CE + (1-lambda)*KL(init_state || student); MdSd = CE + both KLs.
// Both terms are averaged over the mini-batch. Teachers and init_state stay
// frozen. KL terms with zero weight are never computed, so lambda=1 runs the
// exact FedMho code path.
GlobalModel fuse(GlobalModel global, const SyntheticDataset& ds,
                 const std::vector<ClientUpdate>& classifier_updates,
                 const FusionConfig& config, FusionMetrics* metrics = nullptr,
                 const EpochObserver& observer = {});

}  // namespace fedmho
