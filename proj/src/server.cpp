#include "fedmho/server.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace fedmho {

namespace {

// Updates sorted by client id so every reduction below is order-independent.
std::vector<const ClientUpdate*> sorted_by_id(const std::vector<ClientUpdate>& updates,
                                              ClientKind want, const char* where) {
  if (updates.empty()) {
    throw std::invalid_argument(std::string(where) + ": empty update list");
  }
  std::vector<const ClientUpdate*> sorted;
  sorted.reserve(updates.size());
  for (const ClientUpdate& u : updates) {
    if (u.kind() != want) {
      throw std::invalid_argument(std::string(where) + ": update from client " +
                                  std::to_string(u.client_id) + " has the wrong kind");
    }
    sorted.push_back(&u);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ClientUpdate* a, const ClientUpdate* b) {
                     return a->client_id < b->client_id;
                   });
  return sorted;
}

// Splits `total` into integer shares proportional to `weights` by
// largest-remainder rounding; ties go to the lower index.
std::vector<std::size_t> largest_remainder_alloc(const std::vector<double>& weights,
                                                 std::size_t total) {
  const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> share(weights.size(), 0);
  if (weight_sum <= 0.0) {
    return share;
  }
  std::vector<std::pair<double, std::size_t>> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / weight_sum;
    share[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = {exact - std::floor(exact), i};
    assigned += share[i];
  }
  std::stable_sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t extra = 0; assigned < total; ++extra) {
    ++share[remainder[extra % weights.size()].second];
    ++assigned;
  }
  return share;
}

struct LossWeights {
  double ce = 1.0;
  double md = 0.0;
  double sd = 0.0;
};

LossWeights loss_weights(const FusionConfig& config) {
  switch (config.variant) {
    case Variant::FedMho:
      return {1.0, 0.0, 0.0};
    case Variant::FedMhoMd:
      return {config.lambda, 1.0 - config.lambda, 0.0};
    case Variant::FedMhoSd:
      return {config.lambda, 0.0, 1.0 - config.lambda};
    case Variant::FedMhoMdSd:
      return {1.0, 1.0, 1.0};
  }
  throw std::logic_error("fuse: unknown variant");
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::FedMho: return "fedmho";
    case Variant::FedMhoMd: return "md";
    case Variant::FedMhoSd: return "sd";
    case Variant::FedMhoMdSd: return "mdsd";
  }
  throw std::logic_error("variant_name: unknown variant");
}

Variant parse_variant(const std::string& name) {
  if (name == "fedmho") return Variant::FedMho;
  if (name == "md") return Variant::FedMhoMd;
  if (name == "sd") return Variant::FedMhoSd;
  if (name == "mdsd") return Variant::FedMhoMdSd;
  throw std::invalid_argument("unknown variant '" + name +
                              "' (expected fedmho, md, sd, or mdsd)");
}

void FusionConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("fusion: lambda must lie in [0, 1]");
  }
  if (!(retention_ratio > 0.0 && retention_ratio <= 1.0)) {
    throw std::invalid_argument("fusion: retention_ratio must lie in (0, 1]");
  }
  if (batch_size == 0) {
    throw std::invalid_argument("fusion: batch_size must be >= 1");
  }
  if (total_synthetic == 0) {
    throw std::invalid_argument("fusion: total_synthetic must be >= 1");
  }
  optimizer.validate();
}

GlobalModel init_global(const std::vector<ClientUpdate>& classifier_updates) {
  std::vector<const ClientUpdate*> sorted =
      sorted_by_id(classifier_updates, ClientKind::Classifier, "init_global");

  const MlpClassifier& first = sorted.front()->classifier();
  for (const ClientUpdate* u : sorted) {
    if (u->classifier().dims() != first.dims()) {
      throw std::invalid_argument("init_global: classifier architectures differ");
    }
  }

  MlpClassifier mean = first.clone();
  std::vector<Parameter*> mean_params = mean.parameters();
  for (std::size_t p = 0; p < mean_params.size(); ++p) {
    std::vector<double>& dst = mean_params[p]->value.data;
    std::fill(dst.begin(), dst.end(), 0.0);
    for (const ClientUpdate* u : sorted) {
      const std::vector<double>& src = u->classifier().parameters()[p]->value.data;
      for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] += src[i];
      }
    }
    const double inv = 1.0 / static_cast<double>(sorted.size());
    for (double& v : dst) {
      v *= inv;
    }
  }
  mean.zero_grad();
  MlpClassifier snapshot = mean.clone();
  return GlobalModel{std::move(mean), std::move(snapshot)};
}

SyntheticDataset generate_samples(const std::vector<ClientUpdate>& generative_updates,
                                  std::size_t total, std::uint64_t seed,
                                  std::vector<std::size_t>* skipped) {
  if (total == 0) {
    throw std::invalid_argument("generate_samples: total must be >= 1");
  }
  std::vector<const ClientUpdate*> sorted =
      sorted_by_id(generative_updates, ClientKind::Generative, "generate_samples");

  const std::size_t num_classes = sorted.front()->generative().decoder.num_classes;
  const std::size_t dim = sorted.front()->generative().decoder.output_dim;
  std::vector<const ClientUpdate*> usable;
  for (const ClientUpdate* u : sorted) {
    const GenerativeUpdate& gen = u->generative();
    if (gen.decoder.num_classes != num_classes || gen.decoder.output_dim != dim) {
      throw std::invalid_argument("generate_samples: decoder shapes differ across clients");
    }
    if (gen.label_dist.counts.size() != num_classes) {
      throw std::invalid_argument("generate_samples: histogram length != class count");
    }
    if (gen.label_dist.total() == 0) {
      std::fprintf(stderr,
                   "generate_samples: client %zu has an empty label histogram, skipping\n",
                   u->client_id);
      if (skipped != nullptr) {
        skipped->push_back(u->client_id);
      }
      continue;
    }
    usable.push_back(u);
  }
  if (usable.empty()) {
    throw std::invalid_argument("generate_samples: every client histogram is empty");
  }

  // Even quota per usable client, remainder to the lowest ids.
  std::vector<std::size_t> quota(usable.size(), total / usable.size());
  for (std::size_t i = 0; i < total % usable.size(); ++i) {
    ++quota[i];
  }

  SyntheticDataset ds;
  ds.num_classes = num_classes;
  ds.samples = Tensor({total, dim});
  ds.labels.reserve(total);
  ds.source_client.reserve(total);

  std::size_t row = 0;
  for (std::size_t k = 0; k < usable.size(); ++k) {
    const GenerativeUpdate& gen = usable[k]->generative();
    std::vector<double> weights(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
      weights[c] = static_cast<double>(gen.label_dist.counts[c]);
    }
    const std::vector<std::size_t> per_class = largest_remainder_alloc(weights, quota[k]);
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (per_class[c] == 0) {
        continue;
      }
      Rng rng(mix_seed(mix_seed(seed, seed_tags::kGenerate, usable[k]->client_id), c));
      for (std::size_t i = 0; i < per_class[c]; ++i, ++row) {
        const std::vector<double> sample =
            decoder_sample(gen.decoder, static_cast<int>(c), rng);
        std::copy(sample.begin(), sample.end(), ds.samples.data.data() + row * dim);
        ds.labels.push_back(static_cast<int>(c));
        ds.source_client.push_back(usable[k]->client_id);
      }
    }
  }
  return ds;
}

SyntheticDataset optimize_samples(const SyntheticDataset& ds, double retention_ratio) {
  if (!(retention_ratio > 0.0 && retention_ratio <= 1.0)) {
    throw std::invalid_argument("optimize_samples: retention ratio must lie in (0, 1]");
  }
  if (retention_ratio == 1.0) {
    return ds;
  }
  const std::size_t dim = ds.samples.shape.size() == 2 ? ds.samples.shape[1] : 0;

  std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  }

  std::vector<std::size_t> retained;
  for (std::size_t c = 0; c < ds.num_classes; ++c) {
    const std::vector<std::size_t>& rows = by_class[c];
    if (rows.empty()) {
      continue;
    }
    // One-cluster K-means converges to the mean in a single step.
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t idx : rows) {
      const double* x = ds.samples.data.data() + idx * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        centroid[j] += x[j];
      }
    }
    for (double& v : centroid) {
      v /= static_cast<double>(rows.size());
    }

    std::vector<std::pair<double, std::size_t>> by_distance;
    by_distance.reserve(rows.size());
    for (std::size_t idx : rows) {
      const double* x = ds.samples.data.data() + idx * dim;
      double sq = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = x[j] - centroid[j];
        sq += d * d;
      }
      by_distance.emplace_back(std::sqrt(sq), idx);
    }
    std::sort(by_distance.begin(), by_distance.end());  // (distance, index) ascending

    const std::size_t remove =
        static_cast<std::size_t>(std::floor((1.0 - retention_ratio) *
                                            static_cast<double>(rows.size())));
    const std::size_t keep = std::max<std::size_t>(1, rows.size() - remove);
    for (std::size_t i = 0; i < keep; ++i) {
      retained.push_back(by_distance[i].second);
    }
  }
  // Output order: (class, original index). Per-class blocks already group by
  // class; sort each block back to original order via a global sort keyed by
  // (label, index).
  std::sort(retained.begin(), retained.end(), [&ds](std::size_t a, std::size_t b) {
    if (ds.labels[a] != ds.labels[b]) return ds.labels[a] < ds.labels[b];
    return a < b;
  });

  SyntheticDataset out;
  out.num_classes = ds.num_classes;
  out.samples = Tensor({retained.size(), dim});
  out.labels.reserve(retained.size());
  out.source_client.reserve(retained.size());
  for (std::size_t i = 0; i < retained.size(); ++i) {
    const double* src = ds.samples.data.data() + retained[i] * dim;
    std::copy(src, src + dim, out.samples.data.data() + i * dim);
    out.labels.push_back(ds.labels[retained[i]]);
    out.source_client.push_back(ds.source_client[retained[i]]);
  }
  return out;
}

Tensor teacher_logits_md(const std::vector<ClientUpdate>& classifier_updates,
                         const Tensor& batch) {
  std::vector<const ClientUpdate*> sorted =
      sorted_by_id(classifier_updates, ClientKind::Classifier, "teacher_logits_md");
  Tensor mean = sorted.front()->classifier().forward(batch);
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    Tensor logits = sorted[k]->classifier().forward(batch);
    for (std::size_t i = 0; i < mean.data.size(); ++i) {
      mean.data[i] += logits.data[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(sorted.size());
  for (double& v : mean.data) {
    v *= inv;
  }
  return softmax_rows(mean);
}

GlobalModel fuse(GlobalModel global, const SyntheticDataset& ds,
                 const std::vector<ClientUpdate>& classifier_updates,
                 const FusionConfig& config, FusionMetrics* metrics,
                 const EpochObserver& observer) {
  config.validate();
  if (ds.size() == 0) {
    throw std::invalid_argument("fuse: empty synthetic dataset");
  }
  if (ds.num_classes != global.model.num_classes()) {
    throw std::invalid_argument("fuse: dataset class count != model output width");
  }
  const LossWeights weights = loss_weights(config);
  const std::size_t num_classes = ds.num_classes;

  // Reference distributions are frozen, so evaluate them once over the whole
  // dataset; per-row forward passes are independent, making the cached rows
  // identical to recomputing per batch.
  Tensor ref_md;
  if (weights.md > 0.0) {
    ref_md = teacher_logits_md(classifier_updates, ds.samples);
  }
  Tensor ref_sd;
  if (weights.sd > 0.0) {
    ref_sd = softmax_rows(global.init_state.forward(ds.samples));
  }

  Optimizer optimizer(config.optimizer, global.model.parameters());
  Rng rng(mix_seed(config.seed, seed_tags::kFusion));
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);

  if (metrics != nullptr) {
    metrics->ce.clear();
    metrics->kl.clear();
  }

  const std::size_t dim = ds.samples.shape[1];
  std::vector<Tensor> inputs;
  std::vector<Tensor> preacts;
  for (std::size_t epoch = 0; epoch < config.global_epochs; ++epoch) {
    rng.shuffle(order);
    double ce_sum = 0.0;
    double kl_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, order.size());
      const std::size_t batch_n = end - begin;
      Tensor batch({batch_n, dim});
      std::vector<int> labels(batch_n);
      for (std::size_t i = 0; i < batch_n; ++i) {
        const double* src = ds.samples.data.data() + order[begin + i] * dim;
        std::copy(src, src + dim, batch.data.data() + i * dim);
        labels[i] = ds.labels[order[begin + i]];
      }

      global.model.zero_grad();
      Tensor logits = global.model.forward_cached(batch, inputs, preacts);
      CrossEntropyResult ce = cross_entropy(logits, labels, Reduction::Mean);
      ce_sum += ce.loss * static_cast<double>(batch_n);

      Tensor grad_logits = std::move(ce.grad_logits);
      if (weights.ce != 1.0) {
        for (double& v : grad_logits.data) {
          v *= weights.ce;
        }
      }

      if (weights.md > 0.0 || weights.sd > 0.0) {
        const Tensor student = softmax_rows(logits);
        const double inv_b = 1.0 / static_cast<double>(batch_n);
        double kl_batch = 0.0;
        for (std::size_t i = 0; i < batch_n; ++i) {
          const double* q = student.data.data() + i * num_classes;
          double* g = grad_logits.data.data() + i * num_classes;
          if (weights.md > 0.0) {
            const double* p = ref_md.data.data() + order[begin + i] * num_classes;
            kl_batch += kl_categorical({p, num_classes}, {q, num_classes});
            const double w = weights.md * inv_b;
            for (std::size_t c = 0; c < num_classes; ++c) {
              g[c] += w * (q[c] - p[c]);
            }
          }
          if (weights.sd > 0.0) {
            const double* p = ref_sd.data.data() + order[begin + i] * num_classes;
            kl_batch += kl_categorical({p, num_classes}, {q, num_classes});
            const double w = weights.sd * inv_b;
            for (std::size_t c = 0; c < num_classes; ++c) {
              g[c] += w * (q[c] - p[c]);
            }
          }
        }
        kl_sum += kl_batch;  // already a per-row sum; normalized below by |ds|
      }

      global.model.backward(inputs, preacts, std::move(grad_logits));
      optimizer.step();
    }
    if (metrics != nullptr) {
      metrics->ce.push_back(ce_sum / static_cast<double>(ds.size()));
      metrics->kl.push_back(kl_sum / static_cast<double>(ds.size()));
    }
    if (observer) {
      observer(epoch, global.model);
    }
  }
  return global;
}

}  // namespace fedmho
