#include "fedmho/client.hpp"

#include <numeric>
#include <stdexcept>

namespace fedmho {

namespace {

// Materializes one mini-batch from shuffled row order [begin, end).
void gather_batch(const Dataset& data, const std::vector<std::size_t>& order,
                  std::size_t begin, std::size_t end, Tensor& images,
                  std::vector<int>& labels) {
  const std::size_t dim = data.dim();
  images = Tensor({end - begin, dim});
  labels.resize(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double* src = data.images.data.data() + order[i] * dim;
    std::copy(src, src + dim, images.data.data() + (i - begin) * dim);
    labels[i - begin] = data.labels[order[i]];
  }
}

void check_local_data(const ClientConfig& config, const Dataset& data, ClientKind want) {
  config.validate();
  if (config.kind != want) {
    throw std::invalid_argument("client: training entry point does not match config kind");
  }
  data.validate();
  if (data.size() == 0) {
    throw std::invalid_argument("client: empty local dataset");
  }
}

}  // namespace

void ClientConfig::validate() const {
  if (local_epochs == 0) {
    throw std::invalid_argument("client: local_epochs must be >= 1");
  }
  if (batch_size == 0) {
    throw std::invalid_argument("client: batch_size must be >= 1");
  }
  optimizer.validate();
}

const MlpClassifier& ClientUpdate::classifier() const {
  if (kind() != ClientKind::Classifier) {
    throw std::logic_error("ClientUpdate: not a classifier update");
  }
  return std::get<MlpClassifier>(payload);
}

const GenerativeUpdate& ClientUpdate::generative() const {
  if (kind() != ClientKind::Generative) {
    throw std::logic_error("ClientUpdate: not a generative update");
  }
  return std::get<GenerativeUpdate>(payload);
}

ClientUpdate train_classifier_local(const ClientConfig& config, MlpClassifier model,
                                    const Dataset& data) {
  check_local_data(config, data, ClientKind::Classifier);

  Rng rng(mix_seed(config.seed, seed_tags::kClient, config.id));
  Optimizer optimizer(config.optimizer, model.parameters());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> epoch_losses;
  epoch_losses.reserve(config.local_epochs);
  Tensor batch;
  std::vector<int> labels;
  for (std::size_t epoch = 0; epoch < config.local_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, order.size());
      gather_batch(data, order, begin, end, batch, labels);
      model.zero_grad();
      loss_sum += model.loss_and_grad(batch, labels, Reduction::Sum);
      optimizer.step();
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(data.size()));
  }

  return ClientUpdate{config.id,
                      std::variant<MlpClassifier, GenerativeUpdate>{std::move(model)},
                      std::move(epoch_losses)};
}

ClientUpdate train_cvae_local(const ClientConfig& config, Cvae model, const Dataset& data) {
  check_local_data(config, data, ClientKind::Generative);
  if (data.dim() != model.input_dim() || data.num_classes != model.num_classes()) {
    throw std::invalid_argument("client: CVAE shape does not match local data");
  }

  Rng rng(mix_seed(config.seed, seed_tags::kClient, config.id));
  Optimizer optimizer(config.optimizer, model.parameters());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> epoch_losses;
  epoch_losses.reserve(config.local_epochs);
  Tensor batch;
  std::vector<int> labels;
  for (std::size_t epoch = 0; epoch < config.local_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, order.size());
      gather_batch(data, order, begin, end, batch, labels);
      Tensor eps({end - begin, model.latent_dim()});
      for (double& v : eps.data) {
        v = rng.normal();
      }
      model.zero_grad();
      const CvaeLoss loss = model.loss_and_grad(batch, labels, eps);
      loss_sum += loss.total * static_cast<double>(end - begin);
      optimizer.step();
    }
    epoch_losses.push_back(loss_sum / static_cast<double>(data.size()));
  }

  LabelDistribution dist;
  dist.counts.assign(data.num_classes, 0);
  for (int label : data.labels) {
    ++dist.counts[static_cast<std::size_t>(label)];
  }

  return ClientUpdate{
      config.id,
      std::variant<MlpClassifier, GenerativeUpdate>{
          GenerativeUpdate{std::move(model.decoder()), std::move(dist)}},
      std::move(epoch_losses)};
}

}  // namespace fedmho
