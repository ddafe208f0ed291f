#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "fedmho/cvae.hpp"
#include "fedmho/data.hpp"
#include "fedmho/mlp.hpp"
#include "fedmho/optim.hpp"

namespace fedmho {

enum class ClientKind { Classifier, Generative };

struct ClientConfig {
  std::size_t id = 0;
  ClientKind kind = ClientKind::Classifier;
  std::size_t local_epochs = 1;
  std::size_t batch_size = 64;
  OptimizerSpec optimizer;
  std::uint64_t seed = 0;  // experiment seed; the client's stream is derived from (seed, id)

  void validate() const;
};

// What a generative client uploads: its decoder and local label histogram.
// Encoder parameters and raw samples never leave the client — the update type
// cannot carry them.
struct GenerativeUpdate {
  CvaeDecoder decoder;
  LabelDistribution label_dist;
};

struct ClientUpdate {
  std::size_t client_id = 0;
  std::variant<MlpClassifier, GenerativeUpdate> payload;
  std::vector<double> epoch_losses;  // per-epoch mean training loss

  ClientKind kind() const {
    return payload.index() == 0 ? ClientKind::Classifier : ClientKind::Generative;
  }
  const MlpClassifier& classifier() const;
  const GenerativeUpdate& generative() const;
};

// E_k epochs of mini-batch SGD with momentum on summed cross-entropy over
// seeded shuffles of the local data. Returns the trained parameters.
ClientUpdate train_classifier_local(const ClientConfig& config, MlpClassifier model,
                                    const Dataset& data);

// E_k epochs of Adam on the ELBO with per-batch seeded noise. Returns the
// decoder and the label histogram of the local data.
ClientUpdate train_cvae_local(const ClientConfig& config, Cvae model, const Dataset& data);

}  // namespace fedmho
