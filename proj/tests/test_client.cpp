#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fedmho/client.hpp"
#include "fedmho/rng.hpp"

using namespace fedmho;

namespace {

Dataset small_blobs(std::uint64_t seed = 5) { return make_blobs(3, 30, 6, 0.5, seed); }

MlpClassifier fresh_mlp(std::uint64_t seed = 1) {
  MlpClassifier model({6, 12, 3});
  Rng rng(mix_seed(seed, seed_tags::kModelInit));
  model.init_params(rng);
  return model;
}

Cvae fresh_cvae(std::uint64_t seed = 1) {
  Cvae model(6, 3, 10, 2);
  Rng rng(mix_seed(seed, seed_tags::kModelInit, 1));
  model.init_params(rng);
  return model;
}

ClientConfig classifier_config() {
  ClientConfig cfg;
  cfg.id = 2;
  cfg.kind = ClientKind::Classifier;
  cfg.local_epochs = 5;
  cfg.batch_size = 8;
  cfg.optimizer = OptimizerSpec::sgd(1e-3, 0.9);
  cfg.seed = 7;
  return cfg;
}

ClientConfig cvae_config() {
  ClientConfig cfg;
  cfg.id = 6;
  cfg.kind = ClientKind::Generative;
  cfg.local_epochs = 5;
  cfg.batch_size = 8;
  cfg.optimizer = OptimizerSpec::adam(1e-3);
  cfg.seed = 7;
  return cfg;
}

std::vector<double> flatten(const MlpClassifier& model) {
  std::vector<double> out;
  for (const Parameter* p : model.parameters())
    out.insert(out.end(), p->value.data.begin(), p->value.data.end());
  return out;
}

}  // namespace

TEST_CASE("client config validation") {
  ClientConfig cfg = classifier_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.local_epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = classifier_config();
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = classifier_config();
  cfg.optimizer.lr = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("classifier training is deterministic in the config") {
  Dataset data = small_blobs();
  ClientUpdate a = train_classifier_local(classifier_config(), fresh_mlp(), data);
  ClientUpdate b = train_classifier_local(classifier_config(), fresh_mlp(), data);
  CHECK(a.client_id == 2);
  CHECK(a.kind() == ClientKind::Classifier);
  CHECK(flatten(a.classifier()) == flatten(b.classifier()));
  CHECK(a.epoch_losses == b.epoch_losses);

  // A different client id draws a different shuffle stream.
  ClientConfig other = classifier_config();
  other.id = 3;
  ClientUpdate c = train_classifier_local(other, fresh_mlp(), data);
  CHECK(flatten(a.classifier()) != flatten(c.classifier()));
}

TEST_CASE("classifier training reduces the loss and records one entry per epoch") {
  Dataset data = small_blobs();
  ClientConfig cfg = classifier_config();
  cfg.local_epochs = 30;
  ClientUpdate up = train_classifier_local(cfg, fresh_mlp(), data);
  REQUIRE(up.epoch_losses.size() == 30);
  CHECK(up.epoch_losses.back() < 0.5 * up.epoch_losses.front());
  for (double l : up.epoch_losses) CHECK(std::isfinite(l));
}

TEST_CASE("zero learning rate leaves the classifier parameters untouched") {
  Dataset data = small_blobs();
  ClientConfig cfg = classifier_config();
  cfg.optimizer = OptimizerSpec::sgd(0.0, 0.9);
  MlpClassifier model = fresh_mlp();
  auto before = flatten(model);
  ClientUpdate up = train_classifier_local(cfg, std::move(model), data);
  CHECK(flatten(up.classifier()) == before);
}

TEST_CASE("one full-batch epoch equals a single summed-loss gradient step") {
  // batch_size >= N makes the epoch a single batch; with momentum 0 the update
  // must match one hand-rolled step on the summed cross-entropy.
  Dataset data = small_blobs();
  ClientConfig cfg = classifier_config();
  cfg.local_epochs = 1;
  cfg.batch_size = data.size();
  cfg.optimizer = OptimizerSpec::sgd(1e-3, 0.0);

  ClientUpdate up = train_classifier_local(cfg, fresh_mlp(), data);

  // Reproduce: the client shuffles indices from its derived stream, then takes
  // one step on the whole batch.
  MlpClassifier manual = fresh_mlp();
  Rng stream(mix_seed(cfg.seed, seed_tags::kClient, cfg.id));
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  stream.shuffle(order);
  Dataset shuffled = subset(data, order);
  std::vector<int> labels = shuffled.labels;
  manual.zero_grad();
  double loss = manual.loss_and_grad(shuffled.images, labels, Reduction::Sum);
  Optimizer opt(cfg.optimizer, manual.parameters());
  opt.step();

  CHECK(flatten(up.classifier()) == flatten(manual));
  CHECK(up.epoch_losses[0] ==
        doctest::Approx(loss / static_cast<double>(data.size())).epsilon(1e-12));
}

TEST_CASE("cvae training returns decoder plus exact label histogram") {
  Dataset data = small_blobs();
  ClientUpdate up = train_cvae_local(cvae_config(), fresh_cvae(), data);
  CHECK(up.client_id == 6);
  CHECK(up.kind() == ClientKind::Generative);
  const GenerativeUpdate& gen = up.generative();
  REQUIRE(gen.label_dist.counts.size() == 3);
  for (int c = 0; c < 3; ++c) CHECK(gen.label_dist.counts[c] == 30);
  CHECK(gen.decoder.output_dim == 6);
  CHECK(gen.decoder.num_classes == 3);
  REQUIRE(up.epoch_losses.size() == 5);
  for (double l : up.epoch_losses) CHECK(std::isfinite(l));
}

TEST_CASE("cvae training is deterministic and the loss trends down") {
  Dataset data = small_blobs();
  ClientConfig cfg = cvae_config();
  cfg.local_epochs = 40;
  cfg.optimizer = OptimizerSpec::adam(5e-3);
  ClientUpdate a = train_cvae_local(cfg, fresh_cvae(), data);
  ClientUpdate b = train_cvae_local(cfg, fresh_cvae(), data);
  CHECK(a.epoch_losses == b.epoch_losses);
  const auto& pa = a.generative().decoder;
  const auto& pb = b.generative().decoder;
  CHECK(pa.trunk.weight.value.data == pb.trunk.weight.value.data);
  CHECK(pa.out.weight.value.data == pb.out.weight.value.data);
  CHECK(a.epoch_losses.back() < a.epoch_losses.front());
}

TEST_CASE("update accessors throw on the wrong payload kind") {
  Dataset data = small_blobs();
  ClientUpdate cls = train_classifier_local(classifier_config(), fresh_mlp(), data);
  ClientUpdate gen = train_cvae_local(cvae_config(), fresh_cvae(), data);
  CHECK_THROWS_AS(cls.generative(), std::logic_error);
  CHECK_THROWS_AS(gen.classifier(), std::logic_error);
  CHECK_NOTHROW(cls.classifier());
  CHECK_NOTHROW(gen.generative());
}

TEST_CASE("training rejects empty data") {
  Dataset empty;
  empty.images = Tensor::zeros({0, 6});
  empty.num_classes = 3;
  CHECK_THROWS_AS(train_classifier_local(classifier_config(), fresh_mlp(), empty),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_cvae_local(cvae_config(), fresh_cvae(), empty), std::invalid_argument);
}
