#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedmho/client.hpp"
#include "fedmho/data.hpp"
#include "fedmho/metrics.hpp"
#include "fedmho/server.hpp"

namespace fedmho {

// Full experiment description. Defaults are the small-blob profile used by the
// test suite; a config file and CLI flags override individual fields.
struct ExperimentConfig {
  // Dataset: "blobs" (synthetic, default) or "idx" (MNIST-family files).
  std::string dataset = "blobs";
  std::size_t blob_classes = 10;
  std::size_t blob_per_class = 600;       // training samples per class
  std::size_t blob_test_per_class = 100;  // held-out samples per class
  std::size_t blob_dim = 16;
  double blob_spread = 2.0;
  std::uint64_t dataset_seed = 42;  // independent of run seeds: same data every run
  std::string idx_train_images;
  std::string idx_train_labels;
  std::string idx_test_images;
  std::string idx_test_labels;

  // Federation layout: clients [0, num_classifier_clients) train classifiers,
  // the rest train generative models.
  std::size_t num_clients = 10;
  std::size_t num_classifier_clients = 5;
  double alpha = 0.5;

  // Local training.
  std::vector<std::size_t> classifier_hidden = {128, 64};
  std::size_t classifier_epochs = 50;
  double classifier_lr = 1e-3;  // applied to the summed batch loss
  double classifier_momentum = 0.9;
  std::size_t cvae_hidden = 64;
  std::size_t cvae_latent = 8;
  std::size_t cvae_epochs = 30;
  double cvae_lr = 2e-4;
  std::size_t batch_size = 64;

  // Server fusion.
  double lambda = 0.5;
  std::size_t global_epochs = 20;
  double global_lr = 5e-4;
  std::size_t total_synthetic = 2000;
  double retention_ratio = 0.8;

  // What to run.
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<Variant> variants = {Variant::FedMho, Variant::FedMhoMd, Variant::FedMhoSd};
  bool baseline_fedavg = true;
  bool baseline_synthetic = true;
  bool emit_pgm = false;
  bool save_updates = false;
  std::string out_dir = "out";

  void validate() const;
};

// Flat `key = value` config file with `#` comments; unknown keys are errors.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
// Applies one `key`, `value` pair (the CLI override path). Throws on unknown keys.
void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

// One summary line: a variant or baseline score for one seed.
struct RunRow {
  std::string variant;  // variant name, "fedavg_oneshot", or "synthetic_only"
  std::uint64_t seed = 0;
  double alpha = 0.0;
  EvalReport report;
};

// Per-epoch fusion trajectory for one (variant, seed) pair.
struct FusionCurve {
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<double> ce;
  std::vector<double> kl;
  std::vector<double> test_acc;
};

// Pre-rendered grayscale image grid destined for `<name>.pgm`.
struct PgmGrid {
  std::string name;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<unsigned char> pixels;
};

struct RunSummary {
  std::vector<RunRow> rows;
  std::vector<FusionCurve> curves;
  std::vector<PgmGrid> grids;
};

// The train/test pair an experiment runs on.
struct DataSplit {
  Dataset train;
  Dataset test;
};

// Builds the configured dataset (blob generation or IDX loading) and splits it.
DataSplit load_split(const ExperimentConfig& config);

// Evaluates the parameter-averaged model with no fused training.
EvalReport baseline_fedavg_oneshot(const std::vector<ClientUpdate>& classifier_updates,
                                   const Dataset& test);

// Trains a freshly initialized global model on (filtered) synthetic data only.
EvalReport baseline_synthetic_only(const std::vector<ClientUpdate>& generative_updates,
                                   const ExperimentConfig& config, std::uint64_t seed,
                                   const Dataset& test);

// Runs the full pipeline: per seed — partition, local training, server fusion
// per variant, baselines, evaluation. Writes client updates under
// `<out_dir>/updates/` when config.save_updates is set; everything else is
// returned for emit_artifacts.
RunSummary run_experiment(const ExperimentConfig& config);

// Writes summary.csv, per-(variant, seed) fusion-curve CSVs, and any image
// grids into `out_dir` (created if missing).
void emit_artifacts(const RunSummary& summary, const std::string& out_dir);

}  // namespace fedmho
