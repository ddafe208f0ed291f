#include "fedmho/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fedmho/checkpoint.hpp"

namespace fedmho {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const std::size_t begin = s.find_first_not_of(ws);
  if (begin == std::string::npos) {
    return "";
  }
  return s.substr(begin, s.find_last_not_of(ws) - begin + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      parts.push_back(item);
    }
  }
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    // stoull would wrap a negative input instead of rejecting it.
    if (!value.empty() && value.front() == '-') {
      throw std::invalid_argument("");
    }
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects a non-negative integer, got '" +
                                value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: " + key + " expects true/false, got '" + value + "'");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset != "blobs" && dataset != "idx") {
    throw std::invalid_argument("config: dataset must be 'blobs' or 'idx'");
  }
  if (dataset == "blobs") {
    if (blob_classes == 0 || blob_per_class == 0 || blob_test_per_class == 0 ||
        blob_dim == 0) {
      throw std::invalid_argument("config: blob dimensions must all be >= 1");
    }
  } else if (idx_train_images.empty() || idx_train_labels.empty() || idx_test_images.empty() ||
             idx_test_labels.empty()) {
    throw std::invalid_argument("config: dataset=idx needs all four idx_* paths");
  }
  if (num_clients == 0) {
    throw std::invalid_argument("config: num_clients must be >= 1");
  }
  if (num_classifier_clients == 0 || num_classifier_clients > num_clients) {
    throw std::invalid_argument("config: classifier_clients must lie in [1, num_clients]");
  }
  const bool needs_generators = !variants.empty() || baseline_synthetic;
  if (needs_generators && num_classifier_clients == num_clients) {
    throw std::invalid_argument(
        "config: running variants or the synthetic baseline needs at least one generative "
        "client (classifier_clients < num_clients)");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("config: alpha must be > 0");
  }
  if (classifier_epochs == 0 || cvae_epochs == 0) {
    throw std::invalid_argument("config: local epoch counts must be >= 1");
  }
  if (batch_size == 0) {
    throw std::invalid_argument("config: batch_size must be >= 1");
  }
  if (!(classifier_lr >= 0.0) || !(cvae_lr >= 0.0) || !(global_lr >= 0.0)) {
    throw std::invalid_argument("config: learning rates must be >= 0");
  }
  if (!(classifier_momentum >= 0.0 && classifier_momentum < 1.0)) {
    throw std::invalid_argument("config: classifier_momentum must lie in [0, 1)");
  }
  if (cvae_hidden == 0 || cvae_latent == 0) {
    throw std::invalid_argument("config: cvae_hidden and cvae_latent must be >= 1");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("config: lambda must lie in [0, 1]");
  }
  if (!(retention_ratio > 0.0 && retention_ratio <= 1.0)) {
    throw std::invalid_argument("config: retention_ratio must lie in (0, 1]");
  }
  if (total_synthetic == 0) {
    throw std::invalid_argument("config: total_synthetic must be >= 1");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("config: need at least one seed");
  }
  if (out_dir.empty()) {
    throw std::invalid_argument("config: out_dir must be set");
  }
}

void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value) {
  if (key == "dataset") {
    config.dataset = value;
  } else if (key == "blob_classes") {
    config.blob_classes = parse_u64(key, value);
  } else if (key == "blob_per_class") {
    config.blob_per_class = parse_u64(key, value);
  } else if (key == "blob_test_per_class") {
    config.blob_test_per_class = parse_u64(key, value);
  } else if (key == "blob_dim") {
    config.blob_dim = parse_u64(key, value);
  } else if (key == "blob_spread") {
    config.blob_spread = parse_double(key, value);
  } else if (key == "dataset_seed") {
    config.dataset_seed = parse_u64(key, value);
  } else if (key == "idx_train_images") {
    config.idx_train_images = value;
  } else if (key == "idx_train_labels") {
    config.idx_train_labels = value;
  } else if (key == "idx_test_images") {
    config.idx_test_images = value;
  } else if (key == "idx_test_labels") {
    config.idx_test_labels = value;
  } else if (key == "num_clients") {
    config.num_clients = parse_u64(key, value);
  } else if (key == "classifier_clients") {
    config.num_classifier_clients = parse_u64(key, value);
  } else if (key == "alpha") {
    config.alpha = parse_double(key, value);
  } else if (key == "classifier_hidden") {
    config.classifier_hidden.clear();
    for (const std::string& part : split_commas(value)) {
      config.classifier_hidden.push_back(parse_u64(key, part));
    }
  } else if (key == "classifier_epochs") {
    config.classifier_epochs = parse_u64(key, value);
  } else if (key == "classifier_lr") {
    config.classifier_lr = parse_double(key, value);
  } else if (key == "classifier_momentum") {
    config.classifier_momentum = parse_double(key, value);
  } else if (key == "cvae_hidden") {
    config.cvae_hidden = parse_u64(key, value);
  } else if (key == "cvae_latent") {
    config.cvae_latent = parse_u64(key, value);
  } else if (key == "cvae_epochs") {
    config.cvae_epochs = parse_u64(key, value);
  } else if (key == "cvae_lr") {
    config.cvae_lr = parse_double(key, value);
  } else if (key == "batch_size") {
    config.batch_size = parse_u64(key, value);
  } else if (key == "lambda") {
    config.lambda = parse_double(key, value);
  } else if (key == "global_epochs") {
    config.global_epochs = parse_u64(key, value);
  } else if (key == "global_lr") {
    config.global_lr = parse_double(key, value);
  } else if (key == "total_synthetic") {
    config.total_synthetic = parse_u64(key, value);
  } else if (key == "retention_ratio") {
    config.retention_ratio = parse_double(key, value);
  } else if (key == "seeds") {
    config.seeds.clear();
    for (const std::string& part : split_commas(value)) {
      config.seeds.push_back(parse_u64(key, part));
    }
  } else if (key == "variants") {
    config.variants.clear();
    if (value == "all") {
      config.variants = {Variant::FedMho, Variant::FedMhoMd, Variant::FedMhoSd};
    } else {
      for (const std::string& part : split_commas(value)) {
        config.variants.push_back(parse_variant(part));
      }
    }
  } else if (key == "baseline_fedavg") {
    config.baseline_fedavg = parse_bool(key, value);
  } else if (key == "baseline_synthetic") {
    config.baseline_synthetic = parse_bool(key, value);
  } else if (key == "emit_pgm") {
    config.emit_pgm = parse_bool(key, value);
  } else if (key == "save_updates") {
    config.save_updates = parse_bool(key, value);
  } else if (key == "out_dir") {
    config.out_dir = value;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    try {
      set_config_value(config, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path + ": cannot open config file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

DataSplit load_split(const ExperimentConfig& config) {
  DataSplit split;
  if (config.dataset == "idx") {
    split.train = load_idx(config.idx_train_images, config.idx_train_labels);
    split.test = load_idx(config.idx_test_images, config.idx_test_labels);
    const std::size_t classes = std::max(split.train.num_classes, split.test.num_classes);
    split.train.num_classes = classes;
    split.test.num_classes = classes;
    if (split.train.dim() != split.test.dim()) {
      throw std::runtime_error("idx train/test image dimensions differ");
    }
    return split;
  }

  // One draw covers train+test so both share the same class centers; blocks
  // are class-major, so the first rows of each block become training data.
  const std::size_t per_class = config.blob_per_class + config.blob_test_per_class;
  Dataset combined = make_blobs(config.blob_classes, per_class, config.blob_dim,
                                config.blob_spread, config.dataset_seed);
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t c = 0; c < config.blob_classes; ++c) {
    const std::size_t base = c * per_class;
    for (std::size_t i = 0; i < config.blob_per_class; ++i) {
      train_rows.push_back(base + i);
    }
    for (std::size_t i = config.blob_per_class; i < per_class; ++i) {
      test_rows.push_back(base + i);
    }
  }
  split.train = subset(combined, train_rows);
  split.test = subset(combined, test_rows);
  return split;
}

EvalReport baseline_fedavg_oneshot(const std::vector<ClientUpdate>& classifier_updates,
                                   const Dataset& test) {
  return top1_accuracy(init_global(classifier_updates).model, test);
}

EvalReport baseline_synthetic_only(const std::vector<ClientUpdate>& generative_updates,
                                   const ExperimentConfig& config, std::uint64_t seed,
                                   const Dataset& test) {
  const SyntheticDataset filtered = optimize_samples(
      generate_samples(generative_updates, config.total_synthetic, seed),
      config.retention_ratio);

  std::vector<std::size_t> dims;
  dims.push_back(test.dim());
  dims.insert(dims.end(), config.classifier_hidden.begin(), config.classifier_hidden.end());
  dims.push_back(test.num_classes);
  MlpClassifier model(dims);
  Rng rng(mix_seed(seed, seed_tags::kBaselineInit));
  model.init_params(rng);

  FusionConfig fusion;
  fusion.variant = Variant::FedMho;
  fusion.global_epochs = config.global_epochs;
  fusion.optimizer = OptimizerSpec::adam(config.global_lr);
  fusion.batch_size = config.batch_size;
  fusion.total_synthetic = config.total_synthetic;
  fusion.retention_ratio = config.retention_ratio;
  fusion.seed = seed;

  GlobalModel trained = fuse(GlobalModel{model.clone(), std::move(model)}, filtered, {},
                             fusion, nullptr, {});
  return top1_accuracy(trained.model, test);
}

namespace {

void write_pgm(const std::string& path, const PgmGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(grid.pixels.data()),
            static_cast<std::streamsize>(grid.pixels.size()));
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

// Renders up to `max_per_class` samples per class as square tiles, one grid row
// per class, 1-pixel gaps.
PgmGrid build_sample_grid(std::string name, const SyntheticDataset& ds,
                          std::size_t max_per_class) {
  const std::size_t dim = ds.samples.shape.size() == 2 ? ds.samples.shape[1] : 0;
  std::size_t side = 1;
  while (side * side < dim) {
    ++side;
  }
  PgmGrid grid;
  grid.name = std::move(name);
  grid.width = max_per_class * (side + 1) - 1;
  grid.height = ds.num_classes * (side + 1) - 1;
  grid.pixels.assign(grid.width * grid.height, 0);

  std::vector<std::size_t> used(ds.num_classes, 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::size_t c = static_cast<std::size_t>(ds.labels[i]);
    if (used[c] >= max_per_class) {
      continue;
    }
    const std::size_t tile_col = used[c]++;
    const double* sample = ds.samples.data.data() + i * dim;
    for (std::size_t p = 0; p < dim; ++p) {
      const std::size_t r = c * (side + 1) + p / side;
      const std::size_t col = tile_col * (side + 1) + p % side;
      grid.pixels[r * grid.width + col] =
          static_cast<unsigned char>(std::lround(255.0 * sample[p]));
    }
  }
  return grid;
}

void save_client_updates(const std::vector<ClientUpdate>& updates, std::uint64_t seed,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_dir) / "updates" / ("seed_" + std::to_string(seed));
  fs::create_directories(dir);
  for (const ClientUpdate& update : updates) {
    const std::string stem = "client_" + std::to_string(update.client_id);
    if (update.kind() == ClientKind::Classifier) {
      save_classifier(update.classifier(), (dir / (stem + ".ckpt")).string());
    } else {
      save_decoder(update.generative().decoder, (dir / (stem + "_decoder.ckpt")).string());
      save_histogram(update.generative().label_dist, (dir / (stem + ".hist")).string());
    }
  }
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  DataSplit split = load_split(config);
  const std::size_t num_classes = split.train.num_classes;
  const std::size_t dim = split.train.dim();
  if (config.total_synthetic < num_classes) {
    throw std::invalid_argument("config: total_synthetic must be >= the class count");
  }

  std::vector<std::size_t> classifier_dims;
  classifier_dims.push_back(dim);
  classifier_dims.insert(classifier_dims.end(), config.classifier_hidden.begin(),
                         config.classifier_hidden.end());
  classifier_dims.push_back(num_classes);

  RunSummary summary;
  for (const std::uint64_t seed : config.seeds) {
    const Partition partition =
        dirichlet_partition(split.train, config.num_clients, config.alpha, seed);

    // All classifier clients start from one shared init (and likewise the
    // generative clients), drawn from the seed's model-init stream.
    Rng init_rng(mix_seed(seed, seed_tags::kModelInit));
    MlpClassifier classifier_init(classifier_dims);
    classifier_init.init_params(init_rng);
    Cvae cvae_init(dim, num_classes, config.cvae_hidden, config.cvae_latent);
    cvae_init.init_params(init_rng);

    std::vector<ClientUpdate> classifier_updates;
    std::vector<ClientUpdate> generative_updates;
    for (std::size_t k = 0; k < config.num_clients; ++k) {
      const Dataset local = subset(split.train, partition.client_indices[k]);
      ClientConfig client;
      client.id = k;
      client.batch_size = config.batch_size;
      client.seed = seed;
      if (k < config.num_classifier_clients) {
        client.kind = ClientKind::Classifier;
        client.local_epochs = config.classifier_epochs;
        client.optimizer =
            OptimizerSpec::sgd(config.classifier_lr, config.classifier_momentum);
        classifier_updates.push_back(
            train_classifier_local(client, classifier_init.clone(), local));
      } else {
        client.kind = ClientKind::Generative;
        client.local_epochs = config.cvae_epochs;
        client.optimizer = OptimizerSpec::adam(config.cvae_lr);
        generative_updates.push_back(train_cvae_local(client, cvae_init, local));
      }
    }

    if (config.baseline_fedavg) {
      summary.rows.push_back(RunRow{"fedavg_oneshot", seed, config.alpha,
                                    baseline_fedavg_oneshot(classifier_updates, split.test)});
    }
    if (config.baseline_synthetic) {
      summary.rows.push_back(
          RunRow{"synthetic_only", seed, config.alpha,
                 baseline_synthetic_only(generative_updates, config, seed, split.test)});
    }

    if (!config.variants.empty()) {
      const SyntheticDataset raw =
          generate_samples(generative_updates, config.total_synthetic, seed);
      const SyntheticDataset filtered = optimize_samples(raw, config.retention_ratio);
      if (config.emit_pgm) {
        summary.grids.push_back(
            build_sample_grid("samples_raw_seed" + std::to_string(seed), raw, 10));
        summary.grids.push_back(
            build_sample_grid("samples_filtered_seed" + std::to_string(seed), filtered, 10));
      }

      const GlobalModel initial = init_global(classifier_updates);
      for (const Variant variant : config.variants) {
        FusionConfig fusion;
        fusion.variant = variant;
        fusion.lambda = config.lambda;
        fusion.global_epochs = config.global_epochs;
        fusion.optimizer = OptimizerSpec::adam(config.global_lr);
        fusion.batch_size = config.batch_size;
        fusion.total_synthetic = config.total_synthetic;
        fusion.retention_ratio = config.retention_ratio;
        fusion.seed = seed;

        FusionCurve curve;
        curve.variant = variant_name(variant);
        curve.seed = seed;
        FusionMetrics metrics;
        const GlobalModel trained =
            fuse(GlobalModel{initial.model.clone(), initial.init_state.clone()}, filtered,
                 classifier_updates, fusion, &metrics,
                 [&curve, &split](std::size_t, const MlpClassifier& model) {
                   curve.test_acc.push_back(top1_accuracy(model, split.test).top1);
                 });
        curve.ce = std::move(metrics.ce);
        curve.kl = std::move(metrics.kl);
        summary.curves.push_back(std::move(curve));
        summary.rows.push_back(RunRow{variant_name(variant), seed, config.alpha,
                                      top1_accuracy(trained.model, split.test)});
      }
    }

    if (config.save_updates) {
      save_client_updates(classifier_updates, seed, config.out_dir);
      save_client_updates(generative_updates, seed, config.out_dir);
    }
  }
  return summary;
}

void emit_artifacts(const RunSummary& summary, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error(out_dir + ": cannot create output directory: " + ec.message());
  }

  const std::string summary_path = (fs::path(out_dir) / "summary.csv").string();
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(summary_path + ": cannot open for writing");
  }
  out << "variant,seed,alpha,top1\n";
  for (const RunRow& row : summary.rows) {
    out << row.variant << ',' << row.seed << ',' << fmt_double(row.alpha) << ','
        << fmt_double(row.report.top1) << '\n';
  }
  if (!out) {
    throw std::runtime_error(summary_path + ": write failed");
  }
  out.close();

  for (const FusionCurve& curve : summary.curves) {
    const std::string path =
        (fs::path(out_dir) /
         ("fusion_curve_" + curve.variant + "_" + std::to_string(curve.seed) + ".csv"))
            .string();
    std::ofstream curve_out(path, std::ios::binary);
    if (!curve_out) {
      throw std::runtime_error(path + ": cannot open for writing");
    }
    curve_out << "epoch,L_CE,L_KL,test_acc\n";
    for (std::size_t e = 0; e < curve.ce.size(); ++e) {
      curve_out << e << ',' << fmt_double(curve.ce[e]) << ',' << fmt_double(curve.kl[e])
                << ',' << fmt_double(curve.test_acc[e]) << '\n';
    }
    if (!curve_out) {
      throw std::runtime_error(path + ": write failed");
    }
  }

  for (const PgmGrid& grid : summary.grids) {
    write_pgm((fs::path(out_dir) / (grid.name + ".pgm")).string(), grid);
  }
}

}  // namespace fedmho
