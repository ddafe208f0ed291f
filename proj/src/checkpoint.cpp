#include "fedmho/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fedmho {

namespace {

void write_doubles_le(std::ofstream& out, const std::vector<double>& values) {
  for (double v : values) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) {
      bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

void read_doubles_le(std::ifstream& in, std::vector<double>& values, const std::string& path) {
  for (double& v : values) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
      throw std::runtime_error(path + ": truncated parameter data");
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= std::uint64_t(bytes[i]) << (8 * i);
    }
    v = std::bit_cast<double>(bits);
  }
}

template <typename ParamRange>
void save_params(std::ofstream& out, const ParamRange& params) {
  for (const Parameter* p : params) {
    write_doubles_le(out, p->value.data);
  }
}

template <typename ParamRange>
void load_params(std::ifstream& in, const ParamRange& params, const std::string& path) {
  for (Parameter* p : params) {
    read_doubles_le(in, p->value.data, path);
  }
}

std::ifstream open_checkpoint(const std::string& path, const std::string& want_tag,
                              std::istringstream& header_fields) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path + ": cannot open checkpoint");
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error(path + ": missing checkpoint header");
  }
  header_fields.str(header);
  std::string tag;
  header_fields >> tag;
  if (tag != want_tag) {
    throw std::runtime_error(path + ": expected '" + want_tag + "' checkpoint, got '" + tag +
                             "'");
  }
  return in;
}

}  // namespace

void save_classifier(const MlpClassifier& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << "mlp";
  for (std::size_t d : model.dims()) {
    out << ' ' << d;
  }
  out << '\n';
  save_params(out, model.parameters());
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

MlpClassifier load_classifier(const std::string& path) {
  std::istringstream header;
  std::ifstream in = open_checkpoint(path, "mlp", header);
  std::vector<std::size_t> dims;
  std::size_t d;
  while (header >> d) {
    dims.push_back(d);
  }
  if (dims.size() < 2) {
    throw std::runtime_error(path + ": classifier header needs at least two dims");
  }
  MlpClassifier model(dims);
  load_params(in, model.parameters(), path);
  return model;
}

void save_decoder(const CvaeDecoder& decoder, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << "cvae_decoder " << decoder.latent_dim << ' ' << decoder.num_classes << ' '
      << decoder.trunk.out_dim() << ' ' << decoder.output_dim << '\n';
  save_params(out, decoder.parameters());
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

CvaeDecoder load_decoder(const std::string& path) {
  std::istringstream header;
  std::ifstream in = open_checkpoint(path, "cvae_decoder", header);
  std::size_t latent_dim = 0, num_classes = 0, hidden = 0, output_dim = 0;
  if (!(header >> latent_dim >> num_classes >> hidden >> output_dim)) {
    throw std::runtime_error(path + ": malformed decoder header");
  }
  CvaeDecoder decoder(latent_dim, num_classes, hidden, output_dim);
  load_params(in, decoder.parameters(), path);
  return decoder;
}

void save_histogram(const LabelDistribution& dist, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  out << dist.counts.size() << '\n';
  for (std::size_t c = 0; c < dist.counts.size(); ++c) {
    out << dist.counts[c] << (c + 1 < dist.counts.size() ? ' ' : '\n');
  }
  if (dist.counts.empty()) {
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

LabelDistribution load_histogram(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path + ": cannot open histogram");
  }
  std::size_t num_classes = 0;
  if (!(in >> num_classes)) {
    throw std::runtime_error(path + ": malformed histogram header");
  }
  LabelDistribution dist;
  dist.counts.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (!(in >> dist.counts[c])) {
      throw std::runtime_error(path + ": truncated histogram");
    }
  }
  return dist;
}

}  // namespace fedmho
