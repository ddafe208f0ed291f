#include "fedmho/cvae.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedmho {

namespace {

void check_labels(std::span<const int> labels, std::size_t num_classes, const char* where) {
  for (int c : labels) {
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
      throw std::invalid_argument(std::string(where) + ": class index " + std::to_string(c) +
                                  " out of range [0, " + std::to_string(num_classes) + ")");
    }
  }
}

// [B, D] + labels -> [B, D + num_classes] with a one-hot block appended.
Tensor concat_one_hot(const Tensor& x, std::span<const int> labels, std::size_t num_classes) {
  std::size_t batch = x.shape[0];
  std::size_t width = x.shape[1];
  Tensor out = Tensor::zeros({batch, width + num_classes});
  for (std::size_t i = 0; i < batch; ++i) {
    double* row = out.data.data() + i * (width + num_classes);
    const double* src = x.data.data() + i * width;
    for (std::size_t j = 0; j < width; ++j) {
      row[j] = src[j];
    }
    row[width + static_cast<std::size_t>(labels[i])] = 1.0;
  }
  return out;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace

LatentSample make_latent_sample(std::vector<double> mu, std::vector<double> logvar,
                                std::vector<double> eps) {
  if (mu.size() != logvar.size() || mu.size() != eps.size()) {
    throw std::invalid_argument("make_latent_sample: mismatched lengths");
  }
  LatentSample s;
  s.z.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    s.z[i] = mu[i] + std::exp(0.5 * logvar[i]) * eps[i];
  }
  s.mu = std::move(mu);
  s.logvar = std::move(logvar);
  s.eps = std::move(eps);
  return s;
}

Tensor reparameterize(const Tensor& mu, const Tensor& logvar, const Tensor& eps) {
  check_same_shape(mu, logvar, "reparameterize");
  check_same_shape(mu, eps, "reparameterize");
  Tensor z(mu.shape);
  for (std::size_t i = 0; i < z.data.size(); ++i) {
    z.data[i] = mu.data[i] + std::exp(0.5 * logvar.data[i]) * eps.data[i];
  }
  return z;
}

double gaussian_standard_kl(std::span<const double> mu, std::span<const double> logvar) {
  if (mu.size() != logvar.size()) {
    throw std::invalid_argument("gaussian_standard_kl: mismatched lengths");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    acc += 1.0 + logvar[i] - mu[i] * mu[i] - std::exp(logvar[i]);
  }
  return -0.5 * acc;
}

CvaeDecoder::CvaeDecoder(std::size_t latent_dim, std::size_t num_classes,
                         std::size_t hidden_dim, std::size_t output_dim)
    : latent_dim(latent_dim),
      num_classes(num_classes),
      output_dim(output_dim),
      trunk(latent_dim + num_classes, hidden_dim, Activation::Relu),
      out(hidden_dim, output_dim, Activation::Sigmoid) {
  if (latent_dim == 0 || num_classes == 0 || hidden_dim == 0 || output_dim == 0) {
    throw std::invalid_argument("CvaeDecoder: zero dimension");
  }
}

void CvaeDecoder::init_params(Rng& rng) {
  trunk.init_params(rng);
  out.init_params(rng);
}

Tensor CvaeDecoder::decode(const Tensor& z, std::span<const int> labels) const {
  if (z.shape.size() != 2 || z.shape[1] != latent_dim) {
    throw std::invalid_argument("CvaeDecoder::decode: expected [B, " +
                                std::to_string(latent_dim) + "] latents, got " + z.shape_str());
  }
  if (labels.size() != z.shape[0]) {
    throw std::invalid_argument("CvaeDecoder::decode: label count mismatch");
  }
  check_labels(labels, num_classes, "CvaeDecoder::decode");
  return out.forward(trunk.forward(concat_one_hot(z, labels, num_classes)));
}

std::vector<double> CvaeDecoder::decode_one(std::span<const double> z, int label) const {
  Tensor zt({1, z.size()}, std::vector<double>(z.begin(), z.end()));
  int labels[1] = {label};
  return decode(zt, labels).data;
}

std::vector<Parameter*> CvaeDecoder::parameters() {
  return {&trunk.weight, &trunk.bias, &out.weight, &out.bias};
}

std::vector<const Parameter*> CvaeDecoder::parameters() const {
  return {&trunk.weight, &trunk.bias, &out.weight, &out.bias};
}

std::vector<double> decoder_sample(const CvaeDecoder& decoder, int label, Rng& rng) {
  std::vector<double> z(decoder.latent_dim);
  for (double& v : z) {
    v = rng.normal();
  }
  return decoder.decode_one(z, label);
}

Cvae::Cvae(std::size_t input_dim, std::size_t num_classes, std::size_t hidden_dim,
           std::size_t latent_dim)
    : input_dim_(input_dim),
      num_classes_(num_classes),
      latent_dim_(latent_dim),
      enc_trunk_(input_dim + num_classes, hidden_dim, Activation::Relu),
      mu_head_(hidden_dim, latent_dim, Activation::Identity),
      logvar_head_(hidden_dim, latent_dim, Activation::Identity),
      decoder_(latent_dim, num_classes, hidden_dim, input_dim) {
  if (input_dim == 0 || num_classes == 0 || hidden_dim == 0 || latent_dim == 0) {
    throw std::invalid_argument("Cvae: zero dimension");
  }
}

void Cvae::init_params(Rng& rng) {
  enc_trunk_.init_params(rng);
  mu_head_.init_params(rng);
  logvar_head_.init_params(rng);
  decoder_.init_params(rng);
}

std::pair<Tensor, Tensor> Cvae::encode(const Tensor& x, std::span<const int> labels) const {
  if (x.shape.size() != 2 || x.shape[1] != input_dim_) {
    throw std::invalid_argument("Cvae::encode: expected [B, " + std::to_string(input_dim_) +
                                "] inputs, got " + x.shape_str());
  }
  if (labels.size() != x.shape[0]) {
    throw std::invalid_argument("Cvae::encode: label count mismatch");
  }
  check_labels(labels, num_classes_, "Cvae::encode");
  Tensor h = enc_trunk_.forward(concat_one_hot(x, labels, num_classes_));
  return {mu_head_.forward(h), logvar_head_.forward(h)};
}

std::pair<std::vector<double>, std::vector<double>> Cvae::encode_one(
    std::span<const double> x, int label) const {
  Tensor xt({1, x.size()}, std::vector<double>(x.begin(), x.end()));
  int labels[1] = {label};
  auto [mu, logvar] = encode(xt, labels);
  return {std::move(mu.data), std::move(logvar.data)};
}

CvaeLoss Cvae::loss_and_grad(const Tensor& x, std::span<const int> labels, const Tensor& eps) {
  if (x.shape.size() != 2 || x.shape[1] != input_dim_) {
    throw std::invalid_argument("Cvae::loss_and_grad: expected [B, " +
                                std::to_string(input_dim_) + "] inputs, got " + x.shape_str());
  }
  std::size_t batch = x.shape[0];
  if (batch == 0) {
    throw std::invalid_argument("Cvae::loss_and_grad: empty batch");
  }
  if (labels.size() != batch) {
    throw std::invalid_argument("Cvae::loss_and_grad: label count mismatch");
  }
  check_labels(labels, num_classes_, "Cvae::loss_and_grad");
  if (eps.shape.size() != 2 || eps.shape[0] != batch || eps.shape[1] != latent_dim_) {
    throw std::invalid_argument("Cvae::loss_and_grad: eps must be [B, " +
                                std::to_string(latent_dim_) + "], got " + eps.shape_str());
  }
  for (double v : x.data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("Cvae::loss_and_grad: inputs must lie in [0, 1]");
    }
  }

  const double scale = 1.0 / static_cast<double>(batch);

  // Encoder forward.
  Tensor enc_in = concat_one_hot(x, labels, num_classes_);
  Tensor enc_preact;
  Tensor h_enc = enc_trunk_.forward_cached(enc_in, enc_preact);
  Tensor mu_preact;
  Tensor mu = mu_head_.forward_cached(h_enc, mu_preact);
  Tensor logvar_preact;
  Tensor logvar = logvar_head_.forward_cached(h_enc, logvar_preact);

  // Reparameterize and decode. The sigmoid is fused into the loss below, so
  // only the output pre-activation is needed.
  Tensor z = reparameterize(mu, logvar, eps);
  Tensor dec_in = concat_one_hot(z, labels, num_classes_);
  Tensor dec_preact;
  Tensor h_dec = decoder_.trunk.forward_cached(dec_in, dec_preact);
  Tensor u;  // pre-activation of the sigmoid head
  (void)decoder_.out.forward_cached(h_dec, u);

  // Reconstruction: numerically stable Bernoulli BCE from the pre-activation,
  // max(u,0) - x*u + log(1 + exp(-|u|)), with gradient sigmoid(u) - x.
  double recon_sum = 0.0;
  Tensor d_u({batch, input_dim_});
  for (std::size_t i = 0; i < u.data.size(); ++i) {
    const double ui = u.data[i];
    const double xi = x.data[i];
    recon_sum += std::max(ui, 0.0) - xi * ui + std::log1p(std::exp(-std::abs(ui)));
    d_u.data[i] = scale * (sigmoid(ui) - xi);
  }

  double kl_sum = 0.0;
  for (std::size_t i = 0; i < mu.data.size(); ++i) {
    kl_sum += 1.0 + logvar.data[i] - mu.data[i] * mu.data[i] - std::exp(logvar.data[i]);
  }
  kl_sum *= -0.5;

  // Backward: decoder, then split z-gradient into mu/logvar paths, add the
  // direct KL gradients, and push both heads' contributions into the trunk.
  Tensor d_hdec = decoder_.out.backward_preact(h_dec, d_u);
  Tensor d_decin = decoder_.trunk.backward(dec_in, dec_preact, d_hdec);

  Tensor d_mu({batch, latent_dim_});
  Tensor d_logvar({batch, latent_dim_});
  for (std::size_t i = 0; i < batch; ++i) {
    const double* dz_row = d_decin.data.data() + i * (latent_dim_ + num_classes_);
    for (std::size_t j = 0; j < latent_dim_; ++j) {
      const std::size_t idx = i * latent_dim_ + j;
      const double dz = dz_row[j];
      const double sd = std::exp(0.5 * logvar.data[idx]);
      d_mu.data[idx] = dz + scale * mu.data[idx];
      d_logvar.data[idx] =
          dz * 0.5 * sd * eps.data[idx] + scale * 0.5 * (std::exp(logvar.data[idx]) - 1.0);
    }
  }

  Tensor d_henc = mu_head_.backward_preact(h_enc, d_mu);
  Tensor d_henc2 = logvar_head_.backward_preact(h_enc, d_logvar);
  for (std::size_t i = 0; i < d_henc.data.size(); ++i) {
    d_henc.data[i] += d_henc2.data[i];
  }
  enc_trunk_.backward(enc_in, enc_preact, d_henc);

  CvaeLoss loss;
  loss.recon = recon_sum * scale;
  loss.kl = kl_sum * scale;
  loss.total = loss.recon + loss.kl;
  return loss;
}

std::vector<Parameter*> Cvae::parameters() {
  std::vector<Parameter*> params = {&enc_trunk_.weight, &enc_trunk_.bias,
                                    &mu_head_.weight,   &mu_head_.bias,
                                    &logvar_head_.weight, &logvar_head_.bias};
  for (Parameter* p : decoder_.parameters()) {
    params.push_back(p);
  }
  return params;
}

void Cvae::zero_grad() {
  for (Parameter* p : parameters()) {
    p->zero_grad();
  }
}

}  // namespace fedmho
