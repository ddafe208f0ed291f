#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fedmho/nn.hpp"
#include "fedmho/rng.hpp"

namespace fedmho {

// One draw through the reparameterization z = mu + exp(0.5*logvar) .* eps.
struct LatentSample {
  std::vector<double> mu;
  std::vector<double> logvar;
  std::vector<double> eps;
  std::vector<double> z;
};

LatentSample make_latent_sample(std::vector<double> mu, std::vector<double> logvar,
                                std::vector<double> eps);

// Batched reparameterization; all three tensors share shape [B, d_z].
Tensor reparameterize(const Tensor& mu, const Tensor& logvar, const Tensor& eps);

// KL( N(mu, diag(exp(logvar))) || N(0, I) ), closed form, summed over dims.
double gaussian_standard_kl(std::span<const double> mu, std::span<const double> logvar);

// Label-conditioned decoder: [z || one-hot(c)] -> hidden (ReLU) -> sigmoid output.
// Shipped to the server on its own, so it lives outside the full autoencoder.
struct CvaeDecoder {
  std::size_t latent_dim;
  std::size_t num_classes;
  std::size_t output_dim;
  DenseLayer trunk;
  DenseLayer out;

  CvaeDecoder(std::size_t latent_dim, std::size_t num_classes, std::size_t hidden_dim,
              std::size_t output_dim);

  void init_params(Rng& rng);

  // [B, d_z] + labels -> [B, output_dim], entries strictly in (0, 1).
  Tensor decode(const Tensor& z, std::span<const int> labels) const;
  // Single-sample convenience.
  std::vector<double> decode_one(std::span<const double> z, int label) const;

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
};

// Draws z ~ N(0, I) from `rng` and decodes it under `label`.
std::vector<double> decoder_sample(const CvaeDecoder& decoder, int label, Rng& rng);

struct CvaeLoss {
  double total = 0.0;  // mean over the batch of (recon + kl)
  double recon = 0.0;  // mean reconstruction term
  double kl = 0.0;     // mean KL term
};

// Conditional VAE: encoder [x || one-hot(c)] -> hidden -> (mu, logvar), plus the
// decoder above. Inputs are expected in [0, 1]; reconstruction is Bernoulli BCE.
class Cvae {
public:
  Cvae(std::size_t input_dim, std::size_t num_classes, std::size_t hidden_dim,
       std::size_t latent_dim);

  void init_params(Rng& rng);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t latent_dim() const { return latent_dim_; }

  // [B, D] + labels -> (mu [B, d_z], logvar [B, d_z]).
  std::pair<Tensor, Tensor> encode(const Tensor& x, std::span<const int> labels) const;
  // Single-sample convenience.
  std::pair<std::vector<double>, std::vector<double>> encode_one(std::span<const double> x,
                                                                 int label) const;

  // ELBO objective for one batch with caller-supplied noise eps [B, d_z]:
  // mean over the batch of (summed per-pixel BCE + summed closed-form KL).
  // Accumulates gradients into every parameter.
  CvaeLoss loss_and_grad(const Tensor& x, std::span<const int> labels, const Tensor& eps);

  std::vector<Parameter*> parameters();
  void zero_grad();

  CvaeDecoder& decoder() { return decoder_; }
  const CvaeDecoder& decoder() const { return decoder_; }

private:
  std::size_t input_dim_;
  std::size_t num_classes_;
  std::size_t latent_dim_;
  DenseLayer enc_trunk_;
  DenseLayer mu_head_;
  DenseLayer logvar_head_;
  CvaeDecoder decoder_;
};

}  // namespace fedmho
