#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ddtopo/domain_grid.hpp"
#include "ddtopo/evolution.hpp"
#include "ddtopo/linalg.hpp"

namespace ddtopo {

// Fully-connected VAE over the active cells of a mask:
// encoder [input, hidden] -> {mu, logvar} heads, decoder [latent, hidden,
// input], ReLU hidden layers, sigmoid output. Weights are row-major with
// activations as rows (y = x W + b).
struct VaeModel {
    int input_dim = 0, hidden_dim = 0, latent_dim = 0;
    MaskPtr mask;
    std::uint64_t train_seed = 0;

    Matrix w1, b1;  // input -> hidden
    Matrix wm, bm;  // hidden -> mu
    Matrix wv, bv;  // hidden -> logvar
    Matrix w2, b2;  // latent -> hidden
    Matrix w3, b3;  // hidden -> output

    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;
};

struct TrainConfig {
    int epochs = 500;
    int batch = 10;
    double learning_rate = 1e-3;
    double kl_weight = 1e-3;  // vs element-averaged squared error
};

struct SpxConfig {
    int parents_per_group = 9;       // latent dim + 1
    double expansion = 3.1622776601683795;  // sqrt(10)
    int offspring_count = 1;
};

// Glorot-uniform initialized model (biases zero).
VaeModel make_vae(MaskPtr mask, int hidden, int latent, std::mt19937_64& rng);

// Batched loss and parameter gradients for given inputs and reparameterization
// noise. Loss = mean over the batch of (element-averaged squared error +
// kl_weight * KL(N(mu, sigma^2) || N(0, I)) summed over latent dims).
struct VaeGradients {
    Matrix w1, b1, wm, bm, wv, bv, w2, b2, w3, b3;
    std::vector<Matrix*> parameters();
};
double vae_loss_and_grads(const VaeModel& m, const Matrix& X, const Matrix& eps,
                          double kl_weight, VaeGradients* grads);

struct TrainResult {
    VaeModel model;
    std::vector<double> epoch_loss;  // per-epoch mean batch loss
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) over shuffled mini-batches.
TrainResult train_vae(const std::vector<DensityField>& data, const TrainConfig& cfg,
                      std::mt19937_64& rng, int hidden = 512, int latent = 8);

// mu and sigma = exp(logvar/2) for one field.
std::pair<std::vector<double>, std::vector<double>> encode(const VaeModel& m,
                                                           const DensityField& field);

// z = mu + sigma (.) eps, eps ~ N(0, I) from the given generator.
std::vector<double> reparameterize(const std::vector<double>& mu,
                                   const std::vector<double>& sigma, std::mt19937_64& rng);

// Sigmoid output mapped onto the model's mask; values in (0,1).
DensityField decode(const VaeModel& m, const std::vector<double>& z);

// Simplex crossover: vertices expanded about the centroid by the expansion
// rate, offspring sampled uniformly from the expanded simplex via the
// recursive construction. Parent group size must equal cfg.parents_per_group.
std::vector<std::vector<double>> spx_sample(const std::vector<std::vector<double>>& parents,
                                            const SpxConfig& cfg, std::mt19937_64& rng);

// Trains a fresh VAE on the population, encodes members to their mean
// vectors, and repeatedly draws distinct parent groups + one SPX offspring
// each, decoded to density fields. Offspring whose binarization has no solid
// element are discarded and resampled (budget 10 * n_vae attempts).
std::vector<DensityField> crossover(const Population& pop, int n_vae, const TrainConfig& tcfg,
                                    const SpxConfig& scfg, std::mt19937_64& rng,
                                    double binarize_threshold = 0.5,
                                    std::vector<double>* loss_history = nullptr,
                                    int hidden = 512, int latent = 8,
                                    VaeModel* out_model = nullptr);

// Flat binary weight file with a text header (shapes + training seed).
void save_vae(const VaeModel& m, const std::string& path);
VaeModel load_vae(const std::string& path, const MaskPtr& mask);

}  // namespace ddtopo
