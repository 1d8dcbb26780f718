#pragma once

#include <cstdint>

#include "ucibdl/dataset.hpp"
#include "ucibdl/rng.hpp"
#include "ucibdl/types.hpp"

namespace ucibdl {

/// Single-hidden-layer network configuration. The weight decay is tied to
/// the hyperparameters via weight_decay_for(); see that function.
struct MLPConfig {
  Index input_dim = 0;
  Index hidden_units = 50;
  Scalar dropout_rate = 0.05;  // d in [0, 1)
  Scalar lengthscale = 1e-2;   // prior lengthscale l
  Scalar weight_decay = 0.0;   // lambda

  void validate() const;
};

struct MLPParams {
  Matrix w1;  // input_dim x hidden
  Vector b1;  // hidden
  Vector w2;  // hidden (single output column)
  Scalar b2 = 0.0;

  bool all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && std::isfinite(b2);
  }
};

struct Gradients {
  Matrix w1;
  Vector b1;
  Vector w2;
  Scalar b2 = 0.0;
};

struct TrainConfig {
  int epochs = 40;
  int batch_size = 128;
  Scalar learning_rate = 1e-3;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainedModel {
  MLPParams params;
  MLPConfig config;
  Standardizer standardizer;
  double train_wall_time_seconds = 0.0;
};

/// Inverted-dropout masks for the input of each weight layer: entries are
/// 1/(1-d) with probability 1-d, else 0, independently per unit and row.
struct DropoutMasks {
  Matrix input;   // batch x input_dim
  Matrix hidden;  // batch x hidden
};

/// Intermediates retained by a stochastic forward pass for backward().
struct ForwardCache {
  Matrix x_masked;     // batch x input_dim
  Matrix z1;           // batch x hidden, pre-activation
  Matrix h_masked;     // batch x hidden, relu(z1) with hidden mask applied
  Matrix hidden_mask;  // batch x hidden
  Vector predictions;  // batch
};

/// lambda = l^2 (1-d) / (2 N tau); the L2 coefficient implied by the
/// (tau, d) pair for a training set of n_train rows.
Scalar weight_decay_for(Scalar lengthscale, Scalar dropout, Index n_train, Scalar tau);

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
MLPParams init_params(const MLPConfig& config, std::uint64_t seed);

DropoutMasks sample_masks(const MLPConfig& config, Index batch, Rng& rng);

/// h = relu((X .* input_mask) W1 + b1); yhat = (h .* hidden_mask) w2 + b2.
Vector forward(const MLPParams& params, ConstMatrixRef x, const DropoutMasks& masks,
               ForwardCache* cache = nullptr);

/// Deterministic forward pass (all-ones masks), no cache.
Vector predict(const MLPParams& params, ConstMatrixRef x);

/// Mean squared error over the batch plus
/// weight_decay * (|W1|^2 + |w2|^2 + |b1|^2 + b2^2).
Scalar loss(ConstVectorRef predictions, ConstVectorRef targets, const MLPParams& params,
            Scalar weight_decay);

/// Exact analytic gradient of loss() w.r.t. every parameter; masks are
/// treated as constants.
Gradients backward(const MLPParams& params, const ForwardCache& cache,
                   ConstVectorRef targets, Scalar weight_decay);

struct AdamState {
  Gradients m;
  Gradients v;
  long step = 0;

  static AdamState zeros_like(const MLPParams& params);
};

/// Standard bias-corrected Adam update, in place.
void adam_step(MLPParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

/// Runs exactly `epochs` passes over shuffled mini-batches with fresh dropout
/// masks per batch. Inputs are standardized; the standardizer is carried in
/// the returned model so inference can undo it. Wall time covers the epoch
/// loop only.
TrainedModel train(ConstMatrixRef x_train, ConstVectorRef y_train, const MLPConfig& config,
                   const TrainConfig& train_config, const Standardizer& standardizer);

void save_model(const TrainedModel& model, const std::filesystem::path& file);
TrainedModel load_model(const std::filesystem::path& file);

}  // namespace ucibdl
