#pragma once

#include <Eigen/Cholesky>

#include <optional>

#include "ucibdl/types.hpp"

namespace ucibdl {

/// RBF kernel settings for the surrogate; inputs live in the unit box.
struct GPConfig {
  Vector lengthscales;  // per dimension; empty -> 0.2 per dimension
  std::optional<Scalar> signal_variance;  // unset -> variance of observed values
  Scalar noise_variance = 1e-4;
};

/// Gaussian-process regression surrogate with a cached Cholesky factor of
/// (K + noise I). Immutable after fit.
class GPSurrogate {
 public:
  struct Posterior {
    Scalar mean = 0.0;
    Scalar variance = 0.0;  // latent variance, >= 0
  };

  /// Values are centered internally. Cholesky failures escalate a jitter
  /// term from 1e-10 to 1e-6 before giving up.
  static GPSurrogate fit(ConstMatrixRef inputs, ConstVectorRef values,
                         const GPConfig& config);

  Posterior posterior(ConstVectorRef query) const;

  Scalar signal_variance() const { return signal_variance_; }
  Index n_observations() const { return inputs_.rows(); }

 private:
  GPSurrogate() = default;

  Vector kernel_column(ConstVectorRef query) const;

  Matrix inputs_;
  Vector lengthscales_;
  Scalar signal_variance_ = 1.0;
  Scalar noise_variance_ = 1e-4;
  Scalar value_mean_ = 0.0;
  Eigen::LLT<Matrix> chol_;
  Vector alpha_;  // (K + noise I)^-1 (values - mean)
};

/// EI for maximization: (mu - best) Phi(z) + sigma phi(z), z = (mu - best)/sigma;
/// degenerates to max(mu - best, 0) when sigma = 0.
Scalar expected_improvement(Scalar mean, Scalar variance, Scalar best_so_far);

Scalar standard_normal_cdf(Scalar z);
Scalar standard_normal_pdf(Scalar z);

}  // namespace ucibdl
