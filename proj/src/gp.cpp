#include "ucibdl/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace ucibdl {

namespace {

Scalar rbf(ConstVectorRef a, ConstVectorRef b, ConstVectorRef lengthscales,
           Scalar signal_variance) {
  const Scalar sq = ((a - b).array() / lengthscales.array()).square().sum();
  return signal_variance * std::exp(-0.5 * sq);
}

}  // namespace

GPSurrogate GPSurrogate::fit(ConstMatrixRef inputs, ConstVectorRef values,
                             const GPConfig& config) {
  require(inputs.rows() >= 1, "gp_fit: need at least one observation");
  require(inputs.rows() == values.size(), "gp_fit: inputs/values length mismatch");
  require(inputs.allFinite() && values.allFinite(), "gp_fit: non-finite observations");

  GPSurrogate gp;
  gp.inputs_ = inputs;
  gp.noise_variance_ = config.noise_variance;
  gp.lengthscales_ = config.lengthscales.size() > 0
                         ? config.lengthscales
                         : Vector::Constant(inputs.cols(), 0.2);
  require(gp.lengthscales_.size() == inputs.cols(), "gp_fit: lengthscale dimension mismatch");
  require((gp.lengthscales_.array() > 0.0).all(), "gp_fit: lengthscales must be positive");

  if (config.signal_variance.has_value()) {
    gp.signal_variance_ = *config.signal_variance;
  } else if (values.size() >= 2) {
    const Scalar mean = values.mean();
    gp.signal_variance_ =
        (values.array() - mean).square().sum() / static_cast<Scalar>(values.size() - 1);
  } else {
    gp.signal_variance_ = 1.0;
  }
  if (!(gp.signal_variance_ > 0.0)) gp.signal_variance_ = 1.0;

  gp.value_mean_ = values.mean();
  const Vector centered = values.array() - gp.value_mean_;

  const Index n = inputs.rows();
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      k(i, j) = rbf(inputs.row(i).transpose(), inputs.row(j).transpose(),
                    gp.lengthscales_, gp.signal_variance_);
      k(j, i) = k(i, j);
    }
  }
  k.diagonal().array() += gp.noise_variance_;

  Scalar jitter = 0.0;
  for (;;) {
    Matrix attempt = k;
    if (jitter > 0.0) attempt.diagonal().array() += jitter;
    gp.chol_.compute(attempt);
    if (gp.chol_.info() == Eigen::Success) break;
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-6) {
      throw Error("gp_fit: Cholesky failed after jitter escalation to 1e-6");
    }
  }

  gp.alpha_ = gp.chol_.solve(centered);
  return gp;
}

Vector GPSurrogate::kernel_column(ConstVectorRef query) const {
  Vector k(inputs_.rows());
  for (Index i = 0; i < inputs_.rows(); ++i) {
    k(i) = rbf(inputs_.row(i).transpose(), query, lengthscales_, signal_variance_);
  }
  return k;
}

GPSurrogate::Posterior GPSurrogate::posterior(ConstVectorRef query) const {
  require(query.size() == inputs_.cols(), "gp_posterior: query dimension mismatch");
  const Vector k_star = kernel_column(query);
  Posterior post;
  post.mean = value_mean_ + k_star.dot(alpha_);
  const Vector solved = chol_.solve(k_star);
  post.variance = std::max<Scalar>(0.0, signal_variance_ - k_star.dot(solved));
  return post;
}

Scalar standard_normal_cdf(Scalar z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

Scalar standard_normal_pdf(Scalar z) {
  constexpr Scalar kSqrtTwoPi = 2.5066282746310005024;
  return std::exp(-0.5 * z * z) / kSqrtTwoPi;
}

Scalar expected_improvement(Scalar mean, Scalar variance, Scalar best_so_far) {
  require(variance >= 0.0, "expected_improvement: negative variance");
  const Scalar sigma = std::sqrt(variance);
  const Scalar gain = mean - best_so_far;
  if (sigma <= 0.0) return std::max<Scalar>(gain, 0.0);
  const Scalar z = gain / sigma;
  const Scalar ei = gain * standard_normal_cdf(z) + sigma * standard_normal_pdf(z);
  return std::max<Scalar>(ei, 0.0);
}

}  // namespace ucibdl
