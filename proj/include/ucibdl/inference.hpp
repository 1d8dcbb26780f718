#pragma once

#include <cstdint>

#include "ucibdl/mlp.hpp"
#include "ucibdl/types.hpp"

namespace ucibdl {

/// T stochastic forward passes in original (de-standardized) target units.
struct PredictiveSamples {
  Matrix samples;  // T x n_test

  Index n_samples() const { return samples.rows(); }
  Index n_points() const { return samples.cols(); }
};

struct MetricPair {
  Scalar rmse = 0.0;
  Scalar mean_log_likelihood = 0.0;
};

/// Runs T stochastic forward passes with fresh masks. Raw test features are
/// standardized with the model's standardizer before the pass and outputs are
/// mapped back to original units. The per-pass RNG substream is indexed by t,
/// so results do not depend on evaluation order.
PredictiveSamples mc_predict(const TrainedModel& model, ConstMatrixRef x_test_raw, int T,
                             std::uint64_t seed);

/// sqrt(mean_i (ybar_i - y_i)^2) where ybar is the across-sample mean.
Scalar rmse(const PredictiveSamples& samples, ConstVectorRef y_true);

/// Mean over test points of
///   logsumexp_t(-tau/2 (y_i - yhat_ti)^2) - log T - log(2 pi)/2 + log(tau)/2.
Scalar predictive_log_likelihood(const PredictiveSamples& samples, ConstVectorRef y_true,
                                 Scalar tau);

MetricPair evaluate(const PredictiveSamples& samples, ConstVectorRef y_true, Scalar tau);

/// Shift-stable log(sum_i exp(x_i)).
Scalar logsumexp(ConstVectorRef x);

}  // namespace ucibdl
