#include "ucibdl/inference.hpp"

#include <cmath>

#include "ucibdl/dataset.hpp"

namespace ucibdl {

namespace {
constexpr Scalar kLogTwoPi = 1.8378770664093454836;  // log(2*pi)
}

PredictiveSamples mc_predict(const TrainedModel& model, ConstMatrixRef x_test_raw, int T,
                             std::uint64_t seed) {
  require(T >= 1, "mc_predict: need at least one stochastic pass");
  require(x_test_raw.rows() >= 1, "mc_predict: empty test set");

  const Matrix x_test = standardize_features(model.standardizer, x_test_raw);
  const Index n = x_test.rows();

  PredictiveSamples out;
  out.samples.resize(T, n);
  const Rng base(seed);
  for (int t = 0; t < T; ++t) {
    Rng pass_rng = base.stream(static_cast<std::uint64_t>(t));
    const DropoutMasks masks = sample_masks(model.config, n, pass_rng);
    const Vector y_std = forward(model.params, x_test, masks);
    out.samples.row(t) = invert_targets(model.standardizer, y_std).transpose();
  }
  require(out.samples.allFinite(), "mc_predict: non-finite predictions");
  return out;
}

Scalar rmse(const PredictiveSamples& samples, ConstVectorRef y_true) {
  require(samples.n_points() == y_true.size(), "rmse: length mismatch");
  require(y_true.size() > 0, "rmse: empty test set");
  const Vector mean_prediction = samples.samples.colwise().mean();
  return std::sqrt((mean_prediction - y_true).squaredNorm() /
                   static_cast<Scalar>(y_true.size()));
}

Scalar logsumexp(ConstVectorRef x) {
  require(x.size() > 0, "logsumexp: empty input");
  const Scalar shift = x.maxCoeff();
  if (!std::isfinite(shift)) return shift;  // all -inf stays -inf
  return shift + std::log((x.array() - shift).exp().sum());
}

Scalar predictive_log_likelihood(const PredictiveSamples& samples, ConstVectorRef y_true,
                                 Scalar tau) {
  require(tau > 0.0, "predictive_log_likelihood: tau must be positive");
  require(samples.n_points() == y_true.size(), "predictive_log_likelihood: length mismatch");
  require(y_true.size() > 0, "predictive_log_likelihood: empty test set");

  const Index T = samples.n_samples();
  const Scalar constant =
      -std::log(static_cast<Scalar>(T)) - 0.5 * kLogTwoPi + 0.5 * std::log(tau);
  Scalar total = 0.0;
  for (Index i = 0; i < y_true.size(); ++i) {
    const Vector scaled =
        (-0.5 * tau * (samples.samples.col(i).array() - y_true(i)).square()).matrix();
    total += logsumexp(scaled) + constant;
  }
  return total / static_cast<Scalar>(y_true.size());
}

MetricPair evaluate(const PredictiveSamples& samples, ConstVectorRef y_true, Scalar tau) {
  return MetricPair{rmse(samples, y_true),
                    predictive_log_likelihood(samples, y_true, tau)};
}

}  // namespace ucibdl
