#include "ucibdl/mlp.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ucibdl {

void MLPConfig::validate() const {
  require(input_dim >= 1, "input_dim must be >= 1");
  require(hidden_units >= 1, "hidden_units must be >= 1");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout rate must be in [0,1)");
  require(lengthscale > 0.0, "lengthscale must be positive");
  require(std::isfinite(weight_decay) && weight_decay >= 0.0,
          "weight decay must be finite and non-negative");
}

void TrainConfig::validate() const {
  require(epochs >= 0, "epochs must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0,
          "adam betas must be in (0,1)");
  require(epsilon > 0.0, "adam epsilon must be positive");
}

Scalar weight_decay_for(Scalar lengthscale, Scalar dropout, Index n_train, Scalar tau) {
  require(tau > 0.0, "tau must be positive");
  require(n_train >= 1, "n_train must be >= 1");
  return lengthscale * lengthscale * (1.0 - dropout) /
         (2.0 * static_cast<Scalar>(n_train) * tau);
}

MLPParams init_params(const MLPConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  MLPParams p;
  p.w1.resize(config.input_dim, config.hidden_units);
  p.b1 = Vector::Zero(config.hidden_units);
  p.w2.resize(config.hidden_units);
  p.b2 = 0.0;

  const Scalar bound1 =
      std::sqrt(6.0 / static_cast<Scalar>(config.input_dim + config.hidden_units));
  for (Index i = 0; i < p.w1.rows(); ++i)
    for (Index j = 0; j < p.w1.cols(); ++j) p.w1(i, j) = rng.uniform(-bound1, bound1);

  const Scalar bound2 = std::sqrt(6.0 / static_cast<Scalar>(config.hidden_units + 1));
  for (Index j = 0; j < p.w2.size(); ++j) p.w2(j) = rng.uniform(-bound2, bound2);
  return p;
}

DropoutMasks sample_masks(const MLPConfig& config, Index batch, Rng& rng) {
  const Scalar d = config.dropout_rate;
  DropoutMasks masks;
  if (d == 0.0) {
    masks.input = Matrix::Ones(batch, config.input_dim);
    masks.hidden = Matrix::Ones(batch, config.hidden_units);
    return masks;
  }
  const Scalar keep_scale = 1.0 / (1.0 - d);
  auto fill = [&](Matrix& m, Index cols) {
    m.resize(batch, cols);
    for (Index i = 0; i < batch; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform() < d ? 0.0 : keep_scale;
  };
  fill(masks.input, config.input_dim);
  fill(masks.hidden, config.hidden_units);
  return masks;
}

Vector forward(const MLPParams& params, ConstMatrixRef x, const DropoutMasks& masks,
               ForwardCache* cache) {
  require(x.cols() == params.w1.rows(),
          "forward: input has " + std::to_string(x.cols()) + " columns, expected " +
              std::to_string(params.w1.rows()));
  require(masks.input.rows() == x.rows() && masks.input.cols() == x.cols() &&
              masks.hidden.rows() == x.rows() && masks.hidden.cols() == params.w2.size(),
          "forward: mask shape mismatch");
  require(x.allFinite(), "forward: non-finite input");

  Matrix x_masked = x.cwiseProduct(masks.input);
  Matrix z1 = (x_masked * params.w1).rowwise() + params.b1.transpose();
  Matrix h_masked = z1.cwiseMax(0.0).cwiseProduct(masks.hidden);
  Vector predictions = (h_masked * params.w2).array() + params.b2;

  if (cache != nullptr) {
    cache->x_masked = std::move(x_masked);
    cache->z1 = std::move(z1);
    cache->h_masked = std::move(h_masked);
    cache->hidden_mask = masks.hidden;
    cache->predictions = predictions;
  }
  return predictions;
}

Vector predict(const MLPParams& params, ConstMatrixRef x) {
  require(x.cols() == params.w1.rows(),
          "predict: input has " + std::to_string(x.cols()) + " columns, expected " +
              std::to_string(params.w1.rows()));
  Matrix h = ((x * params.w1).rowwise() + params.b1.transpose()).cwiseMax(0.0);
  return (h * params.w2).array() + params.b2;
}

Scalar loss(ConstVectorRef predictions, ConstVectorRef targets, const MLPParams& params,
            Scalar weight_decay) {
  require(predictions.size() == targets.size(), "loss: length mismatch");
  require(predictions.size() > 0, "loss: empty batch");
  require(predictions.allFinite() && targets.allFinite(), "loss: non-finite inputs");
  const Scalar mse =
      (predictions - targets).squaredNorm() / static_cast<Scalar>(predictions.size());
  const Scalar reg = params.w1.squaredNorm() + params.w2.squaredNorm() +
                     params.b1.squaredNorm() + params.b2 * params.b2;
  return mse + weight_decay * reg;
}

Gradients backward(const MLPParams& params, const ForwardCache& cache,
                   ConstVectorRef targets, Scalar weight_decay) {
  const Index batch = cache.predictions.size();
  require(batch == targets.size(), "backward: target length mismatch");
  require(cache.z1.rows() == batch && cache.x_masked.rows() == batch,
          "backward: stale or mismatched cache");

  // d(mse)/d(yhat)
  Vector dy = 2.0 / static_cast<Scalar>(batch) * (cache.predictions - targets);

  Gradients g;
  g.w2 = cache.h_masked.transpose() * dy + 2.0 * weight_decay * params.w2;
  g.b2 = dy.sum() + 2.0 * weight_decay * params.b2;

  // Through the hidden mask and the relu kink (masks are constants).
  Matrix dh = (dy * params.w2.transpose()).cwiseProduct(cache.hidden_mask);
  Matrix dz1 = (cache.z1.array() > 0.0).select(dh, Matrix::Zero(batch, dh.cols()));

  g.w1 = cache.x_masked.transpose() * dz1 + 2.0 * weight_decay * params.w1;
  g.b1 = dz1.colwise().sum().transpose() + 2.0 * weight_decay * params.b1;
  return g;
}

AdamState AdamState::zeros_like(const MLPParams& params) {
  AdamState s;
  s.m.w1 = Matrix::Zero(params.w1.rows(), params.w1.cols());
  s.m.b1 = Vector::Zero(params.b1.size());
  s.m.w2 = Vector::Zero(params.w2.size());
  s.m.b2 = 0.0;
  s.v = s.m;
  return s;
}

void adam_step(MLPParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  state.step += 1;
  const Scalar b1 = config.beta1;
  const Scalar b2 = config.beta2;
  const Scalar correction1 = 1.0 - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar correction2 = 1.0 - std::pow(b2, static_cast<Scalar>(state.step));
  const Scalar scale = config.learning_rate / correction1;

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    theta -= scale * (m.array() / ((v.array() / correction2).sqrt() + config.epsilon))
                         .matrix();
  };
  update(params.w1, grads.w1, state.m.w1, state.v.w1);
  update(params.b1, grads.b1, state.m.b1, state.v.b1);
  update(params.w2, grads.w2, state.m.w2, state.v.w2);

  state.m.b2 = b1 * state.m.b2 + (1.0 - b1) * grads.b2;
  state.v.b2 = b2 * state.v.b2 + (1.0 - b2) * grads.b2 * grads.b2;
  params.b2 -= scale * (state.m.b2 / (std::sqrt(state.v.b2 / correction2) + config.epsilon));
}

TrainedModel train(ConstMatrixRef x_train, ConstVectorRef y_train, const MLPConfig& config,
                   const TrainConfig& train_config, const Standardizer& standardizer) {
  config.validate();
  train_config.validate();
  require(x_train.rows() == y_train.size(), "train: row count mismatch");
  require(x_train.rows() >= 1, "train: empty training set");
  require(x_train.cols() == config.input_dim, "train: input_dim mismatch");
  require(x_train.allFinite() && y_train.allFinite(), "train: non-finite training data");

  TrainedModel model;
  model.config = config;
  model.standardizer = standardizer;
  model.params = init_params(config, derive_seed(train_config.seed, 0x1417));

  Rng shuffle_rng(derive_seed(train_config.seed, 0x52f1));
  Rng mask_rng(derive_seed(train_config.seed, 0x3a5f));

  const Index n = x_train.rows();
  IndexList order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  AdamState opt_state = AdamState::zeros_like(model.params);
  ForwardCache cache;
  Matrix x_batch;
  Vector y_batch;

  const auto start = std::chrono::steady_clock::now();
  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (Index offset = 0; offset < n; offset += train_config.batch_size) {
      const Index batch = std::min<Index>(train_config.batch_size, n - offset);
      x_batch.resize(batch, x_train.cols());
      y_batch.resize(batch);
      for (Index i = 0; i < batch; ++i) {
        x_batch.row(i) = x_train.row(order[static_cast<std::size_t>(offset + i)]);
        y_batch(i) = y_train(order[static_cast<std::size_t>(offset + i)]);
      }

      const DropoutMasks masks = sample_masks(config, batch, mask_rng);
      Scalar batch_loss;
      try {
        forward(model.params, x_batch, masks, &cache);
        batch_loss = loss(cache.predictions, y_batch, model.params, config.weight_decay);
      } catch (const Error&) {
        // Data was validated up front, so a failure here means divergence.
        throw Error("non-finite loss at epoch " + std::to_string(epoch));
      }
      if (!std::isfinite(batch_loss)) {
        throw Error("non-finite loss at epoch " + std::to_string(epoch));
      }
      const Gradients grads = backward(model.params, cache, y_batch, config.weight_decay);
      adam_step(model.params, grads, opt_state, train_config);
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  model.train_wall_time_seconds = std::chrono::duration<double>(stop - start).count();

  require(model.params.all_finite(), "training produced non-finite parameters");
  return model;
}

namespace {

void write_matrix(std::ostream& out, ConstMatrixRef m) {
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << "\n";
  }
}

Matrix read_matrix(std::istream& in, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) throw Error("truncated model file");
    }
  return m;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& file) {
  std::ofstream out(file);
  require(out.good(), "cannot write model file " + file.string());
  out << "ucibdl-mlp 1\n";
  out << model.config.input_dim << " " << model.config.hidden_units << "\n";
  out.precision(17);
  out << model.config.dropout_rate << " " << model.config.lengthscale << " "
      << model.config.weight_decay << "\n";
  out << model.standardizer.target_mean << " " << model.standardizer.target_std << "\n";
  write_matrix(out, model.standardizer.feature_means.transpose());
  write_matrix(out, model.standardizer.feature_stds.transpose());
  write_matrix(out, model.params.w1);
  write_matrix(out, model.params.b1.transpose());
  write_matrix(out, model.params.w2.transpose());
  out << model.params.b2 << "\n";
  out << model.train_wall_time_seconds << "\n";
  require(out.good(), "failed writing model file " + file.string());
}

TrainedModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(in.good(), "cannot open model file " + file.string());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  require(magic == "ucibdl-mlp" && version == 1,
          "unsupported model file format in " + file.string());

  TrainedModel model;
  in >> model.config.input_dim >> model.config.hidden_units;
  in >> model.config.dropout_rate >> model.config.lengthscale >> model.config.weight_decay;
  in >> model.standardizer.target_mean >> model.standardizer.target_std;
  require(in.good(), "truncated model file " + file.string());
  model.standardizer.feature_means =
      read_matrix(in, 1, model.config.input_dim).transpose();
  model.standardizer.feature_stds =
      read_matrix(in, 1, model.config.input_dim).transpose();
  model.params.w1 = read_matrix(in, model.config.input_dim, model.config.hidden_units);
  model.params.b1 = read_matrix(in, 1, model.config.hidden_units).transpose();
  model.params.w2 = read_matrix(in, 1, model.config.hidden_units).transpose();
  in >> model.params.b2 >> model.train_wall_time_seconds;
  require(!in.fail(), "truncated model file " + file.string());
  model.config.validate();
  return model;
}

}  // namespace ucibdl
