#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "ucibdl/inference.hpp"
#include "ucibdl/mlp.hpp"

using namespace ucibdl;
using namespace ucibdl::testing;

namespace {

MLPConfig small_config(Index input_dim = 2, Index hidden = 3, double dropout = 0.0,
                       double weight_decay = 0.0) {
  MLPConfig cfg;
  cfg.input_dim = input_dim;
  cfg.hidden_units = hidden;
  cfg.dropout_rate = dropout;
  cfg.weight_decay = weight_decay;
  return cfg;
}

MLPParams random_params(const MLPConfig& cfg, std::uint64_t seed) {
  MLPParams p = init_params(cfg, seed);
  Rng rng(derive_seed(seed, 77));
  for (Index j = 0; j < p.b1.size(); ++j) p.b1(j) = rng.uniform(-0.5, 0.5);
  p.b2 = rng.uniform(-0.5, 0.5);
  return p;
}

DropoutMasks ones_masks(Index batch, const MLPConfig& cfg) {
  DropoutMasks masks;
  masks.input = Matrix::Ones(batch, cfg.input_dim);
  masks.hidden = Matrix::Ones(batch, cfg.hidden_units);
  return masks;
}

}  // namespace

TEST_SUITE("nn") {
  TEST_CASE("weight_decay_for matches the closed form") {
    // l^2 (1-d) / (2 N tau) with l=0.01, d=0.05, N=100, tau=0.5
    const double expected = 0.01 * 0.01 * 0.95 / (2.0 * 100.0 * 0.5);
    CHECK(weight_decay_for(0.01, 0.05, 100, 0.5) == doctest::Approx(expected).epsilon(1e-14));
    CHECK_THROWS_AS(weight_decay_for(0.01, 0.05, 100, 0.0), Error);
  }

  TEST_CASE("init_params is deterministic with zero biases") {
    const MLPConfig cfg = small_config(4, 8);
    const MLPParams a = init_params(cfg, 42);
    const MLPParams b = init_params(cfg, 42);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
    CHECK((a.b1.array() == 0.0).all());
    CHECK(a.b2 == 0.0);
    const MLPParams c = init_params(cfg, 43);
    CHECK(a.w1 != c.w1);
  }

  TEST_CASE("init_params weights respect the uniform bound and center on zero") {
    const MLPConfig cfg = small_config(100, 100);
    const MLPParams p = init_params(cfg, 7);
    const double bound = std::sqrt(6.0 / 200.0);
    CHECK(p.w1.cwiseAbs().maxCoeff() <= bound);
    // 10000 draws; SE of the mean = bound/sqrt(3 n) ~ 1e-3.
    const double se = bound / std::sqrt(3.0 * 10000.0);
    CHECK(std::abs(p.w1.mean()) < 3.0 * se);
  }

  TEST_CASE("sample_masks degenerate and scaling cases") {
    Rng rng(5);
    SUBCASE("d = 0 gives all-ones masks") {
      const MLPConfig cfg = small_config(3, 4, 0.0);
      const DropoutMasks masks = sample_masks(cfg, 10, rng);
      CHECK((masks.input.array() == 1.0).all());
      CHECK((masks.hidden.array() == 1.0).all());
    }
    SUBCASE("d = 0.5 nonzero entries equal exactly 2") {
      const MLPConfig cfg = small_config(3, 4, 0.5);
      const DropoutMasks masks = sample_masks(cfg, 200, rng);
      for (Index i = 0; i < masks.input.rows(); ++i)
        for (Index j = 0; j < masks.input.cols(); ++j) {
          const double v = masks.input(i, j);
          CHECK((v == 0.0 || v == 2.0));
        }
    }
  }

  TEST_CASE("sample_masks keep rate matches 1-d over a million entries") {
    const double d = 0.3;
    const MLPConfig cfg = small_config(100, 100, d);
    Rng rng(11);
    const DropoutMasks masks = sample_masks(cfg, 5000, rng);
    const double total = static_cast<double>(masks.input.size() + masks.hidden.size());
    const double kept = (masks.input.array() != 0.0).count() +
                        (masks.hidden.array() != 0.0).count();
    const double se = std::sqrt(d * (1.0 - d) / total);
    CHECK(std::abs(kept / total - (1.0 - d)) < 3.0 * se);
  }

  TEST_CASE("forward with zero weights returns the output bias") {
    const MLPConfig cfg = small_config(3, 5);
    MLPParams p = init_params(cfg, 1);
    p.w1.setZero();
    p.w2.setZero();
    p.b2 = 1.25;
    Matrix x = Matrix::Random(7, 3);
    const Vector y = predict(p, x);
    CHECK((y.array() == 1.25).all());
  }

  TEST_CASE("d=0 stochastic forward equals deterministic forward") {
    const MLPConfig cfg = small_config(4, 6, 0.0);
    const MLPParams p = random_params(cfg, 3);
    Matrix x = Matrix::Random(9, 4);
    Rng rng(2);
    const DropoutMasks masks = sample_masks(cfg, 9, rng);
    const Vector stochastic = forward(p, x, masks);
    const Vector deterministic = predict(p, x);
    CHECK((stochastic - deterministic).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("forward matches a hand-computed two-unit example") {
    MLPParams p;
    p.w1.resize(2, 2);
    p.w1 << 0.2, -0.4,
           -0.3,  0.1;
    p.b1.resize(2);
    p.b1 << 0.1, -0.05;
    p.w2.resize(2);
    p.w2 << 1.5, -0.5;
    p.b2 = 0.2;
    Matrix x(2, 2);
    x << 0.5, -1.0,
        -1.0,  2.0;

    // Scalar arithmetic done by hand:
    //   row 1: z = (0.5*0.2 + (-1)*(-0.3) + 0.1, 0.5*(-0.4) + (-1)*0.1 - 0.05)
    //            = (0.5, -0.35) -> relu (0.5, 0) -> 0.5*1.5 + 0.2 = 0.95
    //   row 2: z = (-0.7, 0.55) -> relu (0, 0.55) -> 0.55*(-0.5) + 0.2 = -0.075
    const Vector y = predict(p, x);
    CHECK(std::abs(y(0) - 0.95) < 1e-14);
    CHECK(std::abs(y(1) - (-0.075)) < 1e-14);

    // With explicit masks (inverted-dropout values for d = 0.5):
    DropoutMasks masks;
    masks.input.resize(2, 2);
    masks.input << 2.0, 0.0,
                   0.0, 2.0;
    masks.hidden.resize(2, 2);
    masks.hidden << 2.0, 0.0,
                    0.0, 2.0;
    //   row 1: x~ = (1, 0), z = (0.3, -0.45) -> h~ = (0.6, 0) -> 1.1
    //   row 2: x~ = (0, 4), z = (-1.1, 0.35) -> h~ = (0, 0.7) -> -0.15
    const Vector ym = forward(p, x, masks);
    CHECK(std::abs(ym(0) - 1.1) < 1e-14);
    CHECK(std::abs(ym(1) - (-0.15)) < 1e-14);
  }

  TEST_CASE("forward rejects shape mismatch and non-finite input") {
    const MLPConfig cfg = small_config(3, 2);
    const MLPParams p = init_params(cfg, 4);
    Matrix wrong = Matrix::Zero(2, 5);
    CHECK_THROWS_AS(predict(p, wrong), Error);
    Matrix bad = Matrix::Zero(2, 3);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    Rng rng(1);
    const DropoutMasks masks = sample_masks(cfg, 2, rng);
    CHECK_THROWS_AS(forward(p, bad, masks), Error);
  }

  TEST_CASE("loss degenerate cases") {
    const MLPConfig cfg = small_config(2, 3);
    MLPParams p = init_params(cfg, 6);
    Vector pred(3), target(3);
    pred << 1.0, 2.0, 3.0;
    target = pred;
    CHECK(loss(pred, target, p, 0.0) == 0.0);

    p.w1.setZero();
    p.w2.setZero();
    p.b1.setZero();
    p.b2 = 0.0;
    target << 0.0, 2.0, 4.0;
    // zero params: loss is the MSE alone even with weight decay
    const double mse = ((pred - target).squaredNorm()) / 3.0;
    CHECK(loss(pred, target, p, 0.7) == doctest::Approx(mse).epsilon(1e-15));
  }

  TEST_CASE("loss equals an independently re-summed objective") {
    const MLPConfig cfg = small_config(3, 4);
    const MLPParams p = random_params(cfg, 8);
    Rng rng(9);
    Vector pred(6), target(6);
    for (Index i = 0; i < 6; ++i) {
      pred(i) = rng.uniform(-2.0, 2.0);
      target(i) = rng.uniform(-2.0, 2.0);
    }
    const double lambda = 0.013;

    double expected = 0.0;
    for (Index i = 0; i < 6; ++i) {
      expected += (pred(i) - target(i)) * (pred(i) - target(i));
    }
    expected /= 6.0;
    double reg = 0.0;
    for (Index i = 0; i < p.w1.rows(); ++i)
      for (Index j = 0; j < p.w1.cols(); ++j) reg += p.w1(i, j) * p.w1(i, j);
    for (Index j = 0; j < p.w2.size(); ++j) reg += p.w2(j) * p.w2(j);
    for (Index j = 0; j < p.b1.size(); ++j) reg += p.b1(j) * p.b1(j);
    reg += p.b2 * p.b2;
    expected += lambda * reg;

    CHECK(std::abs(loss(pred, target, p, lambda) - expected) < 1e-12);
  }

  TEST_CASE("backward matches central finite differences on a 3-unit net") {
    const MLPConfig cfg = small_config(2, 3);
    const MLPParams p = random_params(cfg, 10);
    Matrix x = Matrix::Random(4, 2);
    Vector target = Vector::Random(4);
    Rng rng(11);
    MLPConfig masked = cfg;
    masked.dropout_rate = 0.4;
    const DropoutMasks masks = sample_masks(masked, 4, rng);
    const double lambda = 0.02;

    ForwardCache cache;
    forward(p, x, masks, &cache);
    const Gradients analytic = backward(p, cache, target, lambda);

    const Gradients numeric = numeric_gradients(p, [&](const MLPParams& q) {
      ForwardCache c;
      const Vector pred = forward(q, x, masks, &c);
      return loss(pred, target, q, lambda);
    });
    CHECK(max_gradient_error(analytic, numeric) < 1e-6);
  }

  TEST_CASE("gradient check over many random small networks") {
    for (std::uint64_t trial = 0; trial < 30; ++trial) {
      MLPConfig cfg = small_config(1 + static_cast<Index>(trial % 3),
                                   2 + static_cast<Index>(trial % 4));
      cfg.dropout_rate = (trial % 2) ? 0.3 : 0.0;
      const MLPParams p = random_params(cfg, 100 + trial);
      Rng rng(200 + trial);
      const Index batch = 3 + static_cast<Index>(trial % 3);
      Matrix x(batch, cfg.input_dim);
      Vector target(batch);
      for (Index i = 0; i < batch; ++i) {
        for (Index j = 0; j < cfg.input_dim; ++j) x(i, j) = rng.uniform(-1.5, 1.5);
        target(i) = rng.uniform(-1.5, 1.5);
      }
      const DropoutMasks masks = sample_masks(cfg, batch, rng);
      const double lambda = (trial % 5) * 0.01;

      ForwardCache cache;
      forward(p, x, masks, &cache);
      const Gradients analytic = backward(p, cache, target, lambda);
      const Gradients numeric = numeric_gradients(p, [&](const MLPParams& q) {
        return loss(forward(q, x, masks), target, q, lambda);
      });
      CHECK(max_gradient_error(analytic, numeric) < 1e-6);
    }
  }

  TEST_CASE("gradients vanish at a perfect fit and reduce to the decay term") {
    const MLPConfig cfg = small_config(2, 3);
    MLPParams p = random_params(cfg, 14);
    Matrix x = Matrix::Random(5, 2);
    const DropoutMasks masks = ones_masks(5, cfg);
    ForwardCache cache;
    const Vector pred = forward(p, x, masks, &cache);

    SUBCASE("perfect predictions, lambda = 0") {
      const Gradients g = backward(p, cache, pred, 0.0);
      CHECK(g.w1.cwiseAbs().maxCoeff() == 0.0);
      CHECK(g.b1.cwiseAbs().maxCoeff() == 0.0);
      CHECK(g.w2.cwiseAbs().maxCoeff() == 0.0);
      CHECK(g.b2 == 0.0);
    }
    SUBCASE("perfect predictions, lambda > 0 leaves 2 lambda theta") {
      const double lambda = 0.3;
      const Gradients g = backward(p, cache, pred, lambda);
      CHECK((g.w1 - 2.0 * lambda * p.w1).cwiseAbs().maxCoeff() < 1e-15);
      CHECK((g.w2 - 2.0 * lambda * p.w2).cwiseAbs().maxCoeff() < 1e-15);
    }
  }

  TEST_CASE("adam step behavior") {
    const MLPConfig cfg = small_config(2, 2);
    TrainConfig tc;
    tc.learning_rate = 1e-3;

    SUBCASE("zero gradients leave parameters unchanged") {
      MLPParams p = random_params(cfg, 15);
      const MLPParams before = p;
      AdamState state = AdamState::zeros_like(p);
      Gradients g = AdamState::zeros_like(p).m;
      adam_step(p, g, state, tc);
      CHECK(p.w1 == before.w1);
      CHECK(p.b1 == before.b1);
      CHECK(p.w2 == before.w2);
      CHECK(p.b2 == before.b2);
    }

    SUBCASE("first step moves each parameter by about -lr sign(g)") {
      MLPParams p = random_params(cfg, 16);
      const MLPParams before = p;
      AdamState state = AdamState::zeros_like(p);
      Gradients g = AdamState::zeros_like(p).m;
      g.w1 << 0.5, -0.25,
              1.5, -2.0;
      g.b2 = 0.75;
      adam_step(p, g, state, tc);
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
          const double step = p.w1(i, j) - before.w1(i, j);
          CHECK(std::abs(step + tc.learning_rate * (g.w1(i, j) > 0 ? 1.0 : -1.0)) <
                tc.learning_rate * 1e-6);
        }
      CHECK(std::abs((p.b2 - before.b2) + tc.learning_rate) < tc.learning_rate * 1e-6);
    }

    SUBCASE("optimizing w^2 shrinks |w| monotonically after warm-up") {
      MLPParams p;
      p.w1 = Matrix::Zero(1, 1);
      p.b1 = Vector::Zero(1);
      p.w2 = Vector::Zero(1);
      p.b2 = 1.0;
      AdamState state = AdamState::zeros_like(p);
      TrainConfig fast = tc;
      fast.learning_rate = 0.05;
      double previous = std::abs(p.b2);
      bool monotone = true;
      for (int step = 0; step < 100; ++step) {
        Gradients g = AdamState::zeros_like(p).m;
        g.b2 = 2.0 * p.b2;
        adam_step(p, g, state, fast);
        const double now = std::abs(p.b2);
        if (step >= 3 && previous > 0.2 && now >= previous) monotone = false;
        previous = now;
      }
      CHECK(monotone);
      CHECK(std::abs(p.b2) < 0.2);
    }
  }

  TEST_CASE("train with zero epochs returns the initialization") {
    const Dataset ds = make_toy_linear_dataset(32, 0.0, 21);
    MLPConfig cfg = small_config(2, 10);
    TrainConfig tc;
    tc.epochs = 0;
    tc.seed = 77;
    Standardizer s = fit_standardizer(ds, {0, 1, 2, 3, 4});
    const TrainedModel model = train(ds.features, ds.targets, cfg, tc, s);
    const MLPParams fresh = init_params(cfg, derive_seed(tc.seed, 0x1417));
    CHECK(model.params.w1 == fresh.w1);
    CHECK(model.params.b1 == fresh.b1);
    CHECK(model.params.w2 == fresh.w2);
    CHECK(model.params.b2 == fresh.b2);
  }

  TEST_CASE("training is deterministic in the seed") {
    const Dataset ds = make_toy_linear_dataset(48, 0.1, 22);
    IndexList all;
    for (Index i = 0; i < ds.n_rows(); ++i) all.push_back(i);
    const Standardizer s = fit_standardizer(ds, all);
    const auto [x, y] = apply_standardizer(s, ds.features, ds.targets);

    MLPConfig cfg = small_config(2, 16, 0.1);
    TrainConfig tc;
    tc.epochs = 25;
    tc.batch_size = 16;
    tc.seed = 99;
    const TrainedModel a = train(x, y, cfg, tc, s);
    const TrainedModel b = train(x, y, cfg, tc, s);
    CHECK(a.params.w1 == b.params.w1);
    CHECK(a.params.b1 == b.params.b1);
    CHECK(a.params.w2 == b.params.w2);
    CHECK(a.params.b2 == b.params.b2);
  }

  TEST_CASE("long training fits a noiseless linear map") {
    const Dataset ds = make_toy_linear_dataset(64, 0.0, 23);
    IndexList all;
    for (Index i = 0; i < ds.n_rows(); ++i) all.push_back(i);
    const Standardizer s = fit_standardizer(ds, all);
    const auto [x, y] = apply_standardizer(s, ds.features, ds.targets);

    MLPConfig cfg = small_config(2, 50, 0.01);
    cfg.weight_decay = weight_decay_for(cfg.lengthscale, cfg.dropout_rate, 64,
                                        1.0 / (s.target_std * s.target_std));
    TrainConfig tc;
    tc.epochs = 4000;
    tc.batch_size = 32;
    tc.seed = 5;

    const TrainedModel model = train(x, y, cfg, tc, s);
    const Vector pred = invert_targets(s, predict(model.params, x));
    const double err = std::sqrt((pred - ds.targets).squaredNorm() / 64.0);
    CHECK(err < 0.1);

    // The convergence-vs-budget premise at the smallest assertable level:
    TrainConfig short_tc = tc;
    short_tc.epochs = 40;
    const TrainedModel quick = train(x, y, cfg, short_tc, s);
    const double err_quick =
        std::sqrt((invert_targets(s, predict(quick.params, x)) - ds.targets).squaredNorm() /
                  64.0);
    CHECK(err < err_quick);
  }

  TEST_CASE("mask expectation keeps a relu-free probe unbiased") {
    // Large positive hidden bias keeps every pre-activation positive for all
    // masks, so the network is linear and E[stochastic output] must equal the
    // deterministic output.
    MLPConfig cfg = small_config(3, 4, 0.25);
    MLPParams p;
    p.w1 = Matrix::Random(3, 4) * 0.2;
    p.b1 = Vector::Constant(4, 10.0);
    p.w2 = Vector::Random(4);
    p.b2 = 0.3;

    Matrix x(1, 3);
    x << 0.4, -0.7, 0.9;
    const double deterministic = predict(p, x)(0);

    Rng rng(31);
    const int T = 20000;
    double sum = 0.0, sq = 0.0;
    for (int t = 0; t < T; ++t) {
      const DropoutMasks masks = sample_masks(cfg, 1, rng);
      const double v = forward(p, x, masks)(0);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / T;
    const double sd = std::sqrt((sq / T - mean * mean) / T);
    CHECK(std::abs(mean - deterministic) < 3.0 * sd);
  }

  TEST_CASE("diverging training reports the epoch") {
    const Dataset ds = make_toy_linear_dataset(64, 0.0, 24);
    IndexList all;
    for (Index i = 0; i < ds.n_rows(); ++i) all.push_back(i);
    const Standardizer s = fit_standardizer(ds, all);
    const auto [x, y] = apply_standardizer(s, ds.features, ds.targets);
    MLPConfig cfg = small_config(2, 8);
    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 32;
    tc.learning_rate = 1e120;
    CHECK_THROWS_WITH_AS(train(x, y, cfg, tc, s), doctest::Contains("non-finite loss"),
                         Error);
  }

  TEST_CASE("model save/load round trip") {
    TempDir tmp("model");
    const Dataset ds = make_toy_linear_dataset(32, 0.1, 25);
    IndexList all;
    for (Index i = 0; i < ds.n_rows(); ++i) all.push_back(i);
    const Standardizer s = fit_standardizer(ds, all);
    const auto [x, y] = apply_standardizer(s, ds.features, ds.targets);
    MLPConfig cfg = small_config(2, 6, 0.05);
    TrainConfig tc;
    tc.epochs = 10;
    tc.seed = 3;
    const TrainedModel model = train(x, y, cfg, tc, s);

    const auto file = tmp.path() / "m.model";
    save_model(model, file);
    const TrainedModel back = load_model(file);
    CHECK(back.params.w1 == model.params.w1);
    CHECK(back.params.b1 == model.params.b1);
    CHECK(back.params.w2 == model.params.w2);
    CHECK(back.params.b2 == model.params.b2);
    CHECK(back.standardizer.target_mean == model.standardizer.target_mean);
    CHECK(back.config.dropout_rate == model.config.dropout_rate);
  }
}
