#include "ucibdl/hypersearch.hpp"

#include <algorithm>
#include <cmath>

#include "ucibdl/inference.hpp"
#include "ucibdl/rng.hpp"

namespace ucibdl {

namespace {

// Sentinel for failed objective evaluations; large and negative so the
// incumbent never lands there, yet finite so the surrogate stays usable.
constexpr Scalar kFailedObjective = -1e6;

Scalar halton(std::uint64_t index, std::uint64_t base) {
  Scalar result = 0.0;
  Scalar f = 1.0;
  while (index > 0) {
    f /= static_cast<Scalar>(base);
    result += f * static_cast<Scalar>(index % base);
    index /= base;
  }
  return result;
}

bool better_pair(Scalar value_a, const HyperPair& a, Scalar value_b, const HyperPair& b) {
  if (value_a != value_b) return value_a > value_b;
  if (a.tau != b.tau) return a.tau > b.tau;
  return a.dropout < b.dropout;
}

HyperPair pair_from_unit(const SearchSpace& space, Scalar u_tau, Scalar u_dropout) {
  const Scalar log_lo = std::log(space.tau_bounds.first);
  const Scalar log_hi = std::log(space.tau_bounds.second);
  HyperPair pair;
  pair.tau = std::exp(log_lo + u_tau * (log_hi - log_lo));
  pair.dropout = space.dropout_bounds.first +
                 u_dropout * (space.dropout_bounds.second - space.dropout_bounds.first);
  return pair;
}

}  // namespace

Scalar criterion_value(const ValidationScore& score, SelectionCriterion criterion) {
  return criterion == SelectionCriterion::log_likelihood ? score.log_likelihood
                                                         : -score.rmse;
}

GridResult grid_search(const std::vector<Scalar>& tau_grid,
                       const std::vector<Scalar>& dropout_grid,
                       const PairObjective& objective, SelectionCriterion criterion) {
  require(!tau_grid.empty() && !dropout_grid.empty(), "grid_search: empty grid");
  for (Scalar tau : tau_grid) require(tau > 0.0, "grid_search: tau grid must be positive");
  for (Scalar d : dropout_grid)
    require(d >= 0.0 && d < 1.0, "grid_search: dropout grid must lie in [0,1)");

  GridResult result;
  result.table.reserve(tau_grid.size() * dropout_grid.size());
  for (Scalar tau : tau_grid) {
    for (Scalar dropout : dropout_grid) {
      const HyperPair pair{tau, dropout};
      ValidationScore score;
      try {
        score = objective(pair);
      } catch (const std::exception& e) {
        throw Error("grid_search: objective failed at tau=" + std::to_string(tau) +
                    " dropout=" + std::to_string(dropout) + ": " + e.what());
      }
      result.table.push_back(GridEntry{pair, score});
    }
  }

  const GridEntry* best = &result.table.front();
  for (const GridEntry& entry : result.table) {
    if (better_pair(criterion_value(entry.score, criterion), entry.pair,
                    criterion_value(best->score, criterion), best->pair)) {
      best = &entry;
    }
  }
  result.best = best->pair;
  return result;
}

GridResult grid_search(const Dataset& dataset, const Split& split, const SearchSpace& space,
                       const MLPConfig& mlp_base, const TrainConfig& train_base,
                       SelectionCriterion criterion, Scalar validation_fraction,
                       int mc_samples, std::uint64_t seed) {
  const PairObjective objective = make_validation_objective(
      dataset, split, validation_fraction, mlp_base, train_base, mc_samples, seed);
  return grid_search(space.tau_grid, space.dropout_grid, objective, criterion);
}

BOResult bo_search(const std::function<Scalar(const HyperPair&)>& objective,
                   const SearchSpace& space, const BOOptions& options, std::uint64_t seed) {
  require(options.n_init >= 2, "bo_search: n_init must be >= 2");
  require(options.n_iters >= 0, "bo_search: n_iters must be >= 0");
  require(options.n_candidates >= 1, "bo_search: n_candidates must be >= 1");
  require(space.tau_bounds.first > 0.0 && space.tau_bounds.second > space.tau_bounds.first,
          "bo_search: tau bounds must be positive and ordered");
  require(space.dropout_bounds.first >= 0.0 && space.dropout_bounds.second < 1.0 &&
              space.dropout_bounds.second >= space.dropout_bounds.first,
          "bo_search: dropout bounds must be ordered within [0,1)");

  Rng base(seed);
  Rng rotation_rng = base.stream(0);
  Rng candidate_rng = base.stream(1);
  const Scalar rot_tau = rotation_rng.uniform();
  const Scalar rot_dropout = rotation_rng.uniform();

  BOResult result;
  result.history.reserve(static_cast<std::size_t>(options.n_init + options.n_iters));

  auto evaluate_at = [&](Scalar u_tau, Scalar u_dropout) {
    BOObservation obs;
    obs.unit_tau = u_tau;
    obs.unit_dropout = u_dropout;
    obs.pair = pair_from_unit(space, u_tau, u_dropout);
    try {
      obs.value = objective(obs.pair);
      if (!std::isfinite(obs.value)) obs.value = kFailedObjective;
    } catch (const std::exception&) {
      obs.value = kFailedObjective;
    }
    result.history.push_back(obs);
  };

  for (int k = 0; k < options.n_init; ++k) {
    const Scalar u_tau = std::fmod(halton(static_cast<std::uint64_t>(k) + 1, 2) + rot_tau, 1.0);
    const Scalar u_dropout =
        std::fmod(halton(static_cast<std::uint64_t>(k) + 1, 3) + rot_dropout, 1.0);
    evaluate_at(u_tau, u_dropout);
  }

  for (int iter = 0; iter < options.n_iters; ++iter) {
    const auto n = static_cast<Index>(result.history.size());
    Matrix inputs(n, 2);
    Vector values(n);
    Scalar best_value = result.history.front().value;
    for (Index i = 0; i < n; ++i) {
      inputs(i, 0) = result.history[static_cast<std::size_t>(i)].unit_tau;
      inputs(i, 1) = result.history[static_cast<std::size_t>(i)].unit_dropout;
      values(i) = result.history[static_cast<std::size_t>(i)].value;
      best_value = std::max(best_value, values(i));
    }

    const GPSurrogate surrogate = GPSurrogate::fit(inputs, values, options.gp);
    Scalar best_ei = -1.0;
    Scalar pick_tau = 0.5, pick_dropout = 0.5;
    Vector query(2);
    for (int c = 0; c < options.n_candidates; ++c) {
      query(0) = candidate_rng.uniform();
      query(1) = candidate_rng.uniform();
      const auto post = surrogate.posterior(query);
      const Scalar ei = expected_improvement(post.mean, post.variance, best_value);
      if (ei > best_ei) {
        best_ei = ei;
        pick_tau = query(0);
        pick_dropout = query(1);
      }
    }
    evaluate_at(pick_tau, pick_dropout);
  }

  const BOObservation* incumbent = &result.history.front();
  for (const BOObservation& obs : result.history) {
    if (obs.value > incumbent->value) incumbent = &obs;
  }
  result.best = incumbent->pair;
  result.best_value = incumbent->value;
  return result;
}

PairObjective make_validation_objective(const Dataset& dataset, const Split& split,
                                        Scalar validation_fraction, const MLPConfig& mlp_base,
                                        const TrainConfig& train_base, int mc_samples,
                                        std::uint64_t seed) {
  const ValidationCarve carve =
      carve_validation(split, validation_fraction, derive_seed(seed, 0xca4e));

  const Standardizer standardizer = fit_standardizer(dataset, carve.train_sub);
  const Matrix x_train =
      standardize_features(standardizer, select_rows(dataset.features, carve.train_sub));
  const Vector y_train =
      standardize_targets(standardizer, select_rows(dataset.targets, carve.train_sub));
  const Matrix x_val_raw = select_rows(dataset.features, carve.validation);
  const Vector y_val = select_rows(dataset.targets, carve.validation);
  const Index n_train = static_cast<Index>(carve.train_sub.size());

  const std::uint64_t train_seed = derive_seed(seed, 0x7a11);
  const std::uint64_t eval_seed = derive_seed(seed, 0xe7a1);

  return [=, mlp = mlp_base, tc = train_base](const HyperPair& pair) -> ValidationScore {
    MLPConfig config = mlp;
    config.input_dim = x_train.cols();
    config.dropout_rate = pair.dropout;
    config.weight_decay =
        weight_decay_for(config.lengthscale, pair.dropout, n_train, pair.tau);
    TrainConfig train_config = tc;
    train_config.seed = train_seed;

    const TrainedModel model = train(x_train, y_train, config, train_config, standardizer);
    const PredictiveSamples samples = mc_predict(model, x_val_raw, mc_samples, eval_seed);
    ValidationScore score;
    score.rmse = rmse(samples, y_val);
    score.log_likelihood = predictive_log_likelihood(samples, y_val, pair.tau);
    score.train_seconds = model.train_wall_time_seconds;
    return score;
  };
}

std::vector<Scalar> log_spaced(Scalar lo, Scalar hi, int count) {
  require(lo > 0.0 && hi > lo, "log_spaced: need 0 < lo < hi");
  require(count >= 2, "log_spaced: need at least two points");
  std::vector<Scalar> values(static_cast<std::size_t>(count));
  const Scalar log_lo = std::log(lo);
  const Scalar step = (std::log(hi) - log_lo) / static_cast<Scalar>(count - 1);
  for (int i = 0; i < count; ++i) {
    values[static_cast<std::size_t>(i)] = std::exp(log_lo + step * static_cast<Scalar>(i));
  }
  return values;
}

std::vector<Scalar> default_dropout_grid() { return {0.005, 0.01, 0.05, 0.1}; }

std::vector<Scalar> default_tau_grid(Scalar y_train_variance) {
  require(y_train_variance > 0.0, "default_tau_grid: target variance must be positive");
  return log_spaced(0.1 / y_train_variance, 10.0 / y_train_variance, 10);
}

}  // namespace ucibdl
