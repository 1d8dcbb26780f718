#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ucibdl/dataset.hpp"
#include "ucibdl/gp.hpp"
#include "ucibdl/mlp.hpp"
#include "ucibdl/types.hpp"

namespace ucibdl {

/// Candidate ranges for the (tau, d) search. Grids drive grid_search;
/// bounds drive bo_search (tau is searched in log space).
struct SearchSpace {
  std::vector<Scalar> tau_grid;
  std::vector<Scalar> dropout_grid;
  std::pair<Scalar, Scalar> tau_bounds{0.0, 0.0};
  std::pair<Scalar, Scalar> dropout_bounds{0.0, 0.0};
};

enum class SelectionCriterion { log_likelihood, rmse };

struct ValidationScore {
  Scalar rmse = 0.0;
  Scalar log_likelihood = 0.0;
  double train_seconds = 0.0;
};

/// Trains a model at a candidate pair and scores it on a validation set.
using PairObjective = std::function<ValidationScore(const HyperPair&)>;

struct GridEntry {
  HyperPair pair;
  ValidationScore score;
};

struct GridResult {
  HyperPair best;
  std::vector<GridEntry> table;
};

struct BOOptions {
  int n_init = 5;
  int n_iters = 20;
  int n_candidates = 2048;
  GPConfig gp;
};

struct BOObservation {
  HyperPair pair;
  Scalar unit_tau = 0.0;      // candidate position in the unit box
  Scalar unit_dropout = 0.0;
  Scalar value = 0.0;         // objective value (higher is better)
};

struct BOResult {
  HyperPair best;
  Scalar best_value = 0.0;
  std::vector<BOObservation> history;
};

/// Criterion value for ranking candidates; always maximized.
Scalar criterion_value(const ValidationScore& score, SelectionCriterion criterion);

/// Evaluates every (tau, d) pair of the grids and returns the argmax of the
/// criterion, ties broken by larger tau then smaller dropout.
GridResult grid_search(const std::vector<Scalar>& tau_grid,
                       const std::vector<Scalar>& dropout_grid,
                       const PairObjective& objective, SelectionCriterion criterion);

/// Convenience overload that builds the validation objective from a dataset
/// split (20% carve-out by default elsewhere).
GridResult grid_search(const Dataset& dataset, const Split& split, const SearchSpace& space,
                       const MLPConfig& mlp_base, const TrainConfig& train_base,
                       SelectionCriterion criterion, Scalar validation_fraction,
                       int mc_samples, std::uint64_t seed);

/// n_init quasi-random evaluations (Halton with a seeded rotation), then
/// n_iters rounds of GP fit + EI maximization over uniformly sampled
/// candidates. Objective failures are recorded as large negative values and
/// the search continues.
BOResult bo_search(const std::function<Scalar(const HyperPair&)>& objective,
                   const SearchSpace& space, const BOOptions& options, std::uint64_t seed);

/// Carves a validation subset from the split's train indices, standardizes on
/// the remaining rows and returns an objective that trains at a candidate
/// pair and scores MC predictions on the validation rows (original units).
PairObjective make_validation_objective(const Dataset& dataset, const Split& split,
                                        Scalar validation_fraction, const MLPConfig& mlp_base,
                                        const TrainConfig& train_base, int mc_samples,
                                        std::uint64_t seed);

std::vector<Scalar> log_spaced(Scalar lo, Scalar hi, int count);
std::vector<Scalar> default_dropout_grid();
/// 10 log-spaced tau values spanning [0.1, 10] / var(y_train).
std::vector<Scalar> default_tau_grid(Scalar y_train_variance);

}  // namespace ucibdl
