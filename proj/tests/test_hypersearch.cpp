#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "ucibdl/hypersearch.hpp"

using namespace ucibdl;
using namespace ucibdl::testing;

namespace {

// Re-scan of a grid table, written independently of the library's selection.
HyperPair rescan_argmax(const std::vector<GridEntry>& table, SelectionCriterion criterion) {
  const GridEntry* best = nullptr;
  for (const auto& entry : table) {
    const double value = criterion == SelectionCriterion::log_likelihood
                             ? entry.score.log_likelihood
                             : -entry.score.rmse;
    if (best == nullptr) {
      best = &entry;
      continue;
    }
    const double best_value = criterion == SelectionCriterion::log_likelihood
                                  ? best->score.log_likelihood
                                  : -best->score.rmse;
    if (value > best_value ||
        (value == best_value && (entry.pair.tau > best->pair.tau ||
                                 (entry.pair.tau == best->pair.tau &&
                                  entry.pair.dropout < best->pair.dropout)))) {
      best = &entry;
    }
  }
  return best->pair;
}

SearchSpace unit_box_space() {
  SearchSpace space;
  space.tau_bounds = {1.0, std::exp(1.0)};  // log tau spans [0, 1]
  space.dropout_bounds = {0.0, 0.9};
  return space;
}

// Recovers unit-box coordinates from a pair produced under unit_box_space().
std::pair<double, double> to_unit(const HyperPair& pair) {
  return {std::log(pair.tau), pair.dropout / 0.9};
}

}  // namespace

TEST_SUITE("hypersearch") {
  TEST_CASE("grid_search with a single pair returns it") {
    const auto objective = [](const HyperPair&) {
      return ValidationScore{1.0, -1.0, 0.0};
    };
    const GridResult result = grid_search({2.5}, {0.05}, objective,
                                          SelectionCriterion::log_likelihood);
    CHECK(result.best.tau == 2.5);
    CHECK(result.best.dropout == 0.05);
    CHECK(result.table.size() == 1);
  }

  TEST_CASE("grid_search argmax equals an independent re-scan") {
    const auto objective = [](const HyperPair& pair) {
      // A deterministic but non-monotonic surface.
      const double ll = -std::pow(std::log(pair.tau) - 0.3, 2.0) -
                        2.0 * std::pow(pair.dropout - 0.07, 2.0) +
                        0.05 * std::sin(13.0 * pair.tau);
      return ValidationScore{1.0 - ll, ll, 0.0};
    };
    for (const auto criterion :
         {SelectionCriterion::log_likelihood, SelectionCriterion::rmse}) {
      const GridResult result =
          grid_search({0.5, 1.9}, {0.01, 0.1}, objective, criterion);
      CHECK(result.table.size() == 4);
      const HyperPair expected = rescan_argmax(result.table, criterion);
      CHECK(result.best.tau == expected.tau);
      CHECK(result.best.dropout == expected.dropout);
    }
  }

  TEST_CASE("grid_search ties break toward larger tau then smaller dropout") {
    const auto constant = [](const HyperPair&) {
      return ValidationScore{1.0, -1.0, 0.0};
    };
    const GridResult result = grid_search({0.5, 2.0}, {0.1, 0.01}, constant,
                                          SelectionCriterion::log_likelihood);
    CHECK(result.best.tau == 2.0);
    CHECK(result.best.dropout == 0.01);
  }

  TEST_CASE("grid_search rejects empty and invalid grids") {
    const auto objective = [](const HyperPair&) {
      return ValidationScore{0.0, 0.0, 0.0};
    };
    CHECK_THROWS_AS(grid_search({}, {0.05}, objective, SelectionCriterion::rmse), Error);
    CHECK_THROWS_AS(grid_search({1.0}, {}, objective, SelectionCriterion::rmse), Error);
    CHECK_THROWS_AS(grid_search({-1.0}, {0.0}, objective, SelectionCriterion::rmse), Error);
  }

  TEST_CASE("grid_search surfaces objective failures with the pair identity") {
    const auto failing = [](const HyperPair& pair) -> ValidationScore {
      if (pair.dropout > 0.05) throw Error("boom");
      return ValidationScore{1.0, -1.0, 0.0};
    };
    CHECK_THROWS_WITH_AS(
        grid_search({1.0}, {0.01, 0.1}, failing, SelectionCriterion::log_likelihood),
        doctest::Contains("dropout=0.1"), Error);
  }

  TEST_CASE("bo_search on a constant objective keeps the first point") {
    const auto constant = [](const HyperPair&) { return 3.25; };
    BOOptions options;
    options.n_init = 4;
    options.n_iters = 3;
    const BOResult result = bo_search(constant, unit_box_space(), options, 5);
    CHECK(result.history.size() == 7);
    CHECK(result.best_value == 3.25);
    CHECK(result.best.tau == result.history.front().pair.tau);
    CHECK(result.best.dropout == result.history.front().pair.dropout);
  }

  TEST_CASE("bo_search with zero iterations returns the best initial point") {
    const auto objective = [](const HyperPair& pair) { return -pair.dropout; };
    BOOptions options;
    options.n_init = 6;
    options.n_iters = 0;
    const BOResult result = bo_search(objective, unit_box_space(), options, 7);
    CHECK(result.history.size() == 6);
    double best = -1e300;
    for (const auto& obs : result.history) best = std::max(best, obs.value);
    CHECK(result.best_value == best);
  }

  TEST_CASE("bo_search locates a concave quadratic optimum within 0.1") {
    const auto objective = [](const HyperPair& pair) {
      const auto [u0, u1] = to_unit(pair);
      return -std::pow(u0 - 0.3, 2.0) - std::pow(u1 - 0.7, 2.0);
    };
    BOOptions options;  // defaults: 5 init + 20 iterations
    const BOResult result = bo_search(objective, unit_box_space(), options, 11);
    const auto [u0, u1] = to_unit(result.best);
    CHECK(std::abs(u0 - 0.3) < 0.1);
    CHECK(std::abs(u1 - 0.7) < 0.1);
  }

  TEST_CASE("bo_search incumbent objective is non-decreasing over history") {
    const auto objective = [](const HyperPair& pair) {
      const auto [u0, u1] = to_unit(pair);
      return std::sin(5.0 * u0) + std::cos(3.0 * u1);
    };
    BOOptions options;
    options.n_init = 5;
    options.n_iters = 10;
    const BOResult result = bo_search(objective, unit_box_space(), options, 13);
    double incumbent = -1e300;
    std::vector<double> trajectory;
    for (const auto& obs : result.history) {
      incumbent = std::max(incumbent, obs.value);
      trajectory.push_back(incumbent);
    }
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
      CHECK(trajectory[i] >= trajectory[i - 1]);
    }
    CHECK(result.best_value == incumbent);
  }

  TEST_CASE("bo_search records objective failures and continues") {
    int calls = 0;
    const auto flaky = [&calls](const HyperPair& pair) -> double {
      ++calls;
      if (calls % 2 == 1) throw Error("unstable");
      const auto [u0, u1] = to_unit(pair);
      return -(u0 * u0 + u1 * u1);
    };
    BOOptions options;
    options.n_init = 4;
    options.n_iters = 4;
    const BOResult result = bo_search(flaky, unit_box_space(), options, 17);
    CHECK(result.history.size() == 8);
    int failures = 0;
    for (const auto& obs : result.history) failures += obs.value == -1e6;
    CHECK(failures == 4);
    CHECK(result.best_value > -1e6);
  }

  TEST_CASE("bo_search is deterministic in the seed") {
    const auto objective = [](const HyperPair& pair) {
      const auto [u0, u1] = to_unit(pair);
      return -std::abs(u0 - 0.4) - std::abs(u1 - 0.2);
    };
    BOOptions options;
    options.n_init = 3;
    options.n_iters = 5;
    const BOResult a = bo_search(objective, unit_box_space(), options, 23);
    const BOResult b = bo_search(objective, unit_box_space(), options, 23);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      CHECK(a.history[i].pair.tau == b.history[i].pair.tau);
      CHECK(a.history[i].pair.dropout == b.history[i].pair.dropout);
      CHECK(a.history[i].value == b.history[i].value);
    }
  }

  TEST_CASE("bo_search validates its budget and bounds") {
    const auto objective = [](const HyperPair&) { return 0.0; };
    BOOptions options;
    options.n_init = 1;
    CHECK_THROWS_AS(bo_search(objective, unit_box_space(), options, 1), Error);
    options.n_init = 2;
    SearchSpace bad = unit_box_space();
    bad.tau_bounds = {2.0, 1.0};
    CHECK_THROWS_AS(bo_search(objective, bad, options, 1), Error);
  }

  TEST_CASE("validation objective trains and scores a candidate") {
    const Dataset ds = make_toy_linear_dataset(60, 0.1, 31);
    Split split;
    for (Index i = 0; i < 50; ++i) split.train_indices.push_back(i);
    for (Index i = 50; i < 60; ++i) split.test_indices.push_back(i);

    MLPConfig mlp;
    mlp.hidden_units = 10;
    TrainConfig tc;
    tc.epochs = 40;
    tc.batch_size = 16;

    const PairObjective objective =
        make_validation_objective(ds, split, 0.2, mlp, tc, 50, 41);
    const HyperPair pair{1.0, 0.05};
    const ValidationScore a = objective(pair);
    const ValidationScore b = objective(pair);
    CHECK(std::isfinite(a.rmse));
    CHECK(std::isfinite(a.log_likelihood));
    CHECK(a.rmse == b.rmse);  // pure function of (inputs, seed)
    CHECK(a.log_likelihood == b.log_likelihood);
    CHECK(a.rmse < 2.0);      // toy target spans roughly [-3, 3]
  }

  TEST_CASE("dataset-level grid search returns a grid member deterministically") {
    const Dataset ds = make_toy_linear_dataset(60, 0.1, 37);
    Split split;
    for (Index i = 0; i < 50; ++i) split.train_indices.push_back(i);
    for (Index i = 50; i < 60; ++i) split.test_indices.push_back(i);

    SearchSpace space;
    space.tau_grid = {0.5, 5.0};
    space.dropout_grid = {0.01, 0.1};
    MLPConfig mlp;
    mlp.hidden_units = 8;
    TrainConfig tc;
    tc.epochs = 30;
    tc.batch_size = 16;

    const GridResult a = grid_search(ds, split, space, mlp, tc,
                                     SelectionCriterion::log_likelihood, 0.2, 40, 51);
    CHECK(a.table.size() == 4);
    const bool tau_in_grid = a.best.tau == 0.5 || a.best.tau == 5.0;
    const bool d_in_grid = a.best.dropout == 0.01 || a.best.dropout == 0.1;
    CHECK(tau_in_grid);
    CHECK(d_in_grid);
    const HyperPair expected = rescan_argmax(a.table, SelectionCriterion::log_likelihood);
    CHECK(a.best.tau == expected.tau);
    CHECK(a.best.dropout == expected.dropout);

    const GridResult b = grid_search(ds, split, space, mlp, tc,
                                     SelectionCriterion::log_likelihood, 0.2, 40, 51);
    for (std::size_t i = 0; i < a.table.size(); ++i) {
      CHECK(a.table[i].score.log_likelihood == b.table[i].score.log_likelihood);
    }
  }

  TEST_CASE("log_spaced grids and defaults") {
    const auto grid = log_spaced(0.1, 10.0, 5);
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == doctest::Approx(0.1));
    CHECK(grid.back() == doctest::Approx(10.0));
    CHECK(grid[2] == doctest::Approx(1.0));

    CHECK(default_dropout_grid() == std::vector<Scalar>{0.005, 0.01, 0.05, 0.1});
    const auto taus = default_tau_grid(4.0);
    REQUIRE(taus.size() == 10);
    CHECK(taus.front() == doctest::Approx(0.1 / 4.0));
    CHECK(taus.back() == doctest::Approx(10.0 / 4.0));
  }
}
