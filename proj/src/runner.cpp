#include "ucibdl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ucibdl/inference.hpp"
#include "ucibdl/rng.hpp"

namespace ucibdl {

namespace {

namespace fs = std::filesystem;

// Substream ids for per-split seed derivation.
constexpr std::uint64_t kSplitGenStream = 0xa11d;
constexpr std::uint64_t kSearchStream = 0x5e;
constexpr std::uint64_t kFinalTrainStream = 0xf1;
constexpr std::uint64_t kEvalStream = 0xe7;

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Scalar median(std::vector<Scalar> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SplitRecord run_split(const Dataset& dataset, const ProtocolConfig& pc, const Split& split,
                      int split_index) {
  const std::uint64_t split_seed = derive_seed(pc.master_seed, static_cast<std::uint64_t>(split_index));

  const Standardizer standardizer = fit_standardizer(dataset, split.train_indices);
  const Scalar y_train_variance = standardizer.target_std * standardizer.target_std;
  const std::optional<fs::path> dataset_dir =
      dataset.source_path.empty() ? std::nullopt
                                  : std::optional<fs::path>(dataset.source_path);

  SplitRecord record;
  record.split_index = split_index;

  switch (pc.setting) {
    case Setting::timed: {
      record.pair = pc.timed_pair ? *pc.timed_pair
                                  : default_timed_pair(dataset_dir, y_train_variance);
      break;
    }
    case Setting::convergence: {
      const SearchSpace space = resolve_search_space(pc.space, dataset_dir, y_train_variance);
      const PairObjective scorer =
          make_validation_objective(dataset, split, pc.validation_fraction, pc.mlp_base,
                                    pc.train_base, pc.search_mc_samples,
                                    derive_seed(split_seed, kSearchStream));
      auto objective = [&](const HyperPair& pair) -> Scalar {
        const ValidationScore score = scorer(pair);
        record.search_trace.push_back(
            SearchTraceEntry{pair, score.rmse, score.log_likelihood, score.train_seconds});
        return criterion_value(score, pc.criterion);
      };
      const BOResult bo =
          bo_search(objective, space, pc.bo, derive_seed(split_seed, kSearchStream + 1));
      record.pair = bo.best;
      break;
    }
    case Setting::grid_tuned: {
      const SearchSpace space = resolve_search_space(pc.space, dataset_dir, y_train_variance);
      const GridResult grid = grid_search(
          dataset, split, space, pc.mlp_base, pc.train_base, pc.criterion,
          pc.validation_fraction, pc.search_mc_samples, derive_seed(split_seed, kSearchStream));
      record.pair = grid.best;
      for (const GridEntry& entry : grid.table) {
        record.search_trace.push_back(SearchTraceEntry{
            entry.pair, entry.score.rmse, entry.score.log_likelihood,
            entry.score.train_seconds});
      }
      break;
    }
  }

  // Final model on the full training set with the chosen pair.
  const Matrix x_train =
      standardize_features(standardizer, select_rows(dataset.features, split.train_indices));
  const Vector y_train =
      standardize_targets(standardizer, select_rows(dataset.targets, split.train_indices));

  MLPConfig config = pc.mlp_base;
  config.input_dim = dataset.n_features();
  config.dropout_rate = record.pair.dropout;
  config.weight_decay =
      weight_decay_for(config.lengthscale, record.pair.dropout,
                       static_cast<Index>(split.train_indices.size()), record.pair.tau);
  TrainConfig train_config = pc.train_base;
  train_config.epochs = pc.epochs;
  train_config.seed = derive_seed(split_seed, kFinalTrainStream);

  const TrainedModel model = train(x_train, y_train, config, train_config, standardizer);

  const Matrix x_test_raw = select_rows(dataset.features, split.test_indices);
  const Vector y_test = select_rows(dataset.targets, split.test_indices);
  const PredictiveSamples samples =
      mc_predict(model, x_test_raw, pc.mc_samples, derive_seed(split_seed, kEvalStream));
  record.rmse = rmse(samples, y_test);
  record.log_likelihood = predictive_log_likelihood(samples, y_test, record.pair.tau);
  record.train_wall_time_seconds = model.train_wall_time_seconds;

  if (pc.save_models_dir) {
    fs::create_directories(*pc.save_models_dir);
    save_model(model, *pc.save_models_dir /
                          (dataset.name + "_" + to_string(pc.setting) + "_split" +
                           std::to_string(split_index) + ".model"));
  }
  return record;
}

}  // namespace

std::string to_string(Setting setting) {
  switch (setting) {
    case Setting::timed: return "timed";
    case Setting::convergence: return "convergence";
    case Setting::grid_tuned: return "grid";
  }
  throw Error("unknown setting");
}

Setting setting_from_string(const std::string& name) {
  if (name == "timed") return Setting::timed;
  if (name == "convergence") return Setting::convergence;
  if (name == "grid" || name == "grid_tuned" || name == "grid-tuned") return Setting::grid_tuned;
  throw Error("unknown setting '" + name + "' (expected timed|convergence|grid)");
}

bool is_protein_structure(const std::string& dataset_name) {
  return lowercase(dataset_name).find("protein") != std::string::npos;
}

int default_n_splits(const std::string& dataset_name) {
  return is_protein_structure(dataset_name) ? 5 : 20;
}

Index default_hidden_units(const std::string& dataset_name) {
  return is_protein_structure(dataset_name) ? 100 : 50;
}

int default_epochs(Setting setting) { return setting == Setting::timed ? 40 : 4000; }

HyperPair default_timed_pair(const std::optional<fs::path>& dataset_dir,
                             Scalar y_train_variance) {
  HyperPair pair;
  pair.dropout = 0.05;
  pair.tau = 1.0 / y_train_variance;
  if (dataset_dir) {
    if (const auto taus = load_value_file(*dataset_dir / "data" / "tau_values.txt")) {
      pair.tau = median(*taus);
    }
  }
  return pair;
}

SearchSpace resolve_search_space(const SearchSpace& overrides,
                                 const std::optional<fs::path>& dataset_dir,
                                 Scalar y_train_variance) {
  SearchSpace space = overrides;
  if (space.tau_grid.empty()) {
    std::optional<std::vector<Scalar>> published;
    if (dataset_dir) published = load_value_file(*dataset_dir / "data" / "tau_values.txt");
    space.tau_grid = published ? *published : default_tau_grid(y_train_variance);
  }
  if (space.dropout_grid.empty()) {
    std::optional<std::vector<Scalar>> published;
    if (dataset_dir) published = load_value_file(*dataset_dir / "data" / "dropout_rates.txt");
    space.dropout_grid = published ? *published : default_dropout_grid();
  }
  if (!(space.tau_bounds.second > space.tau_bounds.first) || space.tau_bounds.first <= 0.0) {
    const auto [lo, hi] =
        std::minmax_element(space.tau_grid.begin(), space.tau_grid.end());
    space.tau_bounds = {*lo, *hi};
    if (!(space.tau_bounds.second > space.tau_bounds.first)) {
      space.tau_bounds = {0.5 * *lo, 2.0 * *hi};
    }
  }
  if (!(space.dropout_bounds.second > space.dropout_bounds.first)) {
    const auto [lo, hi] =
        std::minmax_element(space.dropout_grid.begin(), space.dropout_grid.end());
    space.dropout_bounds = {*lo, *hi};
  }
  return space;
}

Aggregates aggregate(const std::vector<SplitRecord>& records) {
  require(!records.empty(), "aggregate: no records");
  const auto n = static_cast<Scalar>(records.size());

  auto mean_se = [&](auto field) -> std::pair<Scalar, Scalar> {
    Scalar mean = 0.0;
    for (const auto& r : records) mean += field(r);
    mean /= n;
    if (records.size() == 1) return {mean, 0.0};
    Scalar ss = 0.0;
    for (const auto& r : records) ss += (field(r) - mean) * (field(r) - mean);
    const Scalar sample_std = std::sqrt(ss / (n - 1.0));
    return {mean, sample_std / std::sqrt(n)};
  };

  Aggregates agg;
  std::tie(agg.rmse_mean, agg.rmse_se) = mean_se([](const SplitRecord& r) { return r.rmse; });
  std::tie(agg.ll_mean, agg.ll_se) =
      mean_se([](const SplitRecord& r) { return r.log_likelihood; });
  agg.mean_train_seconds =
      mean_se([](const SplitRecord& r) { return r.train_wall_time_seconds; }).first;
  return agg;
}

ExperimentResult run_experiment(const Dataset& dataset, const ProtocolConfig& protocol) {
  ProtocolConfig pc = protocol;
  if (pc.epochs <= 0) pc.epochs = default_epochs(pc.setting);
  if (pc.n_splits <= 0) pc.n_splits = default_n_splits(dataset.name);
  if (pc.mlp_base.hidden_units <= 0) pc.mlp_base.hidden_units = default_hidden_units(dataset.name);
  pc.mlp_base.input_dim = dataset.n_features();
  require(pc.mc_samples >= 1, "mc_samples must be >= 1");
  require(pc.search_mc_samples >= 1, "search_mc_samples must be >= 1");

  std::vector<Split> splits;
  if (pc.use_fixed_splits && !dataset.source_path.empty() &&
      has_fixed_splits(dataset.source_path)) {
    splits = load_fixed_splits(dataset, dataset.source_path);
    if (static_cast<int>(splits.size()) > pc.n_splits) {
      splits.resize(static_cast<std::size_t>(pc.n_splits));
    }
  } else {
    splits = generate_splits(dataset, pc.n_splits, pc.test_fraction,
                             derive_seed(pc.master_seed, kSplitGenStream));
  }
  pc.n_splits = static_cast<int>(splits.size());

  const auto n = splits.size();
  std::vector<SplitRecord> records(n);
  std::vector<std::string> failures(n);
  std::atomic<std::size_t> next{0};

  int jobs = pc.jobs > 0 ? pc.jobs : static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(
      static_cast<std::size_t>(jobs), n));

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        records[i] = run_split(dataset, pc, splits[i], static_cast<int>(i));
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i].empty()) {
      throw Error(dataset.name + ": split " + std::to_string(i) + " failed: " + failures[i]);
    }
  }

  ExperimentResult result;
  result.dataset = dataset.name;
  result.protocol = pc;
  result.records = std::move(records);
  result.aggregates = aggregate(result.records);
  return result;
}

}  // namespace ucibdl
