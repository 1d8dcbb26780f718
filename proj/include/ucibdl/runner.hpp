#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ucibdl/dataset.hpp"
#include "ucibdl/hypersearch.hpp"
#include "ucibdl/mlp.hpp"
#include "ucibdl/types.hpp"

namespace ucibdl {

/// The three experiment settings: fixed 40-epoch budget with timing,
/// 4000 epochs with BO-tuned hyperparameters, and 4000 epochs with
/// grid-search tuning on a validation carve-out.
enum class Setting { timed, convergence, grid_tuned };

std::string to_string(Setting setting);
Setting setting_from_string(const std::string& name);

struct ProtocolConfig {
  Setting setting = Setting::timed;
  int epochs = 0;    // 0 -> setting default (40 timed, 4000 otherwise)
  int n_splits = 0;  // 0 -> dataset default (20; 5 for Protein Structure)
  double test_fraction = 0.1;
  double validation_fraction = 0.2;
  int mc_samples = 10000;        // T for final evaluation
  int search_mc_samples = 1000;  // T while scoring search candidates
  std::uint64_t master_seed = 1;
  int jobs = 0;  // worker pool width; 0 -> hardware concurrency
  SelectionCriterion criterion = SelectionCriterion::log_likelihood;
  MLPConfig mlp_base;    // hidden_units 0 -> dataset default (50; 100 Protein)
  TrainConfig train_base;
  SearchSpace space;  // empty fields resolved per dataset/split
  BOOptions bo;
  std::optional<HyperPair> timed_pair;  // override the timed-setting defaults
  bool use_fixed_splits = true;         // published split files take precedence
  std::optional<std::filesystem::path> save_models_dir;
};

struct SearchTraceEntry {
  HyperPair pair;
  Scalar val_rmse = 0.0;
  Scalar val_log_likelihood = 0.0;
  double train_seconds = 0.0;
};

struct SplitRecord {
  int split_index = 0;
  HyperPair pair;
  Scalar rmse = 0.0;
  Scalar log_likelihood = 0.0;
  double train_wall_time_seconds = 0.0;
  std::vector<SearchTraceEntry> search_trace;
};

struct Aggregates {
  Scalar rmse_mean = 0.0;
  Scalar rmse_se = 0.0;
  Scalar ll_mean = 0.0;
  Scalar ll_se = 0.0;
  double mean_train_seconds = 0.0;
};

struct ExperimentResult {
  std::string dataset;
  ProtocolConfig protocol;  // fully resolved (all defaults materialized)
  std::vector<SplitRecord> records;
  Aggregates aggregates;
};

/// Mean and standard error (sample std, n-1 denominator, divided by sqrt(n))
/// per metric; a single record reports SE = 0.
Aggregates aggregate(const std::vector<SplitRecord>& records);

/// Runs the full protocol over all splits on a bounded worker pool.
/// Per-split seeds derive from (master_seed, split_index), so results are
/// identical at any jobs value. A failed split aborts the experiment.
ExperimentResult run_experiment(const Dataset& dataset, const ProtocolConfig& protocol);

/// Timed-setting defaults: dropout 0.05 and tau from the dataset's published
/// tau grid file when present (median), else 1 / var(y_train).
HyperPair default_timed_pair(const std::optional<std::filesystem::path>& dataset_dir,
                             Scalar y_train_variance);

/// Fills empty grids/bounds from the dataset's published grid files when
/// present, else from the documented defaults.
SearchSpace resolve_search_space(const SearchSpace& overrides,
                                 const std::optional<std::filesystem::path>& dataset_dir,
                                 Scalar y_train_variance);

bool is_protein_structure(const std::string& dataset_name);
int default_n_splits(const std::string& dataset_name);
Index default_hidden_units(const std::string& dataset_name);
int default_epochs(Setting setting);

}  // namespace ucibdl
