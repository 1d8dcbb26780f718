#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ucibdl/dataset.hpp"
#include "ucibdl/report.hpp"
#include "ucibdl/results_io.hpp"
#include "ucibdl/runner.hpp"

namespace fs = std::filesystem;
using namespace ucibdl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitComparisonFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string data_dir = "data";
  int jobs = 0;
};

std::vector<std::string> list_dataset_names(const fs::path& data_dir) {
  require(fs::exists(data_dir), "data directory not found: " + data_dir.string());
  require(fs::is_directory(data_dir), "not a directory: " + data_dir.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    if (!entry.is_directory()) continue;
    if (fs::exists(entry.path() / "data" / "data.txt")) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

// Known benchmark datasets: friendly alias -> published directory name.
const std::vector<std::pair<std::string, std::string>>& known_datasets() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"boston", "bostonHousing"},
      {"concrete", "concrete"},
      {"energy", "energy"},
      {"kin8nm", "kin8nm"},
      {"naval", "naval-propulsion-plant"},
      {"power", "power-plant"},
      {"protein", "protein-tertiary-structure"},
      {"wine", "wine-quality-red"},
      {"yacht", "yacht"},
  };
  return table;
}

/// Resolves a user-supplied dataset name to a directory under data_dir.
/// Tries the literal directory first, then the known-dataset aliases.
std::string resolve_dataset_dir_name(const fs::path& data_dir, const std::string& name) {
  if (fs::exists(data_dir / name / "data" / "data.txt")) return name;
  const std::string wanted = canonical_dataset_name(name);
  if (fs::exists(data_dir)) {
    for (const auto& entry : fs::directory_iterator(data_dir)) {
      if (!entry.is_directory()) continue;
      const std::string candidate = entry.path().filename().string();
      if (canonical_dataset_name(candidate) == wanted &&
          fs::exists(entry.path() / "data" / "data.txt")) {
        return candidate;
      }
    }
  }
  throw Error("dataset '" + name + "' not found under " + data_dir.string());
}

int cmd_data_list(const CommonOptions& common) {
  for (const auto& name : list_dataset_names(common.data_dir)) {
    const Dataset ds = load_dataset(common.data_dir, name);
    std::cout << name << "  rows=" << ds.n_rows() << "  features=" << ds.n_features();
    const fs::path dir = fs::path(common.data_dir) / name;
    if (has_fixed_splits(dir)) {
      std::cout << "  fixed-splits=" << load_fixed_splits(ds, dir).size();
    }
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_data_inspect(const CommonOptions& common, const std::string& name) {
  const std::string dir_name = resolve_dataset_dir_name(common.data_dir, name);
  const Dataset ds = load_dataset(common.data_dir, dir_name);
  std::cout << "name: " << ds.name << "\n"
            << "rows: " << ds.n_rows() << "\n"
            << "features: " << ds.n_features() << "\n"
            << "source: " << ds.source_path << "\n"
            << "target mean: " << ds.targets.mean() << "\n";
  const fs::path dir = fs::path(common.data_dir) / dir_name;
  if (has_fixed_splits(dir)) {
    std::cout << "fixed splits: " << load_fixed_splits(ds, dir).size() << "\n";
  }
  if (const auto taus = load_value_file(dir / "data" / "tau_values.txt")) {
    std::cout << "published tau grid:";
    for (double t : *taus) std::cout << " " << t;
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_data_fetch_instructions() {
  std::cout <<
      "No command performs network access; fetch the benchmark data manually.\n"
      "\n"
      "The expected layout under the data directory (see --data-dir or\n"
      "UCI_BDL_DATA_DIR) is, per dataset:\n"
      "  <name>/data/data.txt             whitespace-delimited numeric table\n"
      "  <name>/data/index_features.txt   0-based feature column indices, one per line\n"
      "  <name>/data/index_target.txt     0-based target column index\n"
      "  <name>/data/n_splits.txt         optional: published split count\n"
      "  <name>/data/index_train_<k>.txt  optional: published train rows\n"
      "  <name>/data/index_test_<k>.txt   optional: published test rows\n"
      "  <name>/data/tau_values.txt       optional: published tau grid\n"
      "  <name>/data/dropout_rates.txt    optional: published dropout grid\n"
      "\n"
      "All nine benchmark datasets are published in exactly this layout at:\n"
      "  https://github.com/yaringal/DropoutUncertaintyExps (UCI_Datasets/)\n"
      "\n"
      "One-shot fetch:\n"
      "  git clone --depth 1 https://github.com/yaringal/DropoutUncertaintyExps /tmp/uci\n"
      "  cp -r /tmp/uci/UCI_Datasets/* <data-dir>/\n"
      "\n"
      "Directory names used there: bostonHousing, concrete, energy, kin8nm,\n"
      "naval-propulsion-plant, power-plant, protein-tertiary-structure,\n"
      "wine-quality-red, yacht.\n"
      "\n"
      "The raw tables originate from the UCI Machine Learning Repository:\n"
      "  https://archive.ics.uci.edu/\n";
  return kExitOk;
}

void print_aggregate_row(const ExperimentResult& result) {
  const auto& a = result.aggregates;
  std::cout << result.dataset << " [" << to_string(result.protocol.setting)
            << "]: RMSE " << format_cell(a.rmse_mean, a.rmse_se) << " | LL "
            << format_cell(a.ll_mean, a.ll_se) << " | mean train time "
            << a.mean_train_seconds << " s\n";
}

void write_run_outputs(const ExperimentResult& result, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::string stem = result_file_stem(result);
  write_results(result, out_dir / (stem + ".results"));
  std::ofstream csv(out_dir / (stem + ".csv"));
  csv << results_to_csv(result);

  if (result.protocol.setting != Setting::timed) {
    std::ofstream taus(out_dir / (stem + ".best_tau.txt"));
    std::ofstream dropouts(out_dir / (stem + ".best_dropout.txt"));
    taus.precision(17);
    dropouts.precision(17);
    for (const auto& r : result.records) {
      taus << r.pair.tau << "\n";
      dropouts << r.pair.dropout << "\n";
    }
  }
  std::cout << "wrote " << (out_dir / (stem + ".results")).string() << "\n";
}

struct RunFlags {
  std::string dataset;
  std::string setting = "timed";
  int epochs = 0;
  int splits = 0;
  int mc_samples = 10000;
  int search_mc_samples = 1000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string criterion = "ll";
  std::string save_models;
  int hidden = 0;
  int batch_size = 128;
  double learning_rate = 1e-3;
  double timed_tau = 0.0;
  double timed_dropout = -1.0;
  bool no_fixed_splits = false;
};

ProtocolConfig protocol_from_flags(const RunFlags& flags, const CommonOptions& common) {
  ProtocolConfig pc;
  pc.setting = setting_from_string(flags.setting);
  pc.epochs = flags.epochs;
  pc.n_splits = flags.splits;
  pc.mc_samples = flags.mc_samples;
  pc.search_mc_samples = flags.search_mc_samples;
  pc.master_seed = flags.seed;
  pc.jobs = common.jobs;
  pc.criterion = flags.criterion == "rmse" ? SelectionCriterion::rmse
                                           : SelectionCriterion::log_likelihood;
  pc.mlp_base.hidden_units = flags.hidden;
  pc.train_base.batch_size = flags.batch_size;
  pc.train_base.learning_rate = flags.learning_rate;
  pc.use_fixed_splits = !flags.no_fixed_splits;
  if (!flags.save_models.empty()) pc.save_models_dir = flags.save_models;
  if (flags.timed_tau > 0.0 || flags.timed_dropout >= 0.0) {
    HyperPair pair;
    pair.tau = flags.timed_tau;
    if (flags.timed_dropout >= 0.0) pair.dropout = flags.timed_dropout;
    pc.timed_pair = pair;
  }
  return pc;
}

int cmd_run(const CommonOptions& common, const RunFlags& flags) {
  const std::string dir_name = resolve_dataset_dir_name(common.data_dir, flags.dataset);
  const Dataset ds = load_dataset(common.data_dir, dir_name);
  const ExperimentResult result = run_experiment(ds, protocol_from_flags(flags, common));
  write_run_outputs(result, flags.out_dir);
  print_aggregate_row(result);
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& files, const std::string& format_name,
               double compare_k) {
  std::vector<ExperimentResult> results;
  results.reserve(files.size());
  for (const auto& file : files) results.push_back(read_results(file));

  const TableFormat format = table_format_from_string(format_name);
  const ReferenceTable& reference = ReferenceTable::published();
  std::cout << render_table(results, reference, MetricKind::rmse, format) << "\n";
  std::cout << render_table(results, reference, MetricKind::log_likelihood, format) << "\n";

  if (compare_k <= 0.0) return kExitOk;
  bool all_pass = true;
  for (const auto& result : results) {
    for (const auto& verdict : compare_to_reference(result, reference, compare_k)) {
      std::cout << describe(verdict) << "\n";
      all_pass = all_pass && verdict.pass;
    }
  }
  return all_pass ? kExitOk : kExitComparisonFailed;
}

struct ReproduceFlags {
  std::vector<std::string> datasets = {"boston", "concrete", "yacht", "wine"};
  std::string budget = "full";
  std::string out_dir = "reproduction";
  std::uint64_t seed = 1;
};

int cmd_reproduce(const CommonOptions& common, const ReproduceFlags& flags) {
  const bool desk = flags.budget == "desk";

  // Validate names before touching any data.
  for (const auto& name : flags.datasets) {
    const std::string canonical = canonical_dataset_name(name);
    const bool known = std::any_of(known_datasets().begin(), known_datasets().end(),
                                   [&](const auto& kv) {
                                     return canonical_dataset_name(kv.second) == canonical;
                                   });
    if (!known) {
      std::cerr << "unknown dataset name: " << name << "\n";
      return kExitUsage;
    }
  }

  bool any_fail = false;
  std::vector<std::string> failing;
  std::vector<ExperimentResult> all_results;
  for (const auto& name : flags.datasets) {
    const std::string dir_name = resolve_dataset_dir_name(common.data_dir, name);
    const Dataset ds = load_dataset(common.data_dir, dir_name);
    const fs::path dataset_dir = fs::path(common.data_dir) / dir_name;

    bool dataset_ok = true;
    for (Setting setting : {Setting::timed, Setting::convergence, Setting::grid_tuned}) {
      ProtocolConfig pc;
      pc.setting = setting;
      pc.master_seed = flags.seed;
      pc.jobs = common.jobs;
      if (desk) {
        pc.n_splits = std::min(10, default_n_splits(ds.name));
        pc.mc_samples = 1000;
        pc.search_mc_samples = 300;
        pc.bo.n_init = 3;
        pc.bo.n_iters = 7;
        const bool published_grid =
            load_value_file(dataset_dir / "data" / "tau_values.txt").has_value();
        if (!published_grid && setting == Setting::grid_tuned) {
          const Scalar y_var =
              (ds.targets.array() - ds.targets.mean()).square().sum() /
              static_cast<Scalar>(ds.n_rows() - 1);
          pc.space.tau_grid = log_spaced(0.1 / y_var, 10.0 / y_var, 5);
          pc.space.dropout_grid = {0.01, 0.05};
        }
      }
      const ExperimentResult result = run_experiment(ds, pc);
      write_run_outputs(result, flags.out_dir);
      print_aggregate_row(result);
      all_results.push_back(result);

      for (const auto& verdict :
           compare_to_reference(result, ReferenceTable::published(), 3.0)) {
        const bool advisory = setting == Setting::timed;
        std::cout << (advisory ? "[advisory] " : "") << describe(verdict) << "\n";
        if (!advisory && !verdict.pass) dataset_ok = false;
      }
    }
    if (!dataset_ok) {
      any_fail = true;
      failing.push_back(name);
    }
  }

  std::cout << "\n" << render_table(all_results, ReferenceTable::published(),
                                    MetricKind::rmse, TableFormat::markdown);
  std::cout << "\n" << render_table(all_results, ReferenceTable::published(),
                                    MetricKind::log_likelihood, TableFormat::markdown);

  if (any_fail) {
    std::cout << "\nFAILING DATASETS:";
    for (const auto& name : failing) std::cout << " " << name;
    std::cout << "\n";
    return kExitComparisonFailed;
  }
  std::cout << "\nAll compared cells within 3 combined standard errors.\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UCI regression benchmark harness for MC-dropout networks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand
  app.set_config("--config", "", "Flat key=value config file; flags take precedence");

  CommonOptions common;
  app.add_option("--data-dir", common.data_dir,
                 "Dataset directory (env UCI_BDL_DATA_DIR)")
      ->envname("UCI_BDL_DATA_DIR")
      ->capture_default_str();
  app.add_option("--jobs", common.jobs,
                 "Worker pool width; 0 means hardware concurrency")
      ->capture_default_str();

  auto* data = app.add_subcommand("data", "List, inspect, or explain how to fetch datasets");
  data->require_subcommand(1);
  auto* data_list = data->add_subcommand("list", "List datasets found under the data dir");
  std::string inspect_name;
  auto* data_inspect = data->add_subcommand("inspect", "Show one dataset's dimensions");
  data_inspect->add_option("name", inspect_name, "Dataset name")->required();
  auto* data_fetch = data->add_subcommand("fetch-instructions",
                                          "Print data source URLs and the expected layout");

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one experiment protocol on one dataset");
  run->add_option("--dataset", run_flags.dataset, "Dataset name")->required();
  run->add_option("--setting", run_flags.setting, "timed|convergence|grid")
      ->check(CLI::IsMember({"timed", "convergence", "grid"}))
      ->capture_default_str();
  run->add_option("--epochs", run_flags.epochs, "Training epochs; 0 uses the setting default");
  run->add_option("--splits", run_flags.splits, "Split count; 0 uses the dataset default");
  run->add_option("--mc-samples", run_flags.mc_samples, "Stochastic forward passes at eval")
      ->capture_default_str();
  run->add_option("--search-mc-samples", run_flags.search_mc_samples,
                  "Forward passes while scoring search candidates")
      ->capture_default_str();
  run->add_option("--seed", run_flags.seed, "Master seed")->capture_default_str();
  run->add_option("--out", run_flags.out_dir, "Output directory")->capture_default_str();
  run->add_option("--criterion", run_flags.criterion, "Search selection criterion")
      ->check(CLI::IsMember({"ll", "rmse"}))
      ->capture_default_str();
  run->add_option("--save-models", run_flags.save_models, "Directory for trained model files");
  run->add_option("--hidden", run_flags.hidden, "Hidden units; 0 uses the dataset default");
  run->add_option("--batch-size", run_flags.batch_size, "Mini-batch size")
      ->capture_default_str();
  run->add_option("--learning-rate", run_flags.learning_rate, "Adam learning rate")
      ->capture_default_str();
  auto* tau_opt =
      run->add_option("--tau", run_flags.timed_tau, "Timed-setting tau override")
          ->check(CLI::PositiveNumber);
  run->add_option("--dropout", run_flags.timed_dropout, "Timed-setting dropout override")
      ->check(CLI::Range(0.0, 0.999))
      ->needs(tau_opt);
  run->add_flag("--no-fixed-splits", run_flags.no_fixed_splits,
                "Ignore published split files and draw seeded random splits");

  std::vector<std::string> report_files;
  std::string report_format = "markdown";
  double compare_k = 0.0;
  auto* report = app.add_subcommand("report", "Render result tables next to published numbers");
  report->add_option("--results", report_files, "Result files produced by `run`");
  report->add_option("--format", report_format, "markdown|csv|latex")
      ->check(CLI::IsMember({"markdown", "md", "csv", "latex", "tex"}))
      ->capture_default_str();
  report->add_option("--compare-k", compare_k,
                     "Compare against published cells; pass within k combined SEs");

  ReproduceFlags reproduce_flags;
  auto* reproduce = app.add_subcommand("reproduce",
                                       "Run all three settings and compare to published cells");
  reproduce->add_option("--datasets", reproduce_flags.datasets,
                        "Dataset subset (default: boston concrete yacht wine)")
      ->delimiter(',');
  reproduce->add_option("--budget", reproduce_flags.budget, "full|desk")
      ->check(CLI::IsMember({"full", "desk"}))
      ->capture_default_str();
  reproduce->add_option("--out", reproduce_flags.out_dir, "Output directory")
      ->capture_default_str();
  reproduce->add_option("--seed", reproduce_flags.seed, "Master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (data_list->parsed()) return cmd_data_list(common);
    if (data_inspect->parsed()) return cmd_data_inspect(common, inspect_name);
    if (data_fetch->parsed()) return cmd_data_fetch_instructions();
    if (run->parsed()) return cmd_run(common, run_flags);
    if (report->parsed()) return cmd_report(report_files, report_format, compare_k);
    if (reproduce->parsed()) return cmd_reproduce(common, reproduce_flags);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
