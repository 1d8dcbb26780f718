#include "ucibdl/results_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ucibdl {

namespace {

using json = nlohmann::ordered_json;

const char* criterion_name(SelectionCriterion c) {
  return c == SelectionCriterion::log_likelihood ? "log_likelihood" : "rmse";
}

SelectionCriterion criterion_from_name(const std::string& name) {
  if (name == "log_likelihood") return SelectionCriterion::log_likelihood;
  if (name == "rmse") return SelectionCriterion::rmse;
  throw Error("unknown selection criterion '" + name + "'");
}

json config_to_json(const ProtocolConfig& pc) {
  json j;
  j["setting"] = to_string(pc.setting);
  j["epochs"] = pc.epochs;
  j["n_splits"] = pc.n_splits;
  j["test_fraction"] = pc.test_fraction;
  j["validation_fraction"] = pc.validation_fraction;
  j["mc_samples"] = pc.mc_samples;
  j["search_mc_samples"] = pc.search_mc_samples;
  j["master_seed"] = pc.master_seed;
  j["jobs"] = pc.jobs;
  j["criterion"] = criterion_name(pc.criterion);
  j["use_fixed_splits"] = pc.use_fixed_splits;
  j["mlp"] = {{"hidden_units", pc.mlp_base.hidden_units},
              {"lengthscale", pc.mlp_base.lengthscale}};
  j["train"] = {{"batch_size", pc.train_base.batch_size},
                {"learning_rate", pc.train_base.learning_rate},
                {"beta1", pc.train_base.beta1},
                {"beta2", pc.train_base.beta2},
                {"epsilon", pc.train_base.epsilon}};
  j["search"] = {{"tau_grid", pc.space.tau_grid},
                 {"dropout_grid", pc.space.dropout_grid},
                 {"tau_bounds", {pc.space.tau_bounds.first, pc.space.tau_bounds.second}},
                 {"dropout_bounds",
                  {pc.space.dropout_bounds.first, pc.space.dropout_bounds.second}},
                 {"bo_n_init", pc.bo.n_init},
                 {"bo_n_iters", pc.bo.n_iters},
                 {"bo_n_candidates", pc.bo.n_candidates}};
  if (pc.timed_pair) {
    j["timed_pair"] = {{"tau", pc.timed_pair->tau}, {"dropout", pc.timed_pair->dropout}};
  } else {
    j["timed_pair"] = nullptr;
  }
  return j;
}

ProtocolConfig config_from_json(const json& j) {
  ProtocolConfig pc;
  pc.setting = setting_from_string(j.at("setting").get<std::string>());
  pc.epochs = j.at("epochs").get<int>();
  pc.n_splits = j.at("n_splits").get<int>();
  pc.test_fraction = j.at("test_fraction").get<double>();
  pc.validation_fraction = j.at("validation_fraction").get<double>();
  pc.mc_samples = j.at("mc_samples").get<int>();
  pc.search_mc_samples = j.at("search_mc_samples").get<int>();
  pc.master_seed = j.at("master_seed").get<std::uint64_t>();
  pc.jobs = j.at("jobs").get<int>();
  pc.criterion = criterion_from_name(j.at("criterion").get<std::string>());
  pc.use_fixed_splits = j.at("use_fixed_splits").get<bool>();
  pc.mlp_base.hidden_units = j.at("mlp").at("hidden_units").get<Index>();
  pc.mlp_base.lengthscale = j.at("mlp").at("lengthscale").get<double>();
  pc.train_base.batch_size = j.at("train").at("batch_size").get<int>();
  pc.train_base.learning_rate = j.at("train").at("learning_rate").get<double>();
  pc.train_base.beta1 = j.at("train").at("beta1").get<double>();
  pc.train_base.beta2 = j.at("train").at("beta2").get<double>();
  pc.train_base.epsilon = j.at("train").at("epsilon").get<double>();
  const auto& search = j.at("search");
  pc.space.tau_grid = search.at("tau_grid").get<std::vector<Scalar>>();
  pc.space.dropout_grid = search.at("dropout_grid").get<std::vector<Scalar>>();
  pc.space.tau_bounds = {search.at("tau_bounds").at(0).get<double>(),
                         search.at("tau_bounds").at(1).get<double>()};
  pc.space.dropout_bounds = {search.at("dropout_bounds").at(0).get<double>(),
                             search.at("dropout_bounds").at(1).get<double>()};
  pc.bo.n_init = search.at("bo_n_init").get<int>();
  pc.bo.n_iters = search.at("bo_n_iters").get<int>();
  pc.bo.n_candidates = search.at("bo_n_candidates").get<int>();
  if (!j.at("timed_pair").is_null()) {
    pc.timed_pair = HyperPair{j.at("timed_pair").at("tau").get<double>(),
                              j.at("timed_pair").at("dropout").get<double>()};
  }
  return pc;
}

}  // namespace

std::string results_to_json(const ExperimentResult& result) {
  json j;
  j["schema"] = kResultsSchema;
  j["dataset"] = result.dataset;
  j["config"] = config_to_json(result.protocol);

  json records = json::array();
  for (const auto& r : result.records) {
    json rec;
    rec["split"] = r.split_index;
    rec["tau"] = r.pair.tau;
    rec["dropout"] = r.pair.dropout;
    rec["rmse"] = r.rmse;
    rec["log_likelihood"] = r.log_likelihood;
    rec["train_seconds"] = r.train_wall_time_seconds;
    json trace = json::array();
    for (const auto& t : r.search_trace) {
      trace.push_back({{"tau", t.pair.tau},
                       {"dropout", t.pair.dropout},
                       {"val_rmse", t.val_rmse},
                       {"val_log_likelihood", t.val_log_likelihood},
                       {"train_seconds", t.train_seconds}});
    }
    rec["search_trace"] = std::move(trace);
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);

  j["aggregates"] = {{"rmse_mean", result.aggregates.rmse_mean},
                     {"rmse_se", result.aggregates.rmse_se},
                     {"ll_mean", result.aggregates.ll_mean},
                     {"ll_se", result.aggregates.ll_se},
                     {"mean_train_seconds", result.aggregates.mean_train_seconds}};
  return j.dump(2) + "\n";
}

ExperimentResult results_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("invalid results file: ") + e.what());
  }
  if (!j.contains("schema") || j.at("schema").get<std::string>() != kResultsSchema) {
    throw Error("results schema mismatch: expected " + std::string(kResultsSchema));
  }

  ExperimentResult result;
  result.dataset = j.at("dataset").get<std::string>();
  result.protocol = config_from_json(j.at("config"));
  for (const auto& rec : j.at("records")) {
    SplitRecord r;
    r.split_index = rec.at("split").get<int>();
    r.pair.tau = rec.at("tau").get<double>();
    r.pair.dropout = rec.at("dropout").get<double>();
    r.rmse = rec.at("rmse").get<double>();
    r.log_likelihood = rec.at("log_likelihood").get<double>();
    r.train_wall_time_seconds = rec.at("train_seconds").get<double>();
    if (rec.contains("search_trace")) {
      for (const auto& t : rec.at("search_trace")) {
        r.search_trace.push_back(SearchTraceEntry{
            HyperPair{t.at("tau").get<double>(), t.at("dropout").get<double>()},
            t.at("val_rmse").get<double>(), t.at("val_log_likelihood").get<double>(),
            t.at("train_seconds").get<double>()});
      }
    }
    result.records.push_back(std::move(r));
  }
  const auto& agg = j.at("aggregates");
  result.aggregates.rmse_mean = agg.at("rmse_mean").get<double>();
  result.aggregates.rmse_se = agg.at("rmse_se").get<double>();
  result.aggregates.ll_mean = agg.at("ll_mean").get<double>();
  result.aggregates.ll_se = agg.at("ll_se").get<double>();
  result.aggregates.mean_train_seconds = agg.at("mean_train_seconds").get<double>();
  return result;
}

void write_results(const ExperimentResult& result, const std::filesystem::path& file) {
  std::ofstream out(file);
  require(out.good(), "cannot write results file " + file.string());
  out << results_to_json(result);
  require(out.good(), "failed writing results file " + file.string());
}

ExperimentResult read_results(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(in.good(), "cannot open results file " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return results_from_json(buffer.str());
}

std::string results_to_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "split,tau,dropout,rmse,log_likelihood,train_seconds\n";
  for (const auto& r : result.records) {
    out << r.split_index << "," << r.pair.tau << "," << r.pair.dropout << "," << r.rmse
        << "," << r.log_likelihood << "," << r.train_wall_time_seconds << "\n";
  }
  return out.str();
}

std::string result_file_stem(const ExperimentResult& result) {
  return result.dataset + "_" + to_string(result.protocol.setting) + "_" +
         std::to_string(result.protocol.master_seed);
}

}  // namespace ucibdl
