#pragma once

#include <filesystem>
#include <string>

#include "ucibdl/runner.hpp"

namespace ucibdl {

inline constexpr const char* kResultsSchema = "ucibdl.results.v1";

/// Serializes an experiment to the versioned JSON schema: config block with
/// every default materialized, per-split records (including search traces),
/// and aggregates.
std::string results_to_json(const ExperimentResult& result);
ExperimentResult results_from_json(const std::string& text);

void write_results(const ExperimentResult& result, const std::filesystem::path& file);
ExperimentResult read_results(const std::filesystem::path& file);

/// Flat per-split CSV: split,tau,dropout,rmse,log_likelihood,train_seconds.
std::string results_to_csv(const ExperimentResult& result);

/// `<dataset>_<setting>_<seed>` — the canonical result-file stem.
std::string result_file_stem(const ExperimentResult& result);

}  // namespace ucibdl
