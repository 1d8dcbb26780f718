#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ucibdl/types.hpp"

namespace ucibdl {

/// A curated regression dataset: design matrix, target vector, provenance.
struct Dataset {
  std::string name;
  Matrix features;  // n_rows x n_features
  Vector targets;   // n_rows
  std::string source_path;

  Index n_rows() const { return features.rows(); }
  Index n_features() const { return features.cols(); }
};

/// Index-based train/test partition. Lists are sorted, duplicate-free and
/// disjoint; every index is < n_rows of the owning dataset.
struct Split {
  IndexList train_indices;
  IndexList test_indices;
};

/// Per-column affine normalization, fitted on training rows only.
/// Constant columns are mapped to std = 1 so they stay loadable.
struct Standardizer {
  Vector feature_means;
  Vector feature_stds;
  Scalar target_mean = 0.0;
  Scalar target_std = 1.0;
};

struct ValidationCarve {
  IndexList train_sub;
  IndexList validation;
};

/// Loads `<dir>/<name>/data/data.txt` (whitespace- or comma-delimited numeric
/// table) with the column selection given by `index_features.txt` and
/// `index_target.txt`. Rejects ragged rows, non-numeric cells and non-finite
/// values.
Dataset load_dataset(const std::filesystem::path& dir, const std::string& name);

/// n_splits independent uniformly random partitions with
/// |test| = round(test_fraction * n_rows), deterministic in seed.
std::vector<Split> generate_splits(const Dataset& dataset, int n_splits,
                                   double test_fraction, std::uint64_t seed);

/// True when `<dataset dir>/data` carries published per-split index files
/// (`index_train_<k>.txt` / `index_test_<k>.txt`).
bool has_fixed_splits(const std::filesystem::path& dataset_dir);

/// Reads published split-index files, validating them against the Split
/// invariants (bit-exact reuse of a published experiment layout).
std::vector<Split> load_fixed_splits(const Dataset& dataset,
                                     const std::filesystem::path& dataset_dir);

/// Draws round(fraction * |train|) validation indices without replacement
/// from the split's training indices, deterministic in seed.
ValidationCarve carve_validation(const Split& split, double fraction,
                                 std::uint64_t seed);

Standardizer fit_standardizer(const Dataset& dataset, const IndexList& train_indices);

Matrix standardize_features(const Standardizer& s, ConstMatrixRef x);
Vector standardize_targets(const Standardizer& s, ConstVectorRef y);
std::pair<Matrix, Vector> apply_standardizer(const Standardizer& s,
                                             ConstMatrixRef x, ConstVectorRef y);
Vector invert_targets(const Standardizer& s, ConstVectorRef y_standardized);

/// Gathers the given rows (elements, for vectors) into a new dense object.
template <typename Derived>
typename Derived::PlainObject select_rows(const Eigen::MatrixBase<Derived>& x,
                                          const IndexList& indices) {
  typename Derived::PlainObject out(static_cast<Index>(indices.size()), x.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] >= 0 && indices[i] < x.rows(),
            "row index out of range: " + std::to_string(indices[i]));
    out.row(static_cast<Index>(i)) = x.row(indices[i]);
  }
  return out;
}

/// One value per line; used for the optional per-dataset grid files
/// (`tau_values.txt`, `dropout_rates.txt`) shipped alongside published data.
std::optional<std::vector<double>> load_value_file(const std::filesystem::path& file);

}  // namespace ucibdl
