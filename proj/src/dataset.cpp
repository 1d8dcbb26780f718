#include "ucibdl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ucibdl/rng.hpp"

namespace ucibdl {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  require(in.good(), "cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) || c == ','; });
}

std::vector<double> parse_numeric_row(const std::string& line, const fs::path& file,
                                      std::size_t line_no) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p != end) {
    if (std::isspace(static_cast<unsigned char>(*p)) || *p == ',') {
      ++p;
      continue;
    }
    if (*p == '+') ++p;  // from_chars rejects explicit plus signs
    double value = 0.0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{} || next == p) {
      throw Error("non-numeric cell in " + file.string() + " at line " +
                  std::to_string(line_no));
    }
    if (!std::isfinite(value)) {
      throw Error("non-finite value in " + file.string() + " at line " +
                  std::to_string(line_no));
    }
    row.push_back(value);
    p = next;
  }
  return row;
}

std::vector<Index> read_index_file(const fs::path& file) {
  std::vector<Index> indices;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(file)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto row = parse_numeric_row(line, file, line_no);
    for (double v : row) {
      const auto idx = static_cast<Index>(std::llround(v));
      require(std::abs(v - static_cast<double>(idx)) < 1e-9 && idx >= 0,
              "invalid index '" + std::to_string(v) + "' in " + file.string());
      indices.push_back(idx);
    }
  }
  return indices;
}

void validate_split(const Split& split, Index n_rows, const std::string& what) {
  require(!split.train_indices.empty(), what + ": empty train set");
  require(!split.test_indices.empty(), what + ": empty test set");
  auto check_list = [&](const IndexList& list, const char* side) {
    IndexList sorted = list;
    std::sort(sorted.begin(), sorted.end());
    require(sorted.front() >= 0 && sorted.back() < n_rows,
            what + ": " + side + " index out of range");
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            what + ": duplicate " + side + " index");
  };
  check_list(split.train_indices, "train");
  check_list(split.test_indices, "test");
  IndexList train = split.train_indices, test = split.test_indices;
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  IndexList overlap;
  std::set_intersection(train.begin(), train.end(), test.begin(), test.end(),
                        std::back_inserter(overlap));
  require(overlap.empty(), what + ": train/test overlap");
}

}  // namespace

Dataset load_dataset(const fs::path& dir, const std::string& name) {
  const fs::path data_dir = dir / name / "data";
  const fs::path data_file = data_dir / "data.txt";
  require(fs::exists(data_file), "missing data file " + data_file.string());

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(data_file)) {
    ++line_no;
    if (is_blank(line)) continue;
    rows.push_back(parse_numeric_row(line, data_file, line_no));
  }
  require(!rows.empty(), "empty data table in " + data_file.string());
  const std::size_t n_cols = rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n_cols) {
      throw Error("ragged row " + std::to_string(i + 1) + " in " + data_file.string() +
                  " (" + std::to_string(rows[i].size()) + " vs " +
                  std::to_string(n_cols) + " columns)");
    }
  }

  const auto feature_cols = read_index_file(data_dir / "index_features.txt");
  const auto target_cols = read_index_file(data_dir / "index_target.txt");
  require(!feature_cols.empty(), "empty feature selection for " + name);
  require(target_cols.size() == 1,
          "expected exactly one target column index for " + name + ", got " +
              std::to_string(target_cols.size()));
  for (Index c : feature_cols) {
    require(c < static_cast<Index>(n_cols), "feature column index out of range: " +
                                                std::to_string(c));
  }
  require(target_cols[0] < static_cast<Index>(n_cols),
          "target column index out of range: " + std::to_string(target_cols[0]));

  Dataset ds;
  ds.name = name;
  ds.source_path = (dir / name).string();
  ds.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(feature_cols.size()));
  ds.targets.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      ds.features(static_cast<Index>(i), static_cast<Index>(j)) =
          rows[i][static_cast<std::size_t>(feature_cols[j])];
    }
    ds.targets(static_cast<Index>(i)) = rows[i][static_cast<std::size_t>(target_cols[0])];
  }
  require(ds.features.allFinite() && ds.targets.allFinite(),
          "non-finite values after load in " + data_file.string());
  return ds;
}

std::vector<Split> generate_splits(const Dataset& dataset, int n_splits,
                                   double test_fraction, std::uint64_t seed) {
  const Index n = dataset.n_rows();
  require(n_splits >= 1, "n_splits must be >= 1");
  require(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction must be in (0,1)");
  require(std::floor(test_fraction * static_cast<double>(n)) >= 1.0,
          dataset.name + ": too few rows for test_fraction " +
              std::to_string(test_fraction));
  const auto n_test = static_cast<Index>(std::llround(test_fraction * static_cast<double>(n)));
  require(n_test >= 1 && n - n_test >= 1, dataset.name + ": degenerate split sizes");

  Rng rng(seed);
  std::vector<Split> splits;
  splits.reserve(static_cast<std::size_t>(n_splits));
  for (int k = 0; k < n_splits; ++k) {
    Rng stream = rng.stream(static_cast<std::uint64_t>(k));
    IndexList order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    stream.shuffle(order);
    Split split;
    split.test_indices.assign(order.begin(), order.begin() + n_test);
    split.train_indices.assign(order.begin() + n_test, order.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    std::sort(split.train_indices.begin(), split.train_indices.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

bool has_fixed_splits(const fs::path& dataset_dir) {
  const fs::path data_dir = dataset_dir / "data";
  return fs::exists(data_dir / "index_train_0.txt") &&
         fs::exists(data_dir / "index_test_0.txt");
}

std::vector<Split> load_fixed_splits(const Dataset& dataset, const fs::path& dataset_dir) {
  const fs::path data_dir = dataset_dir / "data";
  int n_splits = 0;
  if (fs::exists(data_dir / "n_splits.txt")) {
    const auto values = read_index_file(data_dir / "n_splits.txt");
    require(values.size() == 1 && values[0] >= 1, "invalid n_splits.txt in " + data_dir.string());
    n_splits = static_cast<int>(values[0]);
  } else {
    while (fs::exists(data_dir / ("index_train_" + std::to_string(n_splits) + ".txt"))) {
      ++n_splits;
    }
  }
  require(n_splits >= 1, "no split index files in " + data_dir.string());

  std::vector<Split> splits;
  splits.reserve(static_cast<std::size_t>(n_splits));
  for (int k = 0; k < n_splits; ++k) {
    Split split;
    split.train_indices = read_index_file(data_dir / ("index_train_" + std::to_string(k) + ".txt"));
    split.test_indices = read_index_file(data_dir / ("index_test_" + std::to_string(k) + ".txt"));
    validate_split(split, dataset.n_rows(), dataset.name + " split " + std::to_string(k));
    splits.push_back(std::move(split));
  }
  return splits;
}

ValidationCarve carve_validation(const Split& split, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, "validation fraction must be in (0,1)");
  const auto n_train = static_cast<Index>(split.train_indices.size());
  require(n_train >= 5, "degenerate train set: " + std::to_string(n_train) + " rows");
  const auto n_val = static_cast<Index>(std::llround(fraction * static_cast<double>(n_train)));
  require(n_val >= 1, "validation carve is empty for fraction " + std::to_string(fraction));
  require(n_val < n_train, "validation carve would consume the whole train set");

  IndexList shuffled = split.train_indices;
  Rng rng(seed);
  rng.shuffle(shuffled);
  ValidationCarve carve;
  carve.validation.assign(shuffled.begin(), shuffled.begin() + n_val);
  carve.train_sub.assign(shuffled.begin() + n_val, shuffled.end());
  std::sort(carve.validation.begin(), carve.validation.end());
  std::sort(carve.train_sub.begin(), carve.train_sub.end());
  return carve;
}

Standardizer fit_standardizer(const Dataset& dataset, const IndexList& train_indices) {
  require(train_indices.size() >= 2, "need at least 2 training rows to fit a standardizer");
  const Matrix x = select_rows(dataset.features, train_indices);
  const Vector y = select_rows(dataset.targets, train_indices);
  const auto n = static_cast<double>(x.rows());

  Standardizer s;
  s.feature_means = x.colwise().mean();
  Vector sq = (x.rowwise() - s.feature_means.transpose()).colwise().squaredNorm();
  s.feature_stds = (sq / (n - 1.0)).cwiseSqrt();
  for (Index j = 0; j < s.feature_stds.size(); ++j) {
    if (s.feature_stds(j) <= 0.0) s.feature_stds(j) = 1.0;
  }
  s.target_mean = y.mean();
  const double y_var = (y.array() - s.target_mean).square().sum() / (n - 1.0);
  s.target_std = y_var > 0.0 ? std::sqrt(y_var) : 1.0;
  return s;
}

Matrix standardize_features(const Standardizer& s, ConstMatrixRef x) {
  require(x.cols() == s.feature_means.size(),
          "feature dimension mismatch: " + std::to_string(x.cols()) + " vs " +
              std::to_string(s.feature_means.size()));
  return (x.rowwise() - s.feature_means.transpose()).array().rowwise() /
         s.feature_stds.transpose().array();
}

Vector standardize_targets(const Standardizer& s, ConstVectorRef y) {
  return (y.array() - s.target_mean) / s.target_std;
}

std::pair<Matrix, Vector> apply_standardizer(const Standardizer& s, ConstMatrixRef x,
                                             ConstVectorRef y) {
  require(x.rows() == y.size(), "row count mismatch between features and targets");
  return {standardize_features(s, x), standardize_targets(s, y)};
}

Vector invert_targets(const Standardizer& s, ConstVectorRef y_standardized) {
  return y_standardized.array() * s.target_std + s.target_mean;
}

std::optional<std::vector<double>> load_value_file(const fs::path& file) {
  if (!fs::exists(file)) return std::nullopt;
  std::vector<double> values;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(file)) {
    ++line_no;
    if (is_blank(line)) continue;
    for (double v : parse_numeric_row(line, file, line_no)) values.push_back(v);
  }
  require(!values.empty(), "empty value file " + file.string());
  return values;
}

}  // namespace ucibdl
