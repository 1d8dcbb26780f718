#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ucibdl/runner.hpp"
#include "ucibdl/types.hpp"

namespace ucibdl {

enum class MetricKind { rmse, log_likelihood };

/// One published benchmark cell: mean +- standard error. Cells a source never
/// reported (the SGHMC columns on several datasets) carry present = false.
struct RefCell {
  double mean = 0.0;
  double se = 0.0;
  bool present = false;
};

struct ReferenceEntry {
  const char* dataset;
  MetricKind kind;
  const char* column;
  RefCell cell;
};

/// The published RMSE and log-likelihood comparison tables, embedded as data.
class ReferenceTable {
 public:
  static const ReferenceTable& published();

  const std::vector<std::string>& datasets() const { return datasets_; }
  const std::vector<std::string>& columns(MetricKind kind) const;

  /// Row/column lookup; nullopt when the table has no such cell at all
  /// (unknown dataset or column for that metric).
  std::optional<RefCell> cell(const std::string& dataset, const std::string& column,
                              MetricKind kind) const;

  ReferenceTable(std::vector<std::string> datasets, std::vector<std::string> rmse_columns,
                 std::vector<std::string> ll_columns, std::vector<ReferenceEntry> entries);

 private:
  std::vector<std::string> datasets_;
  std::vector<std::string> rmse_columns_;
  std::vector<std::string> ll_columns_;
  std::vector<ReferenceEntry> entries_;
};

enum class TableFormat { markdown, csv, latex };
TableFormat table_format_from_string(const std::string& name);

/// "m.mm ± s.ss", two decimals, no negative zero.
std::string format_cell(double mean, double se);

/// The reference column a result feeds, by its protocol setting.
std::string result_column_name(Setting setting);

/// Canonical row label for a dataset directory name ("bostonHousing" ->
/// "Boston Housing"); unknown names pass through unchanged.
std::string canonical_dataset_name(const std::string& raw);

/// One row per dataset, one column per source; our aggregates appear next to
/// the published columns. Markdown and LaTeX bold the best mean per row (ties
/// at the displayed precision are all bolded); CSV keeps full precision.
std::string render_table(const std::vector<ExperimentResult>& results,
                         const ReferenceTable& reference, MetricKind kind,
                         TableFormat format);

struct ComparisonVerdict {
  std::string cell_id;
  double ours_mean = 0.0;
  double ours_se = 0.0;
  double ref_mean = 0.0;
  double ref_se = 0.0;
  double deviation = 0.0;  // |ours - ref| in combined-SE units
  bool pass = false;
};

/// Compares a run's RMSE and LL aggregates against the matching published
/// dropout cells: pass iff |mean_ours - mean_ref| <= k * max(SE_ref, SE_ours).
std::vector<ComparisonVerdict> compare_to_reference(const ExperimentResult& result,
                                                    const ReferenceTable& reference,
                                                    double k);

std::string describe(const ComparisonVerdict& verdict);

}  // namespace ucibdl
