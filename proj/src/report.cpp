#include "ucibdl/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace ucibdl {

namespace {

std::string squash(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::string two_decimals(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  std::string text(buffer);
  if (text == "-0.00") text = "0.00";
  return text;
}

std::string full_precision(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

struct DisplayCell {
  bool present = false;
  double mean = 0.0;
  double se = 0.0;
};

}  // namespace

ReferenceTable::ReferenceTable(std::vector<std::string> datasets,
                               std::vector<std::string> rmse_columns,
                               std::vector<std::string> ll_columns,
                               std::vector<ReferenceEntry> entries)
    : datasets_(std::move(datasets)),
      rmse_columns_(std::move(rmse_columns)),
      ll_columns_(std::move(ll_columns)),
      entries_(std::move(entries)) {}

const std::vector<std::string>& ReferenceTable::columns(MetricKind kind) const {
  return kind == MetricKind::rmse ? rmse_columns_ : ll_columns_;
}

std::optional<RefCell> ReferenceTable::cell(const std::string& dataset,
                                            const std::string& column,
                                            MetricKind kind) const {
  for (const auto& entry : entries_) {
    if (entry.kind == kind && dataset == entry.dataset && column == entry.column) {
      return entry.cell;
    }
  }
  return std::nullopt;
}

TableFormat table_format_from_string(const std::string& name) {
  if (name == "markdown" || name == "md") return TableFormat::markdown;
  if (name == "csv") return TableFormat::csv;
  if (name == "latex" || name == "tex") return TableFormat::latex;
  throw Error("unknown table format '" + name + "' (expected markdown|csv|latex)");
}

std::string format_cell(double mean, double se) {
  return two_decimals(mean) + " \u00b1 " + two_decimals(se);
}

std::string result_column_name(Setting setting) {
  switch (setting) {
    case Setting::timed: return "Dropout (Timed Setting)";
    case Setting::convergence: return "Dropout (Convergence)";
    case Setting::grid_tuned: return "Dropout (Hyperparameter tuning)";
  }
  throw Error("unknown setting");
}

std::string canonical_dataset_name(const std::string& raw) {
  static const std::map<std::string, std::string> aliases = {
      {"boston", "Boston Housing"},
      {"bostonhousing", "Boston Housing"},
      {"concrete", "Concrete Strength"},
      {"concretestrength", "Concrete Strength"},
      {"energy", "Energy Efficiency"},
      {"energyefficiency", "Energy Efficiency"},
      {"kin8nm", "Kin8nm"},
      {"naval", "Naval Propulsion"},
      {"navalpropulsion", "Naval Propulsion"},
      {"navalpropulsionplant", "Naval Propulsion"},
      {"power", "Power Plant"},
      {"powerplant", "Power Plant"},
      {"protein", "Protein Structure"},
      {"proteinstructure", "Protein Structure"},
      {"proteintertiarystructure", "Protein Structure"},
      {"wine", "Wine Quality Red"},
      {"winequalityred", "Wine Quality Red"},
      {"yacht", "Yacht Hydrodynamics"},
      {"yachthydrodynamics", "Yacht Hydrodynamics"},
  };
  const auto it = aliases.find(squash(raw));
  return it == aliases.end() ? raw : it->second;
}

std::string render_table(const std::vector<ExperimentResult>& results,
                         const ReferenceTable& reference, MetricKind kind,
                         TableFormat format) {
  // Row order: published datasets first, then unknown datasets from results.
  std::vector<std::string> rows = reference.datasets();
  for (const auto& result : results) {
    const std::string name = canonical_dataset_name(result.dataset);
    if (std::find(rows.begin(), rows.end(), name) == rows.end()) rows.push_back(name);
  }

  std::vector<std::string> columns = reference.columns(kind);
  std::vector<Setting> ours_settings;
  for (Setting s : {Setting::timed, Setting::convergence, Setting::grid_tuned}) {
    const bool present = std::any_of(results.begin(), results.end(),
                                     [&](const auto& r) { return r.protocol.setting == s; });
    if (present) {
      ours_settings.push_back(s);
      columns.push_back("Ours (" + to_string(s) + ")");
    }
  }

  auto lookup = [&](const std::string& row, std::size_t col_index) -> DisplayCell {
    DisplayCell out;
    const std::size_t n_ref = reference.columns(kind).size();
    if (col_index < n_ref) {
      const auto cell = reference.cell(row, columns[col_index], kind);
      if (cell && cell->present) out = {true, cell->mean, cell->se};
      return out;
    }
    const Setting setting = ours_settings[col_index - n_ref];
    for (const auto& result : results) {
      if (result.protocol.setting == setting && canonical_dataset_name(result.dataset) == row) {
        const auto& agg = result.aggregates;
        if (kind == MetricKind::rmse) {
          out = {true, agg.rmse_mean, agg.rmse_se};
        } else {
          out = {true, agg.ll_mean, agg.ll_se};
        }
      }
    }
    return out;
  };

  const std::string title =
      kind == MetricKind::rmse ? "Average test RMSE" : "Average test log likelihood";

  std::ostringstream out;
  if (format == TableFormat::csv) {
    out << "dataset";
    for (const auto& col : columns) out << "," << col << " mean," << col << " se";
    out << "\n";
    for (const auto& row : rows) {
      out << row;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const DisplayCell cell = lookup(row, c);
        if (cell.present) {
          out << "," << full_precision(cell.mean) << "," << full_precision(cell.se);
        } else {
          out << ",,";
        }
      }
      out << "\n";
    }
    return out.str();
  }

  // Best mean per row at displayed precision; ties are all marked.
  auto best_display = [&](const std::string& row) -> std::optional<double> {
    std::optional<double> best;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const DisplayCell cell = lookup(row, c);
      if (!cell.present) continue;
      const double displayed = std::stod(two_decimals(cell.mean));
      if (!best || (kind == MetricKind::rmse ? displayed < *best : displayed > *best)) {
        best = displayed;
      }
    }
    return best;
  };

  if (format == TableFormat::markdown) {
    out << "**" << title << "** (mean \u00b1 standard error)\n\n";
    out << "| Dataset |";
    for (const auto& col : columns) out << " " << col << " |";
    out << "\n|---|";
    for (std::size_t c = 0; c < columns.size(); ++c) out << "---|";
    out << "\n";
    for (const auto& row : rows) {
      const auto best = best_display(row);
      out << "| " << row << " |";
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const DisplayCell cell = lookup(row, c);
        if (!cell.present) {
          out << " -- |";
          continue;
        }
        const bool bold = best && std::stod(two_decimals(cell.mean)) == *best;
        const std::string text = format_cell(cell.mean, cell.se);
        out << " " << (bold ? "**" + text + "**" : text) << " |";
      }
      out << "\n";
    }
    return out.str();
  }

  // LaTeX
  out << "% " << title << "\n";
  out << "\\begin{tabular}{l";
  for (std::size_t c = 0; c < columns.size(); ++c) out << "|c";
  out << "}\n\\toprule\nDataset";
  for (const auto& col : columns) out << " & " << col;
  out << " \\\\\n\\hline\n";
  for (const auto& row : rows) {
    const auto best = best_display(row);
    out << row;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const DisplayCell cell = lookup(row, c);
      if (!cell.present) {
        out << " & $--$";
        continue;
      }
      const bool bold = best && std::stod(two_decimals(cell.mean)) == *best;
      const std::string body = two_decimals(cell.mean) + " \\pm " + two_decimals(cell.se);
      out << " & $" << (bold ? "\\bm{" + body + "}" : body) << "$";
    }
    out << " \\\\\n";
  }
  out << "\\bottomrule\n\\end{tabular}\n";
  return out.str();
}

std::vector<ComparisonVerdict> compare_to_reference(const ExperimentResult& result,
                                                    const ReferenceTable& reference,
                                                    double k) {
  require(k > 0.0, "compare_to_reference: k must be positive");
  const std::string dataset = canonical_dataset_name(result.dataset);
  const std::string column = result_column_name(result.protocol.setting);

  std::vector<ComparisonVerdict> verdicts;
  for (MetricKind kind : {MetricKind::rmse, MetricKind::log_likelihood}) {
    const auto cell = reference.cell(dataset, column, kind);
    const std::string metric = kind == MetricKind::rmse ? "RMSE" : "LL";
    if (!cell || !cell->present) {
      throw Error("no reference cell for " + dataset + " / " + column + " / " + metric);
    }
    ComparisonVerdict v;
    v.cell_id = dataset + " " + metric + " " + column;
    v.ours_mean = kind == MetricKind::rmse ? result.aggregates.rmse_mean
                                           : result.aggregates.ll_mean;
    v.ours_se = kind == MetricKind::rmse ? result.aggregates.rmse_se
                                         : result.aggregates.ll_se;
    v.ref_mean = cell->mean;
    v.ref_se = cell->se;
    const double denom = std::max({v.ref_se, v.ours_se, 1e-12});
    v.deviation = std::abs(v.ours_mean - v.ref_mean) / denom;
    v.pass = v.deviation <= k;
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

std::string describe(const ComparisonVerdict& v) {
  std::ostringstream out;
  out << (v.pass ? "PASS" : "FAIL") << "  " << v.cell_id << ": ours "
      << format_cell(v.ours_mean, v.ours_se) << " vs reference "
      << format_cell(v.ref_mean, v.ref_se) << " (deviation " << two_decimals(v.deviation)
      << " combined-SE units)";
  return out.str();
}

}  // namespace ucibdl
