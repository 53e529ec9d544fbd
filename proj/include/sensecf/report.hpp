#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sensecf/augment.hpp"
#include "sensecf/cf_metrics.hpp"

namespace sensecf {

namespace detail {

inline std::string fixed(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline std::string cf_report_csv(const CfReport& report, const std::string& method) {
  std::string out = "method,validity,distance,sparsity,plausibility,failure_rate,pairs,failures\n";
  out += method + "," + detail::fixed(report.validity) + "," + detail::fixed(report.mean_distance) + "," +
         detail::fixed(report.mean_sparsity) + "," + detail::fixed(report.plausibility) + "," +
         detail::fixed(report.failure_rate) + "," + std::to_string(report.pair_count) + "," +
         std::to_string(report.failure_count) + "\n";
  return out;
}

inline std::string diversity_csv(const CfReport& report) {
  std::string out = "feature,diversity\n";
  for (const auto& [name, value] : report.diversity) out += name + "," + detail::fixed(value) + "\n";
  return out;
}

/// Human-readable summary; plausibility is shown as a percentage.
inline std::string cf_report_table(const CfReport& report, const std::string& method) {
  std::ostringstream out;
  out << "method        " << method << "\n"
      << "pairs         " << report.pair_count << " (+" << report.failure_count << " failed)\n"
      << "validity      " << detail::fixed(report.validity) << "\n"
      << "distance      " << detail::fixed(report.mean_distance) << "\n"
      << "sparsity      " << detail::fixed(report.mean_sparsity) << "\n"
      << "plausibility  " << detail::fixed(report.plausibility * 100.0, 1) << "%\n"
      << "failure rate  " << detail::fixed(report.failure_rate) << "\n";
  out << "diversity     ";
  bool first = true;
  for (const auto& [name, value] : report.diversity) {
    if (!first) out << ", ";
    out << name << "=" << detail::fixed(value, 3);
    first = false;
  }
  out << "\n";
  return out.str();
}

inline std::string experiment_csv(const ExperimentReport& report) {
  std::string out = "model,method,accuracy,precision,recall,f1,auc,error\n";
  for (const auto& cell : report.cells) {
    out += cell.model + "," + cell.method + ",";
    if (cell.report) {
      out += detail::fixed(cell.report->accuracy) + "," + detail::fixed(cell.report->precision) + "," +
             detail::fixed(cell.report->recall) + "," + detail::fixed(cell.report->f1) + "," +
             detail::fixed(cell.report->auc) + ",";
    } else {
      out += ",,,,,";
      out += cell.error;
    }
    out += "\n";
  }
  return out;
}

inline std::string experiment_markdown(const ExperimentReport& report) {
  std::ostringstream out;
  out << "| Model | Method | ACC | PRE | REC | F1 | AUC |\n";
  out << "|---|---|---|---|---|---|---|\n";
  std::string last_model;
  for (const auto& cell : report.cells) {
    const std::string shown = cell.model == last_model ? "" : cell.model;
    last_model = cell.model;
    out << "| " << shown << " | " << (cell.method == "none" ? "×" : cell.method) << " | ";
    if (cell.report) {
      out << detail::fixed(cell.report->accuracy) << " | " << detail::fixed(cell.report->precision) << " | "
          << detail::fixed(cell.report->recall) << " | " << detail::fixed(cell.report->f1) << " | "
          << detail::fixed(cell.report->auc) << " |\n";
    } else {
      out << "error: " << cell.error << " | | | | |\n";
    }
  }
  return out.str();
}

/// Generic CSV-to-markdown renderer for saved report files.
inline std::string csv_to_markdown(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::ostringstream out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    out << "|";
    for (const auto& c : cells) out << " " << c << " |";
    out << "\n";
    if (header) {
      out << "|";
      for (std::size_t i = 0; i < cells.size(); ++i) out << "---|";
      out << "\n";
      header = false;
    }
  }
  return out.str();
}

}  // namespace sensecf
