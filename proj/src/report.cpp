#include "dollarex/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace dollarex {

BoundCheck check_upper_bound(double estimate, double se, double bound, double tolerance) {
  BoundCheck c;
  c.estimate = estimate;
  c.se = std::isnan(se) ? 0.0 : se;
  c.bound = bound;
  c.margin = bound + 3.0 * c.se + tolerance - estimate;
  c.pass = c.margin >= 0.0;
  return c;
}

void ExperimentReport::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("ExperimentReport: row width differs from header");
  rows.push_back(std::move(row));
}

std::size_t ExperimentReport::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("ExperimentReport: no column '" + name + "'");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

struct CsvCell {
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(double v) const { return format_double(v); }
  std::string operator()(const std::string& v) const { return v; }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
};

nlohmann::ordered_json to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
        }
        return v;
      },
      cell);
}

}  // namespace

void write_csv(const ExperimentReport& report, std::ostream& out) {
  for (std::size_t i = 0; i < report.columns.size(); ++i) out << (i ? "," : "") << report.columns[i];
  out << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << std::visit(CsvCell{}, row[i]);
    out << '\n';
  }
}

void write_json(const ExperimentReport& report, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["command"] = report.command;
  doc["metadata"] = report.metadata;
  doc["summary"] = report.summary;
  doc["passed"] = report.passed;
  auto& records = doc["records"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json rec;
    for (std::size_t i = 0; i < row.size(); ++i) rec[report.columns[i]] = to_json(row[i]);
    records.push_back(std::move(rec));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace dollarex
