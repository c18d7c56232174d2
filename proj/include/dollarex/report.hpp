#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace dollarex {

// Missing values (e.g. an absent standard error) are stored as NaN and
// written as an empty CSV field / JSON null.
using Cell = std::variant<std::int64_t, double, std::string, bool>;

// Outcome of comparing an estimate against an upper bound: the estimate may
// exceed the bound by at most three standard errors (plus `tolerance`).
struct BoundCheck {
  double estimate = 0.0;
  double se = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound + 3 se + tolerance - estimate
  bool pass = false;
};

BoundCheck check_upper_bound(double estimate, double se, double bound, double tolerance = 0.0);

struct ExperimentReport {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  bool passed = true;  // false when any non-informative check failed

  void add_row(std::vector<Cell> row);
  // Index of a column by name; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
};

// 17 significant digits, empty for NaN.
std::string format_double(double value);

void write_csv(const ExperimentReport& report, std::ostream& out);
void write_json(const ExperimentReport& report, std::ostream& out);

}  // namespace dollarex
