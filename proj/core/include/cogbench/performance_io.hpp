#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cogbench/experiment_harness.hpp"

namespace cogbench::harness {

// A performance matrix as read back from CSV. Data columns keep their header
// names so analysis also works on matrices produced elsewhere.
struct PerformanceTable {
  std::vector<std::string> column_names;
  std::vector<radio::RadioSpec> radios;  // radio_id always set
  bool has_spec_fields = false;          // policy/sensors/accuracy/hw_delay present
  Eigen::MatrixXd values;
};

PerformanceTable to_table(const PerformanceMatrix& matrix);

// Parses "s<id>_<metric>".
std::optional<ColumnLabel> parse_column_label(const std::string& name);

// Header: radio_id,policy,sensors,accuracy,hw_delay,<column labels...>
void write_performance_csv(const std::filesystem::path& path, const PerformanceMatrix& matrix);

// Accepts any CSV whose first column is radio_id; policy, sensors, accuracy
// and hw_delay columns are recognized when present, everything else is data.
// Throws InputError on empty or non-numeric cells.
PerformanceTable read_performance_csv(const std::filesystem::path& path);

}  // namespace cogbench::harness
