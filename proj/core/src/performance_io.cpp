#include "cogbench/performance_io.hpp"

#include <charconv>

#include "cogbench/csv.hpp"
#include "cogbench/errors.hpp"

namespace cogbench::harness {

PerformanceTable to_table(const PerformanceMatrix& matrix) {
  PerformanceTable table;
  for (const auto& label : matrix.columns) table.column_names.push_back(label.name());
  table.radios = matrix.radios;
  table.has_spec_fields = true;
  table.values = matrix.values;
  return table;
}

std::optional<ColumnLabel> parse_column_label(const std::string& name) {
  if (name.size() < 3 || name[0] != 's') return std::nullopt;
  const auto underscore = name.find('_');
  if (underscore == std::string::npos) return std::nullopt;
  int id = 0;
  const auto* first = name.data() + 1;
  const auto* last = name.data() + underscore;
  auto [ptr, ec] = std::from_chars(first, last, id);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  const std::string metric = name.substr(underscore + 1);
  for (Metric m : {Metric::kThroughput, Metric::kDelay, Metric::kViolation}) {
    if (metric == to_string(m)) return ColumnLabel{id, m};
  }
  return std::nullopt;
}

void write_performance_csv(const std::filesystem::path& path, const PerformanceMatrix& matrix) {
  csv::Table table;
  table.header = {"radio_id", "policy", "sensors", "accuracy", "hw_delay"};
  for (const auto& label : matrix.columns) table.header.push_back(label.name());
  for (std::size_t r = 0; r < matrix.radios.size(); ++r) {
    const auto& spec = matrix.radios[r];
    std::vector<std::string> row = {std::to_string(spec.radio_id),
                                    std::string(policy::to_string(spec.policy)),
                                    std::to_string(spec.sensors), csv::format_number(spec.accuracy),
                                    csv::format_number(spec.hw_delay)};
    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c)
      row.push_back(csv::format_number(matrix.values(static_cast<Eigen::Index>(r), c)));
    table.rows.push_back(std::move(row));
  }
  csv::write(path, table);
}

PerformanceTable read_performance_csv(const std::filesystem::path& path) {
  const auto raw = csv::read(path);
  if (raw.header.empty() || raw.header[0] != "radio_id")
    throw InputError("'" + path.string() + "': first column must be radio_id");
  if (raw.rows.empty()) throw InputError("'" + path.string() + "' has no data rows");

  int policy_col = -1, sensors_col = -1, accuracy_col = -1, hw_col = -1;
  std::vector<int> data_cols;
  PerformanceTable table;
  for (std::size_t c = 1; c < raw.header.size(); ++c) {
    const auto& h = raw.header[c];
    const int ci = static_cast<int>(c);
    if (h == "policy") policy_col = ci;
    else if (h == "sensors") sensors_col = ci;
    else if (h == "accuracy") accuracy_col = ci;
    else if (h == "hw_delay") hw_col = ci;
    else {
      data_cols.push_back(ci);
      table.column_names.push_back(h);
    }
  }
  if (data_cols.empty()) throw InputError("'" + path.string() + "' has no data columns");
  table.has_spec_fields = policy_col >= 0 && sensors_col >= 0 && accuracy_col >= 0 && hw_col >= 0;

  table.values.resize(static_cast<Eigen::Index>(raw.rows.size()),
                      static_cast<Eigen::Index>(data_cols.size()));
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto& row = raw.rows[r];
    const std::string where = path.filename().string() + " row " + std::to_string(r + 2);
    radio::RadioSpec spec;
    spec.radio_id = static_cast<int>(csv::parse_number(row[0], where + " radio_id"));
    if (table.has_spec_fields) {
      auto kind = policy::parse_policy(row[static_cast<std::size_t>(policy_col)]);
      if (!kind) throw InputError(where + ": unknown policy '" + row[policy_col] + "'");
      spec.policy = *kind;
      spec.sensors = static_cast<int>(csv::parse_number(row[sensors_col], where + " sensors"));
      spec.accuracy = csv::parse_number(row[accuracy_col], where + " accuracy");
      spec.hw_delay = csv::parse_number(row[hw_col], where + " hw_delay");
    }
    table.radios.push_back(spec);
    for (std::size_t j = 0; j < data_cols.size(); ++j) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          csv::parse_number(row[static_cast<std::size_t>(data_cols[j])],
                            where + " column " + table.column_names[j]);
    }
  }
  return table;
}

}  // namespace cogbench::harness
