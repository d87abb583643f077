#include "cogbench/reporting.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cogbench/csv.hpp"
#include "cogbench/errors.hpp"
#include "cogbench/fa_io.hpp"

namespace cogbench::report {
namespace {

void check_index(int index, int retained, const char* role) {
  if (index < 1 || index > retained) {
    throw FactorIndexError(std::string(role) + " factor index " + std::to_string(index) +
                           " outside 1.." + std::to_string(retained));
  }
}

}  // namespace

std::vector<ClusterRow> cluster_summary(const harness::PerformanceTable& table) {
  std::vector<Eigen::Index> throughput_cols;
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    auto label = harness::parse_column_label(table.column_names[c]);
    if (label && label->metric == harness::Metric::kThroughput)
      throughput_cols.push_back(static_cast<Eigen::Index>(c));
  }
  if (throughput_cols.empty()) throw InputError("performance matrix has no *_throughput columns");

  std::vector<ClusterRow> rows;
  std::map<std::string, std::pair<double, int>> sums;
  for (std::size_t r = 0; r < table.radios.size(); ++r) {
    ClusterRow row;
    row.radio_id = table.radios[r].radio_id;
    row.cluster = table.has_spec_fields ? std::string(policy::to_string(table.radios[r].policy)) : "all";
    double total = 0.0;
    for (auto c : throughput_cols) total += table.values(static_cast<Eigen::Index>(r), c);
    row.aggregate_throughput = total / static_cast<double>(throughput_cols.size());
    auto& s = sums[row.cluster];
    s.first += row.aggregate_throughput;
    s.second += 1;
    rows.push_back(row);
  }
  for (auto& row : rows) {
    const auto& s = sums[row.cluster];
    row.cluster_mean = s.first / s.second;
  }
  return rows;
}

ReportBundle make_report(const ReportOptions& options) {
  const auto loadings = fa::read_loadings(options.analysis_dir / "loadings.csv");
  const auto eig = fa::read_eigenvalues(options.analysis_dir / "eigenvalues.csv");
  ReportBundle bundle;
  bundle.retained = static_cast<int>(loadings.loadings.cols());
  const int k = bundle.retained;

  // Validate every requested axis before writing.
  const bool explicit_vary = !options.vary.empty();
  bool components = k >= 3;
  if (explicit_vary || k >= 3) {
    if (options.fix.size() != 2) throw ContractViolation("exactly two fixed factors are required");
    if (options.fix[0] == options.fix[1]) throw ContractViolation("fixed factors must differ");
  }
  if (explicit_vary) {
    for (int f : options.fix) check_index(f, k, "fixed");
    for (int v : options.vary) check_index(v, k, "varied");
  } else if (components) {
    for (int f : options.fix) check_index(f, k, "fixed");
  }
  std::vector<int> vary = options.vary;
  if (!explicit_vary && components) {
    for (int f = 1; f <= k; ++f)
      if (f != options.fix[0] && f != options.fix[1]) vary.push_back(f);
  }
  if (explicit_vary && k < 3) components = false;

  std::filesystem::create_directories(options.out_dir);
  const auto perf = harness::read_performance_csv(options.performance_csv);
  const bool has_throughput =
      std::any_of(perf.column_names.begin(), perf.column_names.end(), [](const std::string& name) {
        const auto label = harness::parse_column_label(name);
        return label && label->metric == harness::Metric::kThroughput;
      });
  if (has_throughput) {
    csv::Table clusters;
    clusters.header = {"radio_id", "cluster", "aggregate_throughput", "cluster_mean"};
    for (const auto& row : cluster_summary(perf)) {
      clusters.rows.push_back({std::to_string(row.radio_id), row.cluster,
                               csv::format_number(row.aggregate_throughput),
                               csv::format_number(row.cluster_mean)});
    }
    csv::write(options.out_dir / "clusters.csv", clusters);
    bundle.written.push_back(options.out_dir / "clusters.csv");
  } else {
    bundle.notices.push_back("clusters.csv skipped: no s<id>_throughput columns in " +
                             options.performance_csv.string());
  }

  csv::Table scree;
  scree.header = {"index", "eigenvalue", "retained", "label"};
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const bool kept = eig.retained[static_cast<std::size_t>(i)];
    std::string label;
    if (kept && static_cast<std::size_t>(i) < options.labels.size())
      label = options.labels[static_cast<std::size_t>(i)];
    scree.rows.push_back({std::to_string(i + 1), csv::format_number(eig.values(i)),
                          kept ? "1" : "0", label});
  }
  csv::write(options.out_dir / "scree.csv", scree);
  bundle.written.push_back(options.out_dir / "scree.csv");

  if (!components) {
    bundle.notices.push_back("component plots skipped: " + std::to_string(k) +
                             " retained factor(s), at least 3 needed");
    return bundle;
  }
  auto axis_label = [&](int f) {
    const auto idx = static_cast<std::size_t>(f - 1);
    return idx < options.labels.size() ? options.labels[idx] : std::string();
  };
  for (int v : vary) {
    const int axes[3] = {options.fix[0], options.fix[1], v};
    csv::Table comp;
    comp.header = {"variable"};
    for (int a : axes) comp.header.push_back(fa::factor_name(a));
    for (std::size_t r = 0; r < loadings.variables.size(); ++r) {
      std::vector<std::string> row = {loadings.variables[r]};
      for (int a : axes)
        row.push_back(csv::format_number(loadings.loadings(static_cast<Eigen::Index>(r), a - 1)));
      comp.rows.push_back(std::move(row));
    }
    std::ostringstream name;
    name << "components_" << axes[0] << '_' << axes[1] << '_' << axes[2] << ".csv";
    csv::write(options.out_dir / name.str(), comp);
    bundle.written.push_back(options.out_dir / name.str());
    if (!axis_label(v).empty()) bundle.notices.push_back(name.str() + ": varies " + axis_label(v));
  }
  return bundle;
}

std::vector<std::string> load_factor_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("factor labels: ") + e.what());
  }
  const nlohmann::json& list = doc.is_object() && doc.contains("labels") ? doc["labels"] : doc;
  if (!list.is_array()) throw ConfigError("factor labels must be an array of strings", "/labels");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!list[i].is_string())
      throw ConfigError("factor label must be a string", "/labels/" + std::to_string(i));
    out.push_back(list[i].get<std::string>());
  }
  return out;
}

}  // namespace cogbench::report
