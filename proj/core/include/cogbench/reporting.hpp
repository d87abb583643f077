#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogbench/performance_io.hpp"

namespace cogbench::report {

// A requested factor index lies outside 1..retained_I.
class FactorIndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportOptions {
  std::filesystem::path analysis_dir;     // holds loadings.csv, eigenvalues.csv
  std::filesystem::path performance_csv;  // for clusters.csv
  std::filesystem::path out_dir;
  std::vector<int> fix = {1, 2};          // two fixed axes, 1-based
  std::vector<int> vary;                  // empty: every retained factor not in `fix`
  std::vector<std::string> labels;        // annotation per factor, may be shorter than I
};

struct ReportBundle {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> notices;
  int retained = 0;
};

// Mean of the throughput columns per radio, plus the mean of its policy
// cluster. Rows without a policy column form one cluster named "all".
struct ClusterRow {
  int radio_id = 0;
  std::string cluster;
  double aggregate_throughput = 0.0;
  double cluster_mean = 0.0;
};
std::vector<ClusterRow> cluster_summary(const harness::PerformanceTable& table);

// Emits clusters.csv, scree.csv and components_<i>_<j>_<k>.csv. clusters.csv
// needs s<id>_throughput columns and is skipped with a notice otherwise. Component
// files are skipped with a notice when fewer than three factors are
// retained; any explicitly requested index beyond retained_I throws
// FactorIndexError before anything is written.
ReportBundle make_report(const ReportOptions& options);

// Reads {"labels": [...]} or a bare array of strings.
std::vector<std::string> load_factor_labels(const std::filesystem::path& path);

}  // namespace cogbench::report
