#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cogbench/factor_analysis.hpp"

namespace cogbench::fa {

// Writes loadings.csv, eigenvalues.csv, scores.csv, residuals.csv and
// fa_report.json into `dir`. `column_names` and `row_ids` describe the input
// matrix handed to analyze(); dropped columns are reported by name.
void write_analysis(const std::filesystem::path& dir, const Analysis& analysis,
                    const std::vector<std::string>& column_names,
                    const std::vector<int>& row_ids, double retention);

// loadings.csv read back: variable names and the F1..FI block.
struct LoadingsFile {
  std::vector<std::string> variables;
  Eigen::MatrixXd loadings;
};
LoadingsFile read_loadings(const std::filesystem::path& path);

struct EigenvaluesFile {
  Eigen::VectorXd values;
  std::vector<bool> retained;
};
EigenvaluesFile read_eigenvalues(const std::filesystem::path& path);

// Factor header name, 1-based: "F1", "F2", ...
std::string factor_name(int index);

}  // namespace cogbench::fa
