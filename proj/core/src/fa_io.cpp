#include "cogbench/fa_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "cogbench/csv.hpp"
#include "cogbench/errors.hpp"

namespace cogbench::fa {

std::string factor_name(int index) { return "F" + std::to_string(index); }

void write_analysis(const std::filesystem::path& dir, const Analysis& analysis,
                    const std::vector<std::string>& column_names,
                    const std::vector<int>& row_ids, double retention) {
  const auto& corr = analysis.corr;
  if (column_names.size() != corr.stats.size())
    throw ContractViolation("write_analysis: column name count differs from the input matrix");
  if (static_cast<Eigen::Index>(row_ids.size()) != analysis.scores.rows())
    throw ContractViolation("write_analysis: row id count differs from the score rows");
  std::filesystem::create_directories(dir);
  const int k = static_cast<int>(analysis.loadings.cols());
  std::vector<std::string> kept_names;
  for (auto c : corr.kept) kept_names.push_back(column_names[c]);

  csv::Table loadings;
  loadings.header = {"variable"};
  for (int j = 1; j <= k; ++j) loadings.header.push_back(factor_name(j));
  loadings.header.insert(loadings.header.end(), {"g", "communality", "uniqueness"});
  const Eigen::VectorXd h2 = analysis.loadings.rowwise().squaredNorm();
  for (std::size_t i = 0; i < kept_names.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<std::string> row = {kept_names[i]};
    for (int j = 0; j < k; ++j) row.push_back(csv::format_number(analysis.loadings(r, j)));
    row.push_back(csv::format_number(analysis.g_loadings(r)));
    row.push_back(csv::format_number(h2(r)));
    row.push_back(csv::format_number(analysis.model.gamma2(r)));
    loadings.rows.push_back(std::move(row));
  }
  csv::write(dir / "loadings.csv", loadings);

  csv::Table eig;
  eig.header = {"index", "eigenvalue", "retained"};
  for (Eigen::Index i = 0; i < analysis.model.eigenvalues.size(); ++i) {
    eig.rows.push_back({std::to_string(i + 1), csv::format_number(analysis.model.eigenvalues(i)),
                        i < analysis.model.retained ? "1" : "0"});
  }
  csv::write(dir / "eigenvalues.csv", eig);

  csv::Table sc;
  sc.header = {"radio_id"};
  for (int j = 1; j <= k; ++j) sc.header.push_back(factor_name(j));
  sc.header.push_back("g");
  for (std::size_t i = 0; i < row_ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<std::string> row = {std::to_string(row_ids[i])};
    for (int j = 0; j < k; ++j) row.push_back(csv::format_number(analysis.scores(r, j)));
    row.push_back(csv::format_number(analysis.g_score(r)));
    sc.rows.push_back(std::move(row));
  }
  csv::write(dir / "scores.csv", sc);

  csv::Table res;
  res.header = {"variable"};
  res.header.insert(res.header.end(), kept_names.begin(), kept_names.end());
  for (std::size_t i = 0; i < kept_names.size(); ++i) {
    std::vector<std::string> row = {kept_names[i]};
    for (std::size_t j = 0; j < kept_names.size(); ++j)
      row.push_back(csv::format_number(
          analysis.model.residual(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    res.rows.push_back(std::move(row));
  }
  csv::write(dir / "residuals.csv", res);

  nlohmann::ordered_json report;
  report["method"] = to_string(analysis.model.method);
  report["rotation"] = to_string(analysis.rotation);
  report["retention"] = retention;
  report["retained_I"] = analysis.model.retained;
  report["converged"] = analysis.model.converged;
  report["iterations"] = analysis.model.iterations;
  report["heywood_clamps"] = analysis.model.heywood_clamps;
  report["rmsr"] = analysis.rmsr;
  report["explained_variance"] = analysis.explained;
  report["variables"] = kept_names.size();
  report["observations"] = row_ids.size();
  auto dropped = nlohmann::ordered_json::array();
  for (auto c : corr.dropped) dropped.push_back(column_names[c]);
  report["dropped_columns"] = dropped;
  std::ofstream out(dir / "fa_report.json", std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write fa_report.json in '" + dir.string() + "'");
  out << report.dump(2) << '\n';
}

LoadingsFile read_loadings(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  std::vector<std::size_t> cols;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    if (table.header[c] == factor_name(static_cast<int>(cols.size()) + 1)) cols.push_back(c);
  }
  LoadingsFile out;
  out.loadings.resize(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out.variables.push_back(table.rows[r][0]);
    for (std::size_t j = 0; j < cols.size(); ++j)
      out.loadings(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          csv::parse_number(table.rows[r][cols[j]], "loadings.csv " + table.header[cols[j]]);
  }
  return out;
}

EigenvaluesFile read_eigenvalues(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 3 || table.header[1] != "eigenvalue" || table.header[2] != "retained")
    throw InputError("'" + path.string() + "' is not an eigenvalues file");
  EigenvaluesFile out;
  out.values.resize(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out.values(static_cast<Eigen::Index>(r)) = csv::parse_number(table.rows[r][1], "eigenvalue");
    out.retained.push_back(table.rows[r][2] == "1");
  }
  return out;
}

}  // namespace cogbench::fa
