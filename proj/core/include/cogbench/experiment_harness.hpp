#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cogbench/access_policies.hpp"
#include "cogbench/radio_model.hpp"
#include "cogbench/spectrum_env.hpp"

namespace cogbench::harness {

struct MetricsTriple {
  double throughput = 0.0;  // mean per-slot throughput
  double delay = 0.0;       // mean per-slot delay
  double violation = 0.0;   // violations / horizon

  bool operator==(const MetricsTriple&) const = default;
};

struct CellResult {
  MetricsTriple mean;             // averaged over reps and slots
  double throughput_rep_sd = 0.0; // spread of per-rep mean throughput
  std::int64_t violations = 0;    // total over all reps
  std::int64_t exhausted_slots = 0;
  int reps = 0;
};

// Metrics of one repetition, seeded from
// hash64({master_seed, radio_id, scenario_id, rep}).
struct RepTotals {
  double throughput = 0.0;
  double delay = 0.0;
  std::int64_t violations = 0;
  std::int64_t exhausted_slots = 0;
};

RepTotals run_rep(const radio::RadioSpec& spec, const env::Scenario& scenario, int rep,
                  std::uint64_t master_seed, const policy::PolicyParams& params);

CellResult run_cell(const radio::RadioSpec& spec, const env::Scenario& scenario, int reps,
                    std::uint64_t master_seed, const policy::PolicyParams& params = {});

enum class Metric { kThroughput = 0, kDelay = 1, kViolation = 2 };

std::string_view to_string(Metric metric) noexcept;

struct ColumnLabel {
  int scenario_id = 0;
  Metric metric = Metric::kThroughput;

  // "s<id>_<metric>", e.g. "s3_delay".
  std::string name() const;
  bool operator==(const ColumnLabel&) const = default;
};

// N radios x 3K columns, scenario-major, metric-minor (y1, y2, y3).
struct PerformanceMatrix {
  Eigen::MatrixXd values;
  std::vector<radio::RadioSpec> radios;
  std::vector<ColumnLabel> columns;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

using CellMap = std::map<std::pair<int, int>, MetricsTriple>;  // (radio_id, scenario_id)

// Rows follow `radios`, columns follow ascending scenario_id. Throws
// AssemblyError naming every missing (radio, scenario) pair.
PerformanceMatrix assemble(const std::vector<radio::RadioSpec>& radios,
                           std::vector<int> scenario_ids, const CellMap& cells);

struct GridOptions {
  int reps = 200;
  std::uint64_t master_seed = 0;
  policy::PolicyParams params;
  int threads = 0;  // 0: COGBENCH_THREADS or hardware concurrency
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct GridResult {
  PerformanceMatrix matrix;
  // Row-major over (radio, scenario) in matrix order.
  std::vector<CellResult> cells;

  const CellResult& cell(std::size_t radio_row, std::size_t scenario_col) const {
    return cells[radio_row * (matrix.columns.size() / 3) + scenario_col];
  }
};

// Runs every radio on every scenario. Cells execute in any order on a
// worker pool; the result does not depend on the thread count.
GridResult run_grid(const std::vector<radio::RadioSpec>& radios,
                    const std::vector<env::Scenario>& scenarios, const GridOptions& options);

// COGBENCH_THREADS if set and positive, else hardware concurrency (>= 1).
int default_thread_count();

}  // namespace cogbench::harness
