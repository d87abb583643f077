#include "cogbench/experiment_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "cogbench/errors.hpp"

namespace cogbench::harness {

RepTotals run_rep(const radio::RadioSpec& spec, const env::Scenario& scenario, int rep,
                  std::uint64_t master_seed, const policy::PolicyParams& params) {
  auto streams = rep_streams(master_seed, spec.radio_id, scenario.scenario_id, rep);
  const policy::PolicySetup setup{scenario.channel_count(), spec.sensors, scenario.horizon, params};
  auto learner = policy::make_policy(spec.policy, setup);

  RepTotals totals;
  env::ChannelState truth;
  std::optional<int> prev_action;
  for (std::int64_t t = 0; t < scenario.horizon; ++t) {
    env::advance(scenario, truth, streams.environment);
    const auto outcome = radio::run_slot(spec, *learner, scenario, truth, prev_action,
                                         streams.policy, streams.radio);
    totals.throughput += outcome.throughput;
    totals.delay += outcome.delay;
    totals.violations += outcome.violation;
    totals.exhausted_slots += outcome.overhead_exhausted;
  }
  return totals;
}

CellResult run_cell(const radio::RadioSpec& spec, const env::Scenario& scenario, int reps,
                    std::uint64_t master_seed, const policy::PolicyParams& params) {
  if (reps < 1) throw ContractViolation("run_cell: reps must be >= 1");
  const double horizon = static_cast<double>(scenario.horizon);

  CellResult cell;
  cell.reps = reps;
  double sum_tp = 0.0, sum_tp_sq = 0.0, sum_delay = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto totals = run_rep(spec, scenario, rep, master_seed, params);
    const double tp = totals.throughput / horizon;
    sum_tp += tp;
    sum_tp_sq += tp * tp;
    sum_delay += totals.delay / horizon;
    cell.violations += totals.violations;
    cell.exhausted_slots += totals.exhausted_slots;
  }
  cell.mean.throughput = sum_tp / reps;
  cell.mean.delay = sum_delay / reps;
  cell.mean.violation = static_cast<double>(cell.violations) / (horizon * reps);
  if (reps > 1) {
    const double var = (sum_tp_sq - sum_tp * sum_tp / reps) / (reps - 1);
    cell.throughput_rep_sd = std::sqrt(std::max(0.0, var));
  }
  return cell;
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::kThroughput: return "throughput";
    case Metric::kDelay: return "delay";
    case Metric::kViolation: return "violation";
  }
  return "?";
}

std::string ColumnLabel::name() const {
  return "s" + std::to_string(scenario_id) + "_" + std::string(to_string(metric));
}

PerformanceMatrix assemble(const std::vector<radio::RadioSpec>& radios,
                           std::vector<int> scenario_ids, const CellMap& cells) {
  std::sort(scenario_ids.begin(), scenario_ids.end());
  PerformanceMatrix pm;
  pm.radios = radios;
  for (int sid : scenario_ids) {
    for (Metric m : {Metric::kThroughput, Metric::kDelay, Metric::kViolation})
      pm.columns.push_back({sid, m});
  }
  pm.values.resize(static_cast<Eigen::Index>(radios.size()),
                   static_cast<Eigen::Index>(pm.columns.size()));

  std::string missing;
  std::size_t gaps = 0;
  for (std::size_t r = 0; r < radios.size(); ++r) {
    for (std::size_t k = 0; k < scenario_ids.size(); ++k) {
      auto it = cells.find({radios[r].radio_id, scenario_ids[k]});
      if (it == cells.end()) {
        if (gaps++ < 20) {
          missing += " (radio " + std::to_string(radios[r].radio_id) + ", scenario " +
                     std::to_string(scenario_ids[k]) + ")";
        }
        continue;
      }
      const auto row = static_cast<Eigen::Index>(r);
      const auto col = static_cast<Eigen::Index>(3 * k);
      pm.values(row, col) = it->second.throughput;
      pm.values(row, col + 1) = it->second.delay;
      pm.values(row, col + 2) = it->second.violation;
    }
  }
  if (gaps > 0) {
    throw AssemblyError("performance grid has " + std::to_string(gaps) +
                        " missing cell(s):" + missing + (gaps > 20 ? " ..." : ""));
  }
  return pm;
}

int default_thread_count() {
  if (const char* env = std::getenv("COGBENCH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

GridResult run_grid(const std::vector<radio::RadioSpec>& radios,
                    const std::vector<env::Scenario>& scenarios, const GridOptions& options) {
  std::vector<const env::Scenario*> ordered;
  for (const auto& sc : scenarios) ordered.push_back(&sc);
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return a->scenario_id < b->scenario_id; });

  const std::size_t total = radios.size() * ordered.size();
  std::vector<CellResult> results(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        const auto& spec = radios[i / ordered.size()];
        const auto& sc = *ordered[i % ordered.size()];
        results[i] = run_cell(spec, sc, options.reps, options.master_seed, options.params);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
      const std::size_t finished = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(finished, total);
      }
    }
  };

  const int threads = std::max(
      1, std::min<int>(options.threads > 0 ? options.threads : default_thread_count(),
                       static_cast<int>(std::max<std::size_t>(total, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  CellMap cells;
  std::vector<int> ids;
  for (const auto* sc : ordered) ids.push_back(sc->scenario_id);
  for (std::size_t i = 0; i < total; ++i) {
    cells[{radios[i / ordered.size()].radio_id, ordered[i % ordered.size()]->scenario_id}] =
        results[i].mean;
  }
  return {assemble(radios, ids, cells), std::move(results)};
}

}  // namespace cogbench::harness
