// Acceptance runner: prints one PASS/FAIL line per criterion C1..C10 and
// exits nonzero if any criterion fails. Heavy simulation results are shared
// between criteria; everything is seeded, so reruns print the same numbers
// (runtimes aside).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../../tools/cli.hpp"
#include "cogbench/access_policies.hpp"
#include "cogbench/experiment_harness.hpp"
#include "cogbench/factor_analysis.hpp"
#include "cogbench/radio_model.hpp"
#include "cogbench/run_config.hpp"
#include "cogbench/scenario_io.hpp"
#include "cogbench/varimax.hpp"
#include "oracles.hpp"
#include "policy_checks.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cogbench;
using policy::PolicyKind;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Shared full-grid run (T = 2000, R = 200).

struct FullGrid {
  harness::GridResult grid;
  double seconds = 0.0;
};

std::vector<env::Scenario> default_scenarios(std::uint64_t seed) {
  return env::load_scenarios(cli::default_scenario_file(), {seed, std::nullopt});
}

const FullGrid& full_grid() {
  static std::optional<FullGrid> cached;
  if (cached) return *cached;
  const auto cfg = cli::default_run_config();
  const auto scenarios = default_scenarios(cfg.master_seed);
  const auto radios = radio::enumerate_grid(cfg.axes);
  harness::GridOptions go;
  go.reps = 200;
  go.master_seed = cfg.master_seed;
  go.params = cfg.params;
  std::size_t last = 0;
  go.progress = [&](std::size_t done, std::size_t total) {
    const std::size_t decile = done * 10 / total;
    if (decile != last) {
      last = decile;
      std::cerr << "  full grid " << decile * 10 << "%\n";
    }
  };
  const auto start = Clock::now();
  FullGrid fg{harness::run_grid(radios, scenarios, go), 0.0};
  fg.seconds = seconds_since(start);
  cached = std::move(fg);
  return *cached;
}

// Mean over a radio's throughput columns.
double aggregate_throughput(const harness::PerformanceMatrix& pm, Eigen::Index row) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t c = 0; c < pm.columns.size(); ++c) {
    if (pm.columns[c].metric != harness::Metric::kThroughput) continue;
    sum += pm.values(row, static_cast<Eigen::Index>(c));
    ++n;
  }
  return sum / n;
}

// Cluster mean of aggregate throughput over every radio matching `pred`.
double cluster_mean(const harness::PerformanceMatrix& pm,
                    const std::function<bool(const radio::RadioSpec&)>& pred) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t r = 0; r < pm.radios.size(); ++r) {
    if (!pred(pm.radios[r])) continue;
    sum += aggregate_throughput(pm, static_cast<Eigen::Index>(r));
    ++n;
  }
  return n ? sum / n : std::nan("");
}

double policy_mean(const harness::PerformanceMatrix& pm, PolicyKind kind) {
  return cluster_mean(pm, [kind](const radio::RadioSpec& s) { return s.policy == kind; });
}

// ---------------------------------------------------------------------------

Verdict c1() {
  auto cfg = cli::default_run_config();
  cfg.axes.accuracies = {1.0};
  const auto scenarios = default_scenarios(cfg.master_seed);
  const auto radios = radio::enumerate_grid(cfg.axes);
  harness::GridOptions go;
  go.reps = 50;
  go.master_seed = cfg.master_seed;
  go.params = cfg.params;
  const auto start = Clock::now();
  const auto grid = harness::run_grid(radios, scenarios, go);
  const double secs = seconds_since(start);
  std::int64_t violations = 0;
  for (const auto& cell : grid.cells) violations += cell.violations;
  const bool horizon_ok = std::all_of(scenarios.begin(), scenarios.end(),
                                      [](const env::Scenario& s) { return s.horizon == 2000; });
  Verdict v;
  v.pass = violations == 0 && secs < 120.0 && radios.size() == 48 && scenarios.size() == 18 && horizon_ok;
  v.detail = "violations = " + std::to_string(violations) + " over " + std::to_string(radios.size()) +
             " radios x " + std::to_string(scenarios.size()) + " scenarios x 50 reps; " +
             fmt("%.1f s (limit 120 s)", secs);
  return v;
}

Verdict c2() {
  const auto& fg = full_grid();
  const auto& pm = fg.grid.matrix;
  const double ucb = policy_mean(pm, PolicyKind::kUcb1);
  const double exp3 = policy_mean(pm, PolicyKind::kExp3);
  const double rnd = policy_mean(pm, PolicyKind::kRandom);
  // Separation relative to the larger of the adjacent pair.
  const double s1 = (ucb - exp3) / ucb;
  const double s2 = (exp3 - rnd) / exp3;
  Verdict v;
  v.pass = s1 >= 0.05 && s2 >= 0.05 && fg.seconds < 600.0;
  v.detail = "UCB1 " + fmt("%.4f", ucb) + " > EXP3 " + fmt("%.4f", exp3) + " > RANDOM " + fmt("%.4f", rnd) +
             "; separations " + fmt("%.1f%%", 100 * s1) + ", " + fmt("%.1f%%", 100 * s2) +
             " (>= 5%); grid " + fmt("%.0f s (limit 600 s)", fg.seconds);
  return v;
}

Verdict c3() {
  const auto& fg = full_grid();
  const auto& pm = fg.grid.matrix;
  const std::size_t k = pm.columns.size() / 3;
  Verdict v{true, ""};
  for (PolicyKind kind : {PolicyKind::kUcb1, PolicyKind::kExp3, PolicyKind::kPola, PolicyKind::kProla,
                          PolicyKind::kQLearn}) {
    // Mean throughput per m and the Monte-Carlo standard error of that mean.
    std::map<int, std::pair<double, double>> stats;
    for (int m : {1, 2, 6}) {
      double sum = 0.0, var = 0.0;
      int n = 0;
      for (std::size_t r = 0; r < pm.radios.size(); ++r) {
        if (pm.radios[r].policy != kind || pm.radios[r].sensors != m) continue;
        for (std::size_t s = 0; s < k; ++s) {
          const auto& cell = fg.grid.cell(r, s);
          sum += cell.mean.throughput;
          var += cell.throughput_rep_sd * cell.throughput_rep_sd / cell.reps;
          ++n;
        }
      }
      stats[m] = {sum / n, std::sqrt(var) / n};
    }
    const auto gap = [&](int hi, int lo) {
      const double d = stats[hi].first - stats[lo].first;
      const double se = std::hypot(stats[hi].second, stats[lo].second);
      return std::pair{d, se};
    };
    const auto [d62, se62] = gap(6, 2);
    const auto [d21, se21] = gap(2, 1);
    const bool ok = d62 >= -se62 && d21 >= -se21;
    v.pass = v.pass && ok;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + std::string(policy::to_string(kind)) + " " +
                fmt("%.4f", stats[1].first) + "/" + fmt("%.4f", stats[2].first) + "/" +
                fmt("%.4f", stats[6].first) + (ok ? "" : " [violated]");
  }
  v.detail = "m=1/2/6: " + v.detail;
  return v;
}

Verdict c4() {
  const auto& pm = full_grid().grid.matrix;
  // (policy, m, hw) -> accuracy -> aggregate throughput
  std::map<std::tuple<int, int, double>, std::map<double, double>> groups;
  for (std::size_t r = 0; r < pm.radios.size(); ++r) {
    const auto& s = pm.radios[r];
    groups[{static_cast<int>(s.policy), s.sensors, s.hw_delay}][s.accuracy] =
        aggregate_throughput(pm, static_cast<Eigen::Index>(r));
  }
  int ok = 0;
  std::string worst;
  double worst_margin = 1e300;
  for (const auto& [key, by_acc] : groups) {
    const double a10 = by_acc.at(1.0), a09 = by_acc.at(0.9), a08 = by_acc.at(0.8);
    const double margin = std::min(a10 - a09, a09 - a08);
    if (a10 > a09 && a09 > a08) ++ok;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst = std::string(policy::to_string(static_cast<PolicyKind>(std::get<0>(key)))) +
              " m=" + std::to_string(std::get<1>(key)) + " hw=" + fmt("%g", std::get<2>(key));
    }
  }
  Verdict v;
  v.pass = ok == static_cast<int>(groups.size());
  v.detail = std::to_string(ok) + "/" + std::to_string(groups.size()) +
             " (policy, m, hw) cells strictly ordered 1.0 > 0.9 > 0.8; smallest step " +
             fmt("%.4f", worst_margin) + " at " + worst;
  return v;
}

Verdict c5() {
  const auto& pm = full_grid().grid.matrix;
  const double exp3 = policy_mean(pm, PolicyKind::kExp3);
  const double prola = policy_mean(pm, PolicyKind::kProla);
  const double pola = policy_mean(pm, PolicyKind::kPola);
  const double rel = std::abs(prola - exp3) / exp3;
  const double floor = std::min(prola, exp3);
  const double below = (floor - pola) / floor;
  Verdict v;
  v.pass = rel <= 0.10 && below >= 0.05;
  v.detail = "PROLA " + fmt("%.4f", prola) + " vs EXP3 " + fmt("%.4f", exp3) + " differ " +
             fmt("%.1f%%", 100 * rel) + " (<= 10%); POLA " + fmt("%.4f", pola) + " is " +
             fmt("%.1f%%", 100 * below) + " below min (>= 5%)";
  return v;
}

Verdict c6() {
  const auto start = Clock::now();
  Verdict v{true, ""};

  const auto regret = testing::ucb1_regret({1000, 10000}, 200, 606);
  const double r1 = regret[0] / 1000.0, r2 = regret[1] / 10000.0;
  const bool ucb_ok = r2 < 0.5 * r1;
  v.detail += "UCB1 regret/t " + fmt("%.4f", r1) + " -> " + fmt("%.5f", r2) + (ucb_ok ? "" : " [not sublinear]");

  double worst_bias = 0.0;
  for (int width : {1, 2}) {
    const auto check = testing::exp3_estimator({0.8, 0.5, 0.2}, width, 0.1, 1'000'000, 607 + width);
    for (std::size_t c = 0; c < check.truth.size(); ++c)
      worst_bias = std::max(worst_bias, std::abs(check.estimate[c] - check.truth[c]));
  }
  const bool exp3_ok = worst_bias <= 0.01;
  v.detail += "; EXP3 max |bias| " + fmt("%.4f", worst_bias) + " (<= 0.01)";

  Stream rng(608);
  int instances = 0;
  double worst_lp = 0.0;
  for (int c = 1; c <= 5; ++c) {
    const int steps = c <= 3 ? 1000 : 100;
    const int trials = c <= 3 ? 20 : 5;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> q(static_cast<std::size_t>(c));
      for (double& x : q) x = rng.uniform();
      const double eps = 0.05 + 0.9 * rng.uniform();
      policy::PolicyParams params;
      params.qlearn_eps = eps;
      policy::QLearnPolicy learner({c, 1, 100, params});
      learner.set_q_values(q);
      const auto oracle = testing::brute_force_lp(q, eps, steps);
      for (int i = 0; i < c; ++i)
        worst_lp = std::max(worst_lp, std::abs(learner.distribution()[i] - oracle[i]));
      ++instances;
    }
  }
  const bool lp_ok = worst_lp <= 1e-9;
  v.detail += "; QLEARN LP max diff " + fmt("%.2e", worst_lp) + " on " + std::to_string(instances) +
              " instances (<= 1e-9)";

  const double secs = seconds_since(start);
  v.pass = ucb_ok && exp3_ok && lp_ok && secs < 300.0;
  v.detail += "; " + fmt("%.1f s (limit 300 s)", secs);
  return v;
}

Verdict c7() {
  const auto start = Clock::now();
  int exact = 0, congruent = 0;
  double worst = 1.0;
  constexpr int kTrials = 50;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int factors = 3 + trial % 3;
    Stream rng(hash64({700, static_cast<std::uint64_t>(trial)}));
    const auto model = testing::simple_structure_model(54, factors, rng);
    const auto y = testing::sample_rows(model, 144, rng);
    const auto a = fa::analyze(y);
    if (a.model.retained != factors) continue;
    ++exact;
    const auto align = fa::align_columns(a.loadings, model.lambda);
    const double c = align.congruence.minCoeff();
    worst = std::min(worst, c);
    if (c >= 0.95) ++congruent;
  }
  const double secs = seconds_since(start);
  Verdict v;
  v.pass = exact == kTrials && congruent == kTrials && secs < 60.0;
  v.detail = "retained count exact in " + std::to_string(exact) + "/" + std::to_string(kTrials) +
             ", congruence >= 0.95 in " + std::to_string(congruent) + "/" + std::to_string(kTrials) +
             " (min " + fmt("%.4f", worst) + "); " + fmt("%.1f s (limit 60 s)", secs);
  return v;
}

std::optional<fa::Analysis> g_full_analysis;

Verdict c8() {
  const auto& pm = full_grid().grid.matrix;
  const auto cfg = cli::default_run_config();
  g_full_analysis = fa::analyze(pm.values, cfg.fa.analysis_options());
  const auto& a = *g_full_analysis;
  const int retained = a.model.retained;

  // Mean |loading| of each factor over violation and over delay columns.
  const auto& kept = a.corr.kept;
  const Eigen::Index factors = a.loadings.cols();
  std::vector<double> viol(static_cast<std::size_t>(factors), 0.0), delay(viol);
  int nv = 0, nd = 0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto metric = pm.columns[static_cast<std::size_t>(kept[i])].metric;
    if (metric == harness::Metric::kThroughput) continue;
    auto& target = metric == harness::Metric::kViolation ? viol : delay;
    (metric == harness::Metric::kViolation ? nv : nd)++;
    for (Eigen::Index f = 0; f < factors; ++f)
      target[static_cast<std::size_t>(f)] += std::abs(a.loadings(static_cast<Eigen::Index>(i), f));
  }
  for (auto& x : viol) x /= std::max(nv, 1);
  for (auto& x : delay) x /= std::max(nd, 1);
  const auto fv = static_cast<std::size_t>(std::max_element(viol.begin(), viol.end()) - viol.begin());
  const auto fd = static_cast<std::size_t>(std::max_element(delay.begin(), delay.end()) - delay.begin());
  const double contrast_v = viol[fv] - delay[fv];
  const double contrast_d = delay[fd] - viol[fd];

  Verdict v;
  v.pass = std::abs(retained - 5) <= 1 && fv != fd && contrast_v >= 0.3 && contrast_d >= 0.3;
  v.detail = "retained_I = " + std::to_string(retained) + " (5 +/- 1); violation factor F" +
             std::to_string(fv + 1) + " contrast " + fmt("%.3f", contrast_v) + ", delay factor F" +
             std::to_string(fd + 1) + " contrast " + fmt("%.3f", contrast_d) + " (>= 0.3)";
  return v;
}

Verdict c9() {
  std::vector<std::pair<std::string, Eigen::MatrixXd>> fixtures;
  {
    // Nine indicators on three factors, loadings sqrt(0.7).
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(9, 3);
    const int counts[3] = {4, 3, 2};
    int row = 0;
    for (int f = 0; f < 3; ++f)
      for (int i = 0; i < counts[f]; ++i) lambda(row++, f) = std::sqrt(0.7);
    Eigen::MatrixXd sigma = lambda * lambda.transpose();
    sigma.diagonal().setOnes();
    fixtures.emplace_back("nine_by_three", sigma);
  }
  for (int factors : {3, 4, 5}) {
    Stream rng(hash64({900, static_cast<std::uint64_t>(factors)}));
    const auto model = testing::simple_structure_model(54, factors, rng);
    fixtures.emplace_back("population_I" + std::to_string(factors), model.sigma);
    fixtures.emplace_back("sample_I" + std::to_string(factors),
                          fa::correlation(testing::sample_rows(model, 144, rng)).sigma);
  }
  if (g_full_analysis) fixtures.emplace_back("full_grid", g_full_analysis->corr.sigma);

  double worst_recon = 0.0, worst_rot = 0.0;
  int converged = 0;
  for (const auto& [name, sigma] : fixtures) {
    const auto eig = fa::eigen_symmetric(sigma);
    const Eigen::MatrixXd recon = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    worst_recon = std::max(worst_recon, (recon - sigma).norm());

    const auto model = fa::extract(sigma);
    if (model.converged && model.iterations <= 1000) ++converged;
    if (model.lambda.cols() >= 2) {
      const auto vm = fa::varimax(model.lambda);
      const Eigen::MatrixXd before = model.lambda * model.lambda.transpose();
      const Eigen::MatrixXd after = vm.loadings * vm.loadings.transpose();
      worst_rot = std::max(worst_rot, (before - after).norm());
    }
  }
  Verdict v;
  v.pass = worst_recon <= 1e-8 && worst_rot <= 1e-10 && converged == static_cast<int>(fixtures.size());
  v.detail = std::to_string(fixtures.size()) + " fixtures: reconstruction " + fmt("%.2e", worst_recon) +
             " (<= 1e-8), varimax LL' drift " + fmt("%.2e", worst_rot) + " (<= 1e-10), converged " +
             std::to_string(converged) + "/" + std::to_string(fixtures.size());
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict c10(const fs::path& work) {
  const fs::path smoke = fs::path(COGBENCH_SOURCE_DIR) / "config" / "smoke.json";
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* name : {"c10_a", "c10_b"}) {
    const fs::path dir = work / name;
    fs::remove_all(dir);
    std::ostringstream out, err;
    const std::vector<std::vector<std::string>> steps = {
        {"cogbench", "simulate", "--config", smoke.string(), "--out", dir.string()},
        {"cogbench", "analyze", "--in", dir.string()},
        {"cogbench", "report", "--in", dir.string()}};
    for (const auto& args : steps) {
      if (const int code = cli::run(args, out, err); code != 0)
        return {false, args[1] + " exited " + std::to_string(code) + ": " + err.str()};
    }
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    trees.push_back(std::move(files));
  }
  std::size_t differing = 0;
  for (const auto& [path, bytes] : trees[0]) {
    const auto it = trees[1].find(path);
    if (it == trees[1].end() || it->second != bytes) ++differing;
  }
  Verdict v;
  v.pass = differing == 0 && trees[0].size() == trees[1].size() && !trees[0].empty();
  v.detail = std::to_string(trees[0].size()) + " files per run, " + std::to_string(differing) +
             " differing";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cogbench acceptance criteria"};
  std::string work_dir = (fs::temp_directory_path() / "cogbench_acceptance").string();
  std::vector<int> only;
  app.add_option("--work-dir", work_dir, "Scratch directory for end-to-end runs");
  app.add_option("--only", only, "Run only these criteria (1-10)");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work_dir);

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7}, {8, c8}, {9, c9},
      {10, [&] { return c10(work_dir); }}};
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << "C" << id << (id < 10 ? "  " : " ") << (v.pass ? "PASS" : "FAIL") << "  " << v.detail
              << std::endl;
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criterion(s) failed"
                         : std::string("acceptance: all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
