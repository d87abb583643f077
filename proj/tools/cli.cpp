#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cogbench/csv.hpp"
#include "cogbench/errors.hpp"
#include "cogbench/experiment_harness.hpp"
#include "cogbench/fa_io.hpp"
#include "cogbench/factor_analysis.hpp"
#include "cogbench/performance_io.hpp"
#include "cogbench/reporting.hpp"
#include "cogbench/run_config.hpp"
#include "cogbench/scenario_io.hpp"

namespace cogbench::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string scenarios;
  std::optional<std::uint64_t> seed;
  std::string policies;
  std::optional<std::int64_t> slots;
  std::optional<int> reps;
  std::string out;
  std::optional<double> retention;
  std::string rotate;
  std::string method;
  bool dry_run = false;
  bool record_timing = false;
  bool json_errors = false;
  // analyze / report
  std::string in;
  std::string perf;
  std::string fix = "1,2";
  std::string vary;
  std::string labels;
};

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": expected a comma-separated list of integers, got '" + text + "'");
    }
  }
  return out;
}

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? default_run_config() : load_run_config(o.config);
  if (!o.scenarios.empty()) cfg.scenario_file = o.scenarios;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.slots) cfg.horizon = *o.slots;
  if (o.reps) cfg.reps = *o.reps;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.policies.empty()) {
    cfg.axes.policies.clear();
    std::stringstream ss(o.policies);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto kind = policy::parse_policy(name);
      if (!kind) throw ConfigError("--policies: unknown policy '" + name + "'");
      cfg.axes.policies.push_back(*kind);
    }
  }
  if (o.retention) cfg.fa.retention = *o.retention;
  if (o.rotate == "none") cfg.fa.rotation = fa::Rotation::kNone;
  else if (o.rotate == "varimax") cfg.fa.rotation = fa::Rotation::kVarimax;
  if (o.method == "fa") cfg.fa.method = fa::Method::kPrincipalAxis;
  else if (o.method == "pca") cfg.fa.method = fa::Method::kPca;
  validate(cfg);
  return cfg;
}

std::vector<env::Scenario> load(const RunConfig& cfg) {
  return env::load_scenarios(cfg.scenario_file, {cfg.master_seed, cfg.horizon});
}

void write_cells(const fs::path& path, const harness::GridResult& grid) {
  csv::Table t;
  t.header = {"radio_id", "scenario_id", "throughput", "delay", "violation",
              "throughput_rep_sd", "violations", "exhausted_slots", "reps"};
  const std::size_t k = grid.matrix.columns.size() / 3;
  for (std::size_t r = 0; r < grid.matrix.radios.size(); ++r) {
    for (std::size_t s = 0; s < k; ++s) {
      const auto& c = grid.cell(r, s);
      t.rows.push_back({std::to_string(grid.matrix.radios[r].radio_id),
                        std::to_string(grid.matrix.columns[3 * s].scenario_id),
                        csv::format_number(c.mean.throughput), csv::format_number(c.mean.delay),
                        csv::format_number(c.mean.violation), csv::format_number(c.throughput_rep_sd),
                        std::to_string(c.violations), std::to_string(c.exhausted_slots),
                        std::to_string(c.reps)});
    }
  }
  csv::write(path, t);
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const auto scenarios = load(cfg);
  const auto radios = radio::enumerate_grid(cfg.axes);
  ManifestInfo info;
  info.radios = radios.size();
  info.scenarios = scenarios.size();
  info.horizon = scenarios.front().horizon;
  info.dry_run = o.dry_run;
  fs::create_directories(cfg.output_dir);
  if (o.dry_run) {
    write_manifest(cfg.output_dir / "manifest.json", cfg, info);
    out << "dry run: " << radios.size() << " radios x " << scenarios.size() << " scenarios x "
        << cfg.reps << " reps; manifest written to " << (cfg.output_dir / "manifest.json").string() << '\n';
    return kOk;
  }

  harness::GridOptions go;
  go.reps = cfg.reps;
  go.master_seed = cfg.master_seed;
  go.params = cfg.params;
  std::size_t last_decile = 0;
  go.progress = [&](std::size_t done, std::size_t total) {
    const std::size_t decile = done * 10 / total;
    if (decile != last_decile) {
      last_decile = decile;
      err << "simulate: " << decile * 10 << "% (" << done << "/" << total << " cells)\n";
    }
  };
  const auto start = std::chrono::steady_clock::now();
  const auto grid = harness::run_grid(radios, scenarios, go);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.record_timing) info.wall_seconds = seconds;

  harness::write_performance_csv(cfg.output_dir / "performance.csv", grid.matrix);
  write_cells(cfg.output_dir / "cells.csv", grid);
  write_manifest(cfg.output_dir / "manifest.json", cfg, info);
  out << "performance.csv: " << grid.matrix.rows() << "x" << grid.matrix.cols() << " -> "
      << cfg.output_dir.string() << '\n';
  return kOk;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  fs::path perf = !o.perf.empty() ? fs::path(o.perf) : !o.in.empty() ? fs::path(o.in) : cfg.output_dir / "performance.csv";
  if (fs::is_directory(perf)) perf /= "performance.csv";
  const auto table = harness::read_performance_csv(perf);
  const auto opts = cfg.fa.analysis_options();
  const auto analysis = fa::analyze(table.values, opts);

  std::vector<int> ids;
  for (const auto& r : table.radios) ids.push_back(r.radio_id);
  const fs::path dir = o.out.empty() ? perf.parent_path() : fs::path(o.out);
  fa::write_analysis(dir, analysis, table.column_names, ids, cfg.fa.retention);

  for (auto c : analysis.corr.dropped)
    err << "warning: dropped constant column " << table.column_names[c] << '\n';
  if (!analysis.model.converged)
    err << "warning: extraction did not converge in " << analysis.model.iterations << " iterations\n";
  out << "retained_I = " << analysis.model.retained << " (" << fa::to_string(analysis.model.method)
      << ", rotation " << fa::to_string(analysis.rotation) << ", rmsr "
      << csv::format_number(analysis.rmsr) << ")\n";
  std::vector<std::string> names;
  for (auto c : analysis.corr.kept) names.push_back(table.column_names[c]);
  for (Eigen::Index j = 0; j < analysis.loadings.cols(); ++j) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(analysis.loadings.rows()));
    for (Eigen::Index i = 0; i < analysis.loadings.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(analysis.loadings(a, j)) > std::abs(analysis.loadings(b, j));
    });
    out << fa::factor_name(static_cast<int>(j) + 1) << ':';
    for (std::size_t t = 0; t < std::min<std::size_t>(5, idx.size()); ++t)
      out << ' ' << names[static_cast<std::size_t>(idx[t])] << '=' << csv::format_number(analysis.loadings(idx[t], j));
    out << '\n';
  }
  return kOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  report::ReportOptions ro;
  ro.analysis_dir = o.in.empty() ? fs::path("out") : fs::path(o.in);
  ro.performance_csv = o.perf.empty() ? ro.analysis_dir / "performance.csv" : fs::path(o.perf);
  ro.out_dir = o.out.empty() ? ro.analysis_dir : fs::path(o.out);
  ro.fix = parse_int_list(o.fix, "--fix");
  if (!o.vary.empty()) ro.vary = parse_int_list(o.vary, "--vary");
  if (!o.labels.empty()) ro.labels = report::load_factor_labels(o.labels);
  const auto bundle = report::make_report(ro);
  for (const auto& n : bundle.notices) err << "notice: " << n << '\n';
  for (const auto& p : bundle.written) out << "wrote " << p.string() << '\n';
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream&) {
  const RunConfig cfg = resolve_config(o);
  const auto scenarios = load(cfg);
  const auto radios = radio::enumerate_grid(cfg.axes);
  out << "ok: " << scenarios.size() << " scenarios, " << radios.size() << " radios, "
      << cfg.reps << " reps, config_hash " << config_hash(cfg) << '\n';
  return kOk;
}

void report_error(std::ostream& err, bool as_json, int code, const char* kind, const std::string& message,
                  const ConfigError* config = nullptr) {
  if (!as_json) {
    err << "error: " << message << '\n';
    return;
  }
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["exit_code"] = code;
  j["message"] = config ? config->detail() : message;
  if (config) {
    j["pointer"] = config->pointer();
    if (config->where()) {
      j["line"] = config->where()->line;
      j["column"] = config->where()->column;
    }
  }
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Benchmark cognitive-radio access policies and factor-analyse their performance"};
  app.name(args.empty() ? "cogbench" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.add_flag("--json-errors", o.json_errors, "Print errors as one JSON object on stderr");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run configuration JSON");
    sub->add_option("--scenarios", o.scenarios, "Scenario file (overrides the config)");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_flag("--json-errors", o.json_errors, "Print errors as one JSON object on stderr");
  };
  auto fa_flags = [&](CLI::App* sub) {
    sub->add_option("--retention", o.retention, "Eigenvalue retention threshold");
    sub->add_option("--rotate", o.rotate, "none | varimax")->check(CLI::IsMember({"none", "varimax"}));
    sub->add_option("--method", o.method, "fa | pca")->check(CLI::IsMember({"fa", "pca"}));
  };

  auto* sim = app.add_subcommand("simulate", "Run the experiment grid and write performance.csv");
  common(sim);
  sim->add_option("--policies", o.policies, "Comma-separated policy list");
  sim->add_option("--slots", o.slots, "Horizon T (slots per run)");
  sim->add_option("--reps", o.reps, "Repetitions per cell");
  sim->add_flag("--dry-run", o.dry_run, "Write the manifest only");
  sim->add_flag("--record-timing", o.record_timing, "Record wall time in the manifest");

  auto* ana = app.add_subcommand("analyze", "Factor-analyse a performance matrix");
  common(ana);
  fa_flags(ana);
  ana->add_option("--in", o.in, "performance.csv or a directory holding it");

  auto* rep = app.add_subcommand("report", "Emit cluster, scree and component-plot data");
  rep->add_option("--in", o.in, "Directory with analyze outputs");
  rep->add_option("--perf", o.perf, "performance.csv (default: <in>/performance.csv)");
  rep->add_option("--out", o.out, "Output directory (default: <in>)");
  rep->add_option("--fix", o.fix, "Two fixed factor indices, e.g. 1,2");
  rep->add_option("--vary", o.vary, "Varied factor indices, e.g. 3,4,5");
  rep->add_option("--labels", o.labels, "Factor label annotations (JSON)");
  rep->add_flag("--json-errors", o.json_errors, "Print errors as one JSON object on stderr");

  auto* val = app.add_subcommand("validate", "Check a configuration and scenario file");
  common(val);
  fa_flags(val);
  val->add_option("--policies", o.policies, "Comma-separated policy list");
  val->add_option("--slots", o.slots, "Horizon T");
  val->add_option("--reps", o.reps, "Repetitions per cell");

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, o.json_errors, kConfigError, "usage", e.what());
    return kConfigError;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (ana->parsed()) return cmd_analyze(o, out, err);
    if (rep->parsed()) return cmd_report(o, out, err);
    return cmd_validate(o, out, err);
  } catch (const ConfigError& e) {
    report_error(err, o.json_errors, kConfigError, "config", e.what(), &e);
    return kConfigError;
  } catch (const report::FactorIndexError& e) {
    report_error(err, o.json_errors, kFactorIndex, "factor_index", e.what());
    return kFactorIndex;
  } catch (const InputError& e) {
    report_error(err, o.json_errors, kInputError, "input", e.what());
    return kInputError;
  } catch (const AssemblyError& e) {
    report_error(err, o.json_errors, kInputError, "assembly", e.what());
    return kInputError;
  } catch (const ContractViolation& e) {
    report_error(err, o.json_errors, kConfigError, "contract", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    report_error(err, o.json_errors, kInternal, "internal", e.what());
    return kInternal;
  }
}

}  // namespace cogbench::cli
