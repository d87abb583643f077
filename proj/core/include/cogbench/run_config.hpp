#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cogbench/access_policies.hpp"
#include "cogbench/factor_analysis.hpp"
#include "cogbench/radio_model.hpp"

namespace cogbench::cli {

struct FaConfig {
  double retention = 1.0;
  fa::Rotation rotation = fa::Rotation::kVarimax;
  fa::Method method = fa::Method::kPrincipalAxis;
  int max_iterations = 1000;
  double tolerance = 1e-6;

  fa::AnalysisOptions analysis_options() const;
};

struct RunConfig {
  std::uint64_t master_seed = 20240601;
  std::filesystem::path scenario_file;     // resolved at load time
  std::optional<std::int64_t> horizon;     // overrides every scenario's horizon_T
  int reps = 200;
  radio::GridAxes axes;
  policy::PolicyParams params;
  FaConfig fa;
  std::filesystem::path output_dir = "out";
};

// Defaults with scenario_file set to default_scenario_file().
RunConfig default_run_config();

// Looks for scenarios/default18.json under the working directory, then
// $COGBENCH_DATA_DIR, the source tree and the install prefix. Returns the
// relative path when nothing is found so validation reports it.
std::filesystem::path default_scenario_file();

// Relative paths resolve against `base_dir`. Unknown keys are rejected.
// Errors are ConfigError with the JSON pointer and line/column.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Throws ConfigError when T or R is below 1, an axis is empty or the
// scenario file does not exist.
void validate(const RunConfig& config);

// Canonical JSON of every field that influences results (not output_dir).
std::string canonical_json(const RunConfig& config);

// 16 hex digits over canonical_json() plus the scenario file bytes.
std::string config_hash(const RunConfig& config);

struct ManifestInfo {
  std::size_t radios = 0;
  std::size_t scenarios = 0;
  std::int64_t horizon = 0;
  bool dry_run = false;
  std::optional<double> wall_seconds;  // only recorded on request
};

void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const ManifestInfo& info);

}  // namespace cogbench::cli
