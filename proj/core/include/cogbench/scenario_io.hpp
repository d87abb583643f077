#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "cogbench/spectrum_env.hpp"

namespace cogbench::env {

struct ScenarioLoadOptions {
  // Seeds the change-point generator of ARBITRARY scenarios.
  std::uint64_t master_seed = 0;
  // Replaces every scenario's horizon_T when set.
  std::optional<std::int64_t> horizon_override;
};

// Parses a scenario document:
//
//   {"scenarios": [
//     {"scenario_id": 1,
//      "horizon_T": 2000,
//      "slot_fractions": {"sense": 0.1, "learn": 0.05, "switch": 0.05},
//      "channels": [{"rate": 5, "fdr": 1.0, "load": 0.1}, ...],
//      "activity": {"kind": "iid" | "markov" | "arbitrary", "params": {...}}},
//     ...]}
//
// A bare top-level array of scenarios is accepted too. Raw rates are divided
// by the scenario's largest rate. Markov params are either
// {"transitions": [[p_idle_busy, p_busy_idle], ...]} or
// {"p_busy_to_idle": x} (scalar or per-channel list), in which case
// p_idle_busy is solved from each channel's load. Arbitrary params are either
// explicit {"schedules": [[[start, load], ...], ...]} or {"segments": n}: n-1
// shared change points drawn from hash64({master_seed, scenario_id, tag}),
// the first segment using the channel loads and each later one a seeded
// permutation of them.
//
// Scenarios come back sorted by scenario_id. Errors are ConfigError carrying
// the JSON pointer and the line/column of the offending value.
std::vector<Scenario> parse_scenarios(std::string_view text, const ScenarioLoadOptions& options);

std::vector<Scenario> load_scenarios(const std::filesystem::path& path,
                                     const ScenarioLoadOptions& options);

// Change points for the "segments" generator; exposed for tests.
std::vector<std::int64_t> arbitrary_change_points(std::uint64_t master_seed, int scenario_id,
                                                  int segments, std::int64_t horizon);

}  // namespace cogbench::env
