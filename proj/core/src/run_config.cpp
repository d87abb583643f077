#include "cogbench/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "cogbench/errors.hpp"
#include "cogbench/json_locate.hpp"
#include "cogbench/rng.hpp"

#ifndef COGBENCH_VERSION
#define COGBENCH_VERSION "0.0.0"
#endif

namespace cogbench::cli {
namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

struct SchemaError {
  std::string message;
  std::string pointer;
};

[[noreturn]] void fail(std::string message, std::string pointer) {
  throw SchemaError{std::move(message), std::move(pointer)};
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) fail("expected an object", where);
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail("unknown key '" + it.key() + "'", where + "/" + it.key());
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail("expected a number", where);
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail("expected an integer", where);
  return v.get<std::int64_t>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail("expected a non-empty array of numbers", where);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "/" + std::to_string(i)));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_bytes(std::string_view bytes) {
  std::uint64_t h = hash64({bytes.size()});
  for (std::size_t i = 0; i < bytes.size(); i += 8) {
    std::uint64_t w = 0;
    for (std::size_t j = 0; j < 8 && i + j < bytes.size(); ++j)
      w |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i + j])) << (8 * j);
    h = hash64({h, w});
  }
  return h;
}

void parse_into(const json& doc, RunConfig& cfg, const std::filesystem::path& base_dir) {
  only_keys(doc, {"master_seed", "scenario_file", "horizon_T", "reps", "grid", "policy_params", "fa",
                  "output_dir"},
            "");
  if (doc.contains("master_seed")) {
    const auto& v = doc["master_seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      fail("master_seed must be a non-negative integer", "/master_seed");
    cfg.master_seed = v.get<std::uint64_t>();
  }
  if (doc.contains("scenario_file")) {
    if (!doc["scenario_file"].is_string()) fail("expected a path string", "/scenario_file");
    std::filesystem::path p = doc["scenario_file"].get<std::string>();
    cfg.scenario_file = p.is_absolute() ? p : (base_dir / p).lexically_normal();
  }
  if (doc.contains("horizon_T")) cfg.horizon = integer(doc["horizon_T"], "/horizon_T");
  if (doc.contains("reps")) cfg.reps = static_cast<int>(integer(doc["reps"], "/reps"));
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) fail("expected a path string", "/output_dir");
    std::filesystem::path p = doc["output_dir"].get<std::string>();
    cfg.output_dir = p.is_absolute() ? p : (base_dir / p).lexically_normal();
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    only_keys(g, {"policies", "sensors", "accuracies", "hw_delays"}, "/grid");
    if (g.contains("policies")) {
      const auto& list = g["policies"];
      if (!list.is_array() || list.empty()) fail("expected a non-empty array of policy names", "/grid/policies");
      cfg.axes.policies.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "/grid/policies/" + std::to_string(i);
        if (!list[i].is_string()) fail("expected a policy name", where);
        auto kind = policy::parse_policy(list[i].get<std::string>());
        if (!kind) fail("unknown policy '" + list[i].get<std::string>() + "'", where);
        cfg.axes.policies.push_back(*kind);
      }
    }
    if (g.contains("sensors")) {
      cfg.axes.sensors.clear();
      const auto& list = g["sensors"];
      if (!list.is_array() || list.empty()) fail("expected a non-empty array of integers", "/grid/sensors");
      for (std::size_t i = 0; i < list.size(); ++i)
        cfg.axes.sensors.push_back(static_cast<int>(integer(list[i], "/grid/sensors/" + std::to_string(i))));
    }
    if (g.contains("accuracies")) cfg.axes.accuracies = numbers(g["accuracies"], "/grid/accuracies");
    if (g.contains("hw_delays")) cfg.axes.hw_delays = numbers(g["hw_delays"], "/grid/hw_delays");
  }
  if (doc.contains("policy_params")) {
    const auto& p = doc["policy_params"];
    only_keys(p, {"exp3_gamma", "pola_eps0", "qlearn_alpha", "qlearn_eps", "scale_rate_by_width", "costs"},
              "/policy_params");
    if (p.contains("exp3_gamma")) {
      if (p["exp3_gamma"].is_null()) cfg.params.exp3_gamma.reset();
      else cfg.params.exp3_gamma = number(p["exp3_gamma"], "/policy_params/exp3_gamma");
    }
    if (p.contains("pola_eps0")) cfg.params.pola_eps0 = number(p["pola_eps0"], "/policy_params/pola_eps0");
    if (p.contains("qlearn_alpha")) cfg.params.qlearn_alpha = number(p["qlearn_alpha"], "/policy_params/qlearn_alpha");
    if (p.contains("qlearn_eps")) cfg.params.qlearn_eps = number(p["qlearn_eps"], "/policy_params/qlearn_eps");
    if (p.contains("scale_rate_by_width")) {
      if (!p["scale_rate_by_width"].is_boolean()) fail("expected a boolean", "/policy_params/scale_rate_by_width");
      cfg.params.scale_rate_by_width = p["scale_rate_by_width"].get<bool>();
    }
    if (p.contains("costs")) {
      const auto& c = p["costs"];
      if (!c.is_object()) fail("expected an object", "/policy_params/costs");
      for (auto it = c.begin(); it != c.end(); ++it) {
        const std::string where = "/policy_params/costs/" + it.key();
        auto kind = policy::parse_policy(it.key());
        if (!kind) fail("unknown policy '" + it.key() + "'", where);
        cfg.params.cost_table.cost[static_cast<std::size_t>(*kind)] = number(it.value(), where);
      }
      cfg.axes.cost_table = cfg.params.cost_table;
    }
  }
  if (doc.contains("fa")) {
    const auto& f = doc["fa"];
    only_keys(f, {"retention", "rotate", "method", "max_iterations", "tolerance"}, "/fa");
    if (f.contains("retention")) cfg.fa.retention = number(f["retention"], "/fa/retention");
    if (f.contains("rotate")) {
      const auto s = f["rotate"].is_string() ? f["rotate"].get<std::string>() : "";
      if (s == "none") cfg.fa.rotation = fa::Rotation::kNone;
      else if (s == "varimax") cfg.fa.rotation = fa::Rotation::kVarimax;
      else fail("rotate must be \"none\" or \"varimax\"", "/fa/rotate");
    }
    if (f.contains("method")) {
      const auto s = f["method"].is_string() ? f["method"].get<std::string>() : "";
      if (s == "fa") cfg.fa.method = fa::Method::kPrincipalAxis;
      else if (s == "pca") cfg.fa.method = fa::Method::kPca;
      else fail("method must be \"fa\" or \"pca\"", "/fa/method");
    }
    if (f.contains("max_iterations"))
      cfg.fa.max_iterations = static_cast<int>(integer(f["max_iterations"], "/fa/max_iterations"));
    if (f.contains("tolerance")) cfg.fa.tolerance = number(f["tolerance"], "/fa/tolerance");
  }
}

}  // namespace

fa::AnalysisOptions FaConfig::analysis_options() const {
  fa::AnalysisOptions o;
  o.method = method;
  o.rotation = rotation;
  o.extract.retention = retention;
  o.extract.max_iterations = max_iterations;
  o.extract.tolerance = tolerance;
  return o;
}

std::filesystem::path default_scenario_file() {
  const std::filesystem::path rel = std::filesystem::path("scenarios") / "default18.json";
  std::vector<std::filesystem::path> candidates = {rel};
  if (const char* data = std::getenv("COGBENCH_DATA_DIR")) candidates.push_back(std::filesystem::path(data) / rel);
#ifdef COGBENCH_SOURCE_SCENARIOS
  candidates.emplace_back(COGBENCH_SOURCE_SCENARIOS);
#endif
#ifdef COGBENCH_INSTALL_SCENARIOS
  candidates.emplace_back(COGBENCH_INSTALL_SCENARIOS);
#endif
  for (const auto& c : candidates) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(c, ec)) return c;
  }
  return rel;
}

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.scenario_file = default_scenario_file();
  return cfg;
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "",
                      offset_to_location(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  RunConfig cfg = default_run_config();
  try {
    parse_into(doc, cfg, base_dir);
  } catch (const SchemaError& e) {
    std::string pointer = e.pointer;
    auto where = locate_pointer(text, pointer);
    while (!where && !pointer.empty()) {
      pointer = pointer.substr(0, pointer.rfind('/'));
      where = locate_pointer(text, pointer);
    }
    throw ConfigError(e.message, e.pointer, where);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path.parent_path());
}

void validate(const RunConfig& config) {
  if (config.reps < 1) throw ConfigError("reps must be >= 1", "/reps");
  if (config.horizon && *config.horizon < 1) throw ConfigError("horizon_T must be >= 1", "/horizon_T");
  if (config.axes.policies.empty() || config.axes.sensors.empty() || config.axes.accuracies.empty() ||
      config.axes.hw_delays.empty())
    throw ConfigError("every grid axis needs at least one value", "/grid");
  if (config.fa.max_iterations < 1) throw ConfigError("fa.max_iterations must be >= 1", "/fa/max_iterations");
  if (!(config.fa.tolerance > 0)) throw ConfigError("fa.tolerance must be positive", "/fa/tolerance");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(config.scenario_file, ec))
    throw ConfigError("scenario file '" + config.scenario_file.string() + "' not found", "/scenario_file");
}

std::string canonical_json(const RunConfig& config) {
  ordered doc;
  doc["master_seed"] = config.master_seed;
  doc["scenario_file"] = config.scenario_file.filename().string();
  doc["horizon_T"] = config.horizon ? ordered(*config.horizon) : ordered(nullptr);
  doc["reps"] = config.reps;
  ordered grid;
  grid["policies"] = ordered::array();
  for (auto k : config.axes.policies) grid["policies"].push_back(std::string(policy::to_string(k)));
  grid["sensors"] = config.axes.sensors;
  grid["accuracies"] = config.axes.accuracies;
  grid["hw_delays"] = config.axes.hw_delays;
  doc["grid"] = grid;
  ordered p;
  p["exp3_gamma"] = config.params.exp3_gamma ? ordered(*config.params.exp3_gamma) : ordered(nullptr);
  p["pola_eps0"] = config.params.pola_eps0;
  p["qlearn_alpha"] = config.params.qlearn_alpha;
  p["qlearn_eps"] = config.params.qlearn_eps;
  p["scale_rate_by_width"] = config.params.scale_rate_by_width;
  ordered costs;
  for (auto k : policy::kAllPolicies) costs[std::string(policy::to_string(k))] = config.params.cost_table[k];
  p["costs"] = costs;
  doc["policy_params"] = p;
  ordered f;
  f["retention"] = config.fa.retention;
  f["rotate"] = std::string(fa::to_string(config.fa.rotation));
  f["method"] = std::string(fa::to_string(config.fa.method));
  f["max_iterations"] = config.fa.max_iterations;
  f["tolerance"] = config.fa.tolerance;
  doc["fa"] = f;
  return doc.dump();
}

std::string config_hash(const RunConfig& config) {
  const std::uint64_t a = hash_bytes(canonical_json(config));
  const std::uint64_t b = hash_bytes(read_file(config.scenario_file));
  return hex64(hash64({a, b}));
}

void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                    const ManifestInfo& info) {
  ordered m;
  m["tool"] = "cogbench";
  m["version"] = COGBENCH_VERSION;
  m["master_seed"] = config.master_seed;
  m["config_hash"] = config_hash(config);
  m["config"] = ordered::parse(canonical_json(config));
  m["radios"] = info.radios;
  m["scenarios"] = info.scenarios;
  m["horizon_T"] = info.horizon;
  m["dry_run"] = info.dry_run;
  ordered versions;
  versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION);
  versions["boost"] = std::to_string(BOOST_VERSION / 100000) + "." +
                      std::to_string(BOOST_VERSION / 100 % 1000) + "." + std::to_string(BOOST_VERSION % 100);
  versions["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH);
#if defined(__clang__)
  versions["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  versions["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  m["versions"] = versions;
  if (info.wall_seconds) m["wall_time_s"] = *info.wall_seconds;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << m.dump(2) << '\n';
}

}  // namespace cogbench::cli
