#include "cogbench/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cogbench/errors.hpp"
#include "cogbench/json_locate.hpp"

namespace cogbench::env {
namespace {

using nlohmann::json;

constexpr std::uint64_t kArbitraryTag = 0xA7B17A57ULL;

// Raised while walking the document; converted to ConfigError with a source
// location once the offending pointer is known.
struct SchemaError {
  std::string message;
  std::string pointer;
};

[[noreturn]] void Fail(std::string message, std::string pointer) {
  throw SchemaError{std::move(message), std::move(pointer)};
}

const json& Require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) Fail("expected an object", where);
  auto it = obj.find(key);
  if (it == obj.end()) Fail(std::string("missing field '") + key + "'", where);
  return *it;
}

double Number(const json& value, const std::string& where) {
  if (!value.is_number()) Fail("expected a number", where);
  return value.get<double>();
}

std::int64_t Integer(const json& value, const std::string& where) {
  if (!value.is_number_integer()) Fail("expected an integer", where);
  return value.get<std::int64_t>();
}

ActivityKind ParseKind(const json& value, const std::string& where) {
  if (!value.is_string()) Fail("expected a string", where);
  const auto s = value.get<std::string>();
  if (s == "iid") return ActivityKind::kIid;
  if (s == "markov") return ActivityKind::kMarkov;
  if (s == "arbitrary") return ActivityKind::kArbitrary;
  Fail("unknown activity kind '" + s + "' (expected iid, markov or arbitrary)", where);
}

SlotFractions ParseFractions(const json& value, const std::string& where) {
  SlotFractions f;
  if (value.is_array()) {
    if (value.size() != 3) Fail("slot_fractions needs three entries", where);
    f.sense = Number(value[0], where + "/0");
    f.learn = Number(value[1], where + "/1");
    f.switching = Number(value[2], where + "/2");
  } else if (value.is_object()) {
    f.sense = Number(Require(value, "sense", where), where + "/sense");
    f.learn = Number(Require(value, "learn", where), where + "/learn");
    f.switching = Number(Require(value, "switch", where), where + "/switch");
  } else {
    Fail("slot_fractions must be an object or a 3-element array", where);
  }
  return f;
}

std::vector<MarkovChain> ParseMarkov(const json& params, const std::vector<ChannelParams>& raw,
                                     const std::string& where) {
  std::vector<MarkovChain> chains;
  const std::size_t count = raw.size();
  if (params.contains("transitions")) {
    const auto& t = params["transitions"];
    const std::string tw = where + "/transitions";
    if (!t.is_array() || t.size() != count) Fail("need one [p_ib, p_bi] pair per channel", tw);
    for (std::size_t c = 0; c < count; ++c) {
      const std::string cw = tw + "/" + std::to_string(c);
      if (!t[c].is_array() || t[c].size() != 2) Fail("expected [p_idle_busy, p_busy_idle]", cw);
      chains.push_back({Number(t[c][0], cw + "/0"), Number(t[c][1], cw + "/1")});
    }
    return chains;
  }
  if (!params.contains("p_busy_to_idle"))
    Fail("markov params need 'transitions' or 'p_busy_to_idle'", where);
  const auto& pbi = params["p_busy_to_idle"];
  const std::string pw = where + "/p_busy_to_idle";
  for (std::size_t c = 0; c < count; ++c) {
    double busy_to_idle = 0.0;
    if (pbi.is_array()) {
      if (pbi.size() != count) Fail("need one p_busy_to_idle per channel", pw);
      busy_to_idle = Number(pbi[c], pw + "/" + std::to_string(c));
    } else {
      busy_to_idle = Number(pbi, pw);
    }
    const double load = raw[c].load;
    MarkovChain chain;
    if (load >= 1.0) {
      chain = {1.0, 0.0};
    } else {
      chain = {load * busy_to_idle / (1.0 - load), busy_to_idle};
    }
    if (chain.idle_to_busy > 1.0 + 1e-12)
      Fail("load " + std::to_string(load) + " is unreachable with this p_busy_to_idle "
           "(solved p_idle_to_busy > 1)", "/channels/" + std::to_string(c) + "/load");
    chain.idle_to_busy = std::min(chain.idle_to_busy, 1.0);
    chains.push_back(chain);
  }
  return chains;
}

std::vector<LoadSchedule> ParseArbitrary(const json& params, const std::vector<ChannelParams>& raw,
                                         int scenario_id, std::int64_t horizon,
                                         std::uint64_t master_seed, const std::string& where) {
  const std::size_t count = raw.size();
  std::vector<LoadSchedule> schedules(count);
  if (params.contains("schedules")) {
    const auto& s = params["schedules"];
    const std::string sw = where + "/schedules";
    if (!s.is_array() || s.size() != count) Fail("need one schedule per channel", sw);
    for (std::size_t c = 0; c < count; ++c) {
      const std::string cw = sw + "/" + std::to_string(c);
      if (!s[c].is_array() || s[c].empty()) Fail("schedule must be a non-empty list", cw);
      for (std::size_t i = 0; i < s[c].size(); ++i) {
        const std::string iw = cw + "/" + std::to_string(i);
        if (!s[c][i].is_array() || s[c][i].size() != 2) Fail("expected [start_slot, load]", iw);
        schedules[c].push_back({Integer(s[c][i][0], iw + "/0"), Number(s[c][i][1], iw + "/1")});
      }
    }
    return schedules;
  }
  if (!params.contains("segments")) Fail("arbitrary params need 'schedules' or 'segments'", where);
  const auto segments = Integer(params["segments"], where + "/segments");
  if (segments < 1) Fail("segments must be >= 1", where + "/segments");

  const auto starts = arbitrary_change_points(master_seed, scenario_id,
                                              static_cast<int>(segments), horizon);
  Stream rng(hash64({master_seed, static_cast<std::uint64_t>(scenario_id), kArbitraryTag, 1}));
  std::vector<double> loads(count);
  for (std::size_t c = 0; c < count; ++c) loads[c] = raw[c].load;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (s > 0) {
      for (std::size_t i = count; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.index(static_cast<int>(i)));
        std::swap(loads[i - 1], loads[j]);
      }
    }
    for (std::size_t c = 0; c < count; ++c) schedules[c].push_back({starts[s], loads[c]});
  }
  return schedules;
}

Scenario ParseScenario(const json& node, const std::string& where,
                       const ScenarioLoadOptions& options) {
  Scenario sc;
  const auto id = Integer(Require(node, "scenario_id", where), where + "/scenario_id");
  sc.scenario_id = static_cast<int>(id);
  sc.horizon = options.horizon_override
                   ? *options.horizon_override
                   : Integer(Require(node, "horizon_T", where), where + "/horizon_T");
  if (sc.horizon < 1) Fail("horizon_T must be >= 1", where + "/horizon_T");
  if (node.contains("slot_fractions"))
    sc.fractions = ParseFractions(node["slot_fractions"], where + "/slot_fractions");

  const auto& channels = Require(node, "channels", where);
  const std::string cw = where + "/channels";
  if (!channels.is_array() || channels.empty()) Fail("channels must be a non-empty list", cw);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const std::string w = cw + "/" + std::to_string(c);
    ChannelParams ch;
    ch.rate = Number(Require(channels[c], "rate", w), w + "/rate");
    ch.fdr = Number(Require(channels[c], "fdr", w), w + "/fdr");
    ch.load = Number(Require(channels[c], "load", w), w + "/load");
    if (!(ch.rate > 0.0)) Fail("rate must be positive", w + "/rate");
    if (ch.fdr < 0.0 || ch.fdr > 1.0) Fail("fdr must lie in [0,1]", w + "/fdr");
    if (ch.load < 0.0 || ch.load > 1.0) Fail("load must lie in [0,1]", w + "/load");
    sc.channels.push_back(ch);
  }

  const auto& activity = Require(node, "activity", where);
  const std::string aw = where + "/activity";
  sc.activity.kind = ParseKind(Require(activity, "kind", aw), aw + "/kind");
  static const json kEmpty = json::object();
  const json& params = activity.contains("params") ? activity["params"] : kEmpty;
  const std::string pw = aw + "/params";
  if (!params.is_object()) Fail("params must be an object", pw);
  try {
    switch (sc.activity.kind) {
      case ActivityKind::kIid:
        break;
      case ActivityKind::kMarkov:
        sc.activity.chains = ParseMarkov(params, sc.channels, pw);
        break;
      case ActivityKind::kArbitrary:
        sc.activity.schedules = ParseArbitrary(params, sc.channels, sc.scenario_id, sc.horizon,
                                               options.master_seed, pw);
        break;
    }
  } catch (SchemaError& e) {
    // Channel-relative pointers coming out of ParseMarkov.
    if (e.pointer.rfind("/channels", 0) == 0) e.pointer = where + e.pointer;
    throw;
  }

  double raw_max = 0.0;
  for (const auto& ch : sc.channels) raw_max = std::max(raw_max, ch.rate);
  sc.raw_rate_max = raw_max;
  for (auto& ch : sc.channels) ch.rate /= raw_max;

  try {
    sc.validate();
  } catch (const ConfigError& e) {
    Fail(e.detail(), where + e.pointer());
  }
  return sc;
}

}  // namespace

std::vector<std::int64_t> arbitrary_change_points(std::uint64_t master_seed, int scenario_id,
                                                  int segments, std::int64_t horizon) {
  Stream rng(hash64({master_seed, static_cast<std::uint64_t>(scenario_id), kArbitraryTag, 0}));
  const std::int64_t wanted = std::min<std::int64_t>(segments - 1, horizon - 1);
  std::set<std::int64_t> picks;
  while (static_cast<std::int64_t>(picks.size()) < wanted) {
    // uniform on [1, horizon)
    picks.insert(1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(horizon - 1)));
  }
  std::vector<std::int64_t> starts{0};
  starts.insert(starts.end(), picks.begin(), picks.end());
  return starts;
}

std::vector<Scenario> parse_scenarios(std::string_view text, const ScenarioLoadOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "",
                      offset_to_location(text, e.byte > 0 ? e.byte - 1 : 0));
  }

  try {
    const json* list = &doc;
    std::string prefix;
    if (doc.is_object()) {
      list = &Require(doc, "scenarios", "");
      prefix = "/scenarios";
    }
    if (!list->is_array() || list->empty()) Fail("expected a non-empty list of scenarios", prefix);

    std::vector<Scenario> scenarios;
    std::set<int> seen;
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string where = prefix + "/" + std::to_string(i);
      auto sc = ParseScenario((*list)[i], where, options);
      if (!seen.insert(sc.scenario_id).second)
        Fail("duplicate scenario_id " + std::to_string(sc.scenario_id), where + "/scenario_id");
      scenarios.push_back(std::move(sc));
    }
    std::sort(scenarios.begin(), scenarios.end(),
              [](const Scenario& a, const Scenario& b) { return a.scenario_id < b.scenario_id; });
    return scenarios;
  } catch (const SchemaError& e) {
    // Fall back to the nearest enclosing value the locator can find.
    std::string pointer = e.pointer;
    std::optional<SourceLocation> where = locate_pointer(text, pointer);
    while (!where && !pointer.empty()) {
      pointer = pointer.substr(0, pointer.rfind('/'));
      where = locate_pointer(text, pointer);
    }
    throw ConfigError(e.message, e.pointer, where);
  }
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path,
                                     const ScenarioLoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenarios(buffer.str(), options);
}

}  // namespace cogbench::env
