#include "cogbench/spectrum_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cogbench/errors.hpp"

namespace cogbench::env {

std::string_view to_string(ActivityKind kind) noexcept {
  switch (kind) {
    case ActivityKind::kIid: return "iid";
    case ActivityKind::kMarkov: return "markov";
    case ActivityKind::kArbitrary: return "arbitrary";
  }
  return "?";
}

double MarkovChain::stationary_busy() const noexcept {
  const double total = idle_to_busy + busy_to_idle;
  if (total <= 0.0) return 0.0;  // frozen chain; slot 0 starts idle
  return idle_to_busy / total;
}

double load_at(const LoadSchedule& schedule, std::int64_t slot) {
  auto it = std::upper_bound(
      schedule.begin(), schedule.end(), slot,
      [](std::int64_t s, const ChangePoint& cp) { return s < cp.start_slot; });
  if (it == schedule.begin()) {
    throw ConfigError("load schedule has no segment covering slot " +
                      std::to_string(slot));
  }
  return std::prev(it)->load;
}

namespace {

bool InUnit(double x) { return x >= 0.0 && x <= 1.0; }

std::string ChannelPointer(std::size_t c, const char* field) {
  return "/channels/" + std::to_string(c) + "/" + field;
}

}  // namespace

void Scenario::validate() const {
  if (channels.empty()) throw ConfigError("scenario needs at least one channel", "/channels");
  if (horizon < 1) throw ConfigError("horizon_T must be >= 1", "/horizon_T");
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& ch = channels[c];
    if (!(ch.rate > 0.0) || !std::isfinite(ch.rate))
      throw ConfigError("rate must be positive", ChannelPointer(c, "rate"));
    if (!InUnit(ch.fdr)) throw ConfigError("fdr must lie in [0,1]", ChannelPointer(c, "fdr"));
    if (!InUnit(ch.load)) throw ConfigError("load must lie in [0,1]", ChannelPointer(c, "load"));
  }
  const double overhead = fractions.sense + fractions.learn + fractions.switching;
  if (fractions.sense < 0 || fractions.learn < 0 || fractions.switching < 0 || !(overhead < 1.0))
    throw ConfigError("slot fractions must be non-negative and sum to less than 1",
                      "/slot_fractions");

  switch (activity.kind) {
    case ActivityKind::kIid:
      break;
    case ActivityKind::kMarkov:
      if (activity.chains.size() != channels.size())
        throw ConfigError("markov activity needs one chain per channel", "/activity/params");
      for (const auto& chain : activity.chains) {
        if (!InUnit(chain.idle_to_busy) || !InUnit(chain.busy_to_idle))
          throw ConfigError("transition probabilities must lie in [0,1]", "/activity/params");
      }
      break;
    case ActivityKind::kArbitrary:
      if (activity.schedules.size() != channels.size())
        throw ConfigError("arbitrary activity needs one schedule per channel",
                          "/activity/params");
      for (const auto& schedule : activity.schedules) {
        if (schedule.empty() || schedule.front().start_slot != 0)
          throw ConfigError("every schedule must start at slot 0", "/activity/params");
        for (std::size_t i = 0; i < schedule.size(); ++i) {
          if (!InUnit(schedule[i].load))
            throw ConfigError("schedule loads must lie in [0,1]", "/activity/params");
          if (i > 0 && schedule[i].start_slot <= schedule[i - 1].start_slot)
            throw ConfigError("change-point slots must be strictly increasing",
                              "/activity/params");
        }
      }
      break;
  }
}

void advance(const Scenario& scenario, ChannelState& state, Stream& rng) {
  const int count = scenario.channel_count();
  const bool first = state.slot < 0;
  if (first) state.occupied.assign(static_cast<std::size_t>(count), 0);
  const std::int64_t slot = state.slot + 1;

  switch (scenario.activity.kind) {
    case ActivityKind::kIid:
      for (int c = 0; c < count; ++c)
        state.occupied[c] = rng.bernoulli(scenario.channels[c].load);
      break;
    case ActivityKind::kMarkov:
      for (int c = 0; c < count; ++c) {
        const auto& chain = scenario.activity.chains[c];
        const double u = rng.uniform();
        if (first) {
          state.occupied[c] = u < chain.stationary_busy();
        } else if (state.occupied[c]) {
          state.occupied[c] = !(u < chain.busy_to_idle);
        } else {
          state.occupied[c] = u < chain.idle_to_busy;
        }
      }
      break;
    case ActivityKind::kArbitrary:
      for (int c = 0; c < count; ++c)
        state.occupied[c] = rng.bernoulli(load_at(scenario.activity.schedules[c], slot));
      break;
  }
  state.slot = slot;
}

ChannelState step(const Scenario& scenario, const ChannelState* prev, Stream& rng) {
  ChannelState next = prev ? *prev : ChannelState{};
  advance(scenario, next, rng);
  return next;
}

bool sense_busy(bool truly_busy, double accuracy, Stream& rng) {
  return rng.bernoulli(accuracy) ? truly_busy : !truly_busy;
}

std::vector<std::uint8_t> sense(const ChannelState& state, std::span<const int> channels,
                                double accuracy, Stream& rng) {
  if (channels.empty()) throw ContractViolation("sense: empty channel set");
  if (!(accuracy >= 0.5 && accuracy <= 1.0))
    throw ContractViolation("sense: accuracy must lie in [0.5, 1]");
  std::vector<std::uint8_t> sensed;
  sensed.reserve(channels.size());
  const int count = static_cast<int>(state.occupied.size());
  for (int c : channels) {
    if (c < 0 || c >= count) throw ContractViolation("sense: channel index out of range");
    sensed.push_back(sense_busy(state.busy(c), accuracy, rng));
  }
  return sensed;
}

bool deliver(const ChannelParams& channel, Stream& rng) {
  return rng.bernoulli(channel.fdr);
}

}  // namespace cogbench::env
