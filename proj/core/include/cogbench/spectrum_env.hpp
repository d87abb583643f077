#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cogbench/rng.hpp"

namespace cogbench::env {

// One licensed channel. `rate` is normalized so the fastest channel of the
// scenario has rate 1.
struct ChannelParams {
  double rate = 1.0;
  double fdr = 1.0;   // frame-delivery probability
  double load = 0.0;  // PU-active probability (stationary load for MARKOV)
};

enum class ActivityKind { kIid, kMarkov, kArbitrary };

std::string_view to_string(ActivityKind kind) noexcept;

struct MarkovChain {
  double idle_to_busy = 0.0;
  double busy_to_idle = 1.0;

  double stationary_busy() const noexcept;
};

struct ChangePoint {
  std::int64_t start_slot = 0;
  double load = 0.0;
};

// Piecewise-constant PU load. Change points are strictly increasing.
using LoadSchedule = std::vector<ChangePoint>;

// Throws ConfigError if no segment covers `slot`.
double load_at(const LoadSchedule& schedule, std::int64_t slot);

struct PuActivityModel {
  ActivityKind kind = ActivityKind::kIid;
  std::vector<MarkovChain> chains;       // MARKOV, one per channel
  std::vector<LoadSchedule> schedules;   // ARBITRARY, one per channel
};

// Sensing, learning and switching shares of the slot duration.
struct SlotFractions {
  double sense = 0.1;
  double learn = 0.05;
  double switching = 0.05;
};

struct Scenario {
  int scenario_id = 0;
  std::vector<ChannelParams> channels;
  PuActivityModel activity;
  std::int64_t horizon = 1;
  SlotFractions fractions;
  double raw_rate_max = 1.0;  // Mbit/s of the fastest channel before normalization

  int channel_count() const noexcept { return static_cast<int>(channels.size()); }

  // Checks every structural invariant; throws ConfigError.
  void validate() const;
};

struct ChannelState {
  std::vector<std::uint8_t> occupied;  // 1 = PU present
  std::int64_t slot = -1;

  bool busy(int channel) const { return occupied[static_cast<std::size_t>(channel)] != 0; }
};

// Advances `state` to the next slot in place (slot -1 means "no previous
// slot"). Draws exactly one uniform per channel from `rng`, in channel order.
void advance(const Scenario& scenario, ChannelState& state, Stream& rng);

// Value-returning form of advance(); `prev` is null only at slot 0.
ChannelState step(const Scenario& scenario, const ChannelState* prev, Stream& rng);

// Imperfect carrier sense: the returned value equals the truth with
// probability `accuracy`, independently for every call.
bool sense_busy(bool truly_busy, double accuracy, Stream& rng);

// Senses `channels` in order; returns one sensed-busy flag per entry.
std::vector<std::uint8_t> sense(const ChannelState& state, std::span<const int> channels,
                                double accuracy, Stream& rng);

bool deliver(const ChannelParams& channel, Stream& rng);

}  // namespace cogbench::env
