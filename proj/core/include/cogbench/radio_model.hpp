#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cogbench/access_policies.hpp"
#include "cogbench/rng.hpp"
#include "cogbench/spectrum_env.hpp"

namespace cogbench::radio {

using policy::PolicyKind;

// One cognitive radio: an access policy plus its hardware.
struct RadioSpec {
  int radio_id = 0;
  PolicyKind policy = PolicyKind::kRandom;
  int sensors = 1;           // observation width m
  double accuracy = 1.0;     // probability a sensing result is correct
  double hw_delay = 0.0;     // hardware delay, fraction of the slot
  double algorithmic_cost = 0.0;  // decision cost, fraction of the slot
};

struct SlotOutcome {
  std::int64_t slot = 0;
  int action = policy::kObserveOnly;
  std::optional<bool> sensed_idle;  // empty on observe-only slots
  bool transmitted = false;
  bool delivered = false;
  double throughput = 0.0;  // normalized-rate units
  double delay = 0.0;       // fraction of the slot lost to overhead
  bool violation = false;
  bool switched = false;
  bool overhead_exhausted = false;  // usable fraction clamped to 0
};

// 1 - sense - learn - hw - algorithmic - (switched ? switching : 0), floored at 0.
double usable_fraction(const RadioSpec& spec, const env::SlotFractions& fractions, bool switched);

// Runs one slot: decide, sense the played channel and the observation set,
// transmit on a sensed-idle played channel, draw delivery, update the
// policy. Radio-stream draw order: the played channel's sensing, then each
// not-yet-sensed observed channel in observation order, then delivery (only
// for transmissions onto a truly idle channel).
//
// Learner feedback: the played channel reports its realized reward
// rate * 1{delivered}; every other observed channel reports
// rate * 1{sensed idle}.
//
// `prev_action` is the last played channel (observe-only slots leave it
// unchanged); it is updated in place.
SlotOutcome run_slot(const RadioSpec& spec, policy::AccessPolicy& learner,
                     const env::Scenario& scenario, const env::ChannelState& truth,
                     std::optional<int>& prev_action, Stream& policy_rng, Stream& radio_rng);

struct GridAxes {
  std::vector<PolicyKind> policies = {PolicyKind::kUcb1, PolicyKind::kExp3, PolicyKind::kRandom,
                                      PolicyKind::kPola, PolicyKind::kProla, PolicyKind::kQLearn};
  std::vector<int> sensors = {1, 2, 6};
  std::vector<double> hw_delays = {0.0, 0.1, 0.3};
  std::vector<double> accuracies = {1.0, 0.9, 0.8};
  policy::CostTable cost_table;
};

// Cartesian product of the axes, ordered by (policy, m, hw_delay, accuracy)
// in axis order. RANDOM ignores its observations, so it is enumerated once
// with m = 1. radio_id is the 1-based position in this order.
std::vector<RadioSpec> enumerate_grid(const GridAxes& axes);

}  // namespace cogbench::radio
