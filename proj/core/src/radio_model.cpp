#include "cogbench/radio_model.hpp"

#include <algorithm>

#include "cogbench/errors.hpp"

namespace cogbench::radio {

double usable_fraction(const RadioSpec& spec, const env::SlotFractions& fractions, bool switched) {
  const double usable = 1.0 - fractions.sense - fractions.learn - spec.hw_delay -
                        spec.algorithmic_cost - (switched ? fractions.switching : 0.0);
  return std::max(0.0, usable);
}

SlotOutcome run_slot(const RadioSpec& spec, policy::AccessPolicy& learner,
                     const env::Scenario& scenario, const env::ChannelState& truth,
                     std::optional<int>& prev_action, Stream& policy_rng, Stream& radio_rng) {
  const policy::Decision decision = learner.decide(policy_rng);

  SlotOutcome out;
  out.slot = truth.slot;
  out.action = decision.action;

  // Sensed-busy flags, indexed like decision.observe.
  boost::container::small_vector<std::uint8_t, 8> observed_busy(decision.observe.size(), 0);
  bool action_busy_sensed = false;

  if (!decision.observe_only()) {
    const int a = decision.action;
    out.switched = prev_action.has_value() && *prev_action != a;
    action_busy_sensed = env::sense_busy(truth.busy(a), spec.accuracy, radio_rng);
    out.sensed_idle = !action_busy_sensed;
  }
  for (std::size_t i = 0; i < decision.observe.size(); ++i) {
    const int c = decision.observe[i];
    observed_busy[i] = c == decision.action
                           ? action_busy_sensed
                           : env::sense_busy(truth.busy(c), spec.accuracy, radio_rng);
  }

  const double usable = usable_fraction(spec, scenario.fractions, out.switched);
  out.overhead_exhausted = usable <= 0.0;
  out.delay = 1.0 - usable;

  double played_reward = 0.0;
  if (!decision.observe_only()) {
    const int a = decision.action;
    const auto& channel = scenario.channels[a];
    if (!action_busy_sensed) {
      out.transmitted = true;
      if (truth.busy(a)) {
        out.violation = true;  // blocked by the PU, nothing gets through
      } else {
        out.delivered = env::deliver(channel, radio_rng);
        if (out.delivered) {
          played_reward = channel.rate;
          out.throughput = channel.rate * usable;
        }
      }
    }
    prev_action = a;
  }

  policy::ObservationList observations;
  for (std::size_t i = 0; i < decision.observe.size(); ++i) {
    const int c = decision.observe[i];
    const bool played = c == decision.action;
    const double reward = played ? played_reward : (observed_busy[i] ? 0.0 : scenario.channels[c].rate);
    observations.push_back({c, reward, truth.slot, played});
  }
  learner.update(decision, std::span<const policy::Observation>(observations.data(), observations.size()));
  return out;
}

std::vector<RadioSpec> enumerate_grid(const GridAxes& axes) {
  for (int m : axes.sensors) {
    if (m < 1) throw ConfigError("sensor counts must be >= 1");
  }
  for (double a : axes.accuracies) {
    if (!(a >= 0.5 && a <= 1.0)) throw ConfigError("sensing accuracy must lie in [0.5, 1]");
  }
  for (double h : axes.hw_delays) {
    if (!(h >= 0.0 && h < 1.0)) throw ConfigError("hardware delay must lie in [0, 1)");
  }

  std::vector<RadioSpec> specs;
  int next_id = 1;
  for (PolicyKind kind : axes.policies) {
    const std::vector<int> sensors =
        kind == PolicyKind::kRandom ? std::vector<int>{1} : axes.sensors;
    for (int m : sensors) {
      for (double hw : axes.hw_delays) {
        for (double acc : axes.accuracies) {
          specs.push_back({next_id++, kind, m, acc, hw, policy::algorithmic_cost(kind, 1, axes.cost_table)});
        }
      }
    }
  }
  return specs;
}

}  // namespace cogbench::radio
