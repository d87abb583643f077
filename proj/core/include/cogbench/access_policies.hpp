#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "cogbench/rng.hpp"

namespace cogbench::policy {

enum class PolicyKind { kRandom, kUcb1, kExp3, kPola, kProla, kQLearn };

inline constexpr std::array<PolicyKind, 6> kAllPolicies = {
    PolicyKind::kRandom, PolicyKind::kUcb1, PolicyKind::kExp3,
    PolicyKind::kPola,   PolicyKind::kProla, PolicyKind::kQLearn};

std::string_view to_string(PolicyKind kind) noexcept;
// Accepts the lower-case names printed by to_string ("ucb1", "qlearn", ...).
std::optional<PolicyKind> parse_policy(std::string_view name) noexcept;

inline constexpr int kObserveOnly = -1;

using ChannelList = boost::container::small_vector<int, 8>;

struct Decision {
  int action = kObserveOnly;  // channel to play, or kObserveOnly (POLA)
  ChannelList observe;        // channels whose feedback the learner receives

  bool observe_only() const noexcept { return action == kObserveOnly; }
};

// Per-slot feedback for one channel. `reward` lies in [0, 1].
struct Observation {
  int channel = 0;
  double reward = 0.0;
  std::int64_t slot = 0;
  bool was_played = false;
};

using ObservationList = boost::container::small_vector<Observation, 8>;

// Per-slot decision cost as a fraction of the slot duration.
struct CostTable {
  // Indexed by PolicyKind.
  std::array<double, 6> cost = {0.0, 0.005, 0.01, 0.01, 0.01, 0.05};

  double operator[](PolicyKind kind) const noexcept { return cost[static_cast<std::size_t>(kind)]; }
};

double algorithmic_cost(PolicyKind kind, int channel_count, const CostTable& table = {});

struct PolicyParams {
  std::optional<double> exp3_gamma;  // unset: horizon-aware default_gamma()
  double pola_eps0 = 1.0;
  double qlearn_alpha = 0.1;
  double qlearn_eps = 0.1;
  // Exponential-weights step size: gamma * m / C when set, gamma / C
  // otherwise. With m observations per slot the estimator variance drops by
  // about m, so the larger step keeps learning speed from falling as m grows.
  bool scale_rate_by_width = true;
  CostTable cost_table;
};

struct PolicySetup {
  int channels = 1;
  int width = 1;  // observations per slot (number of sensors)
  std::int64_t horizon = 1;
  PolicyParams params;
};

// min(1, sqrt(C ln C / ((e - 1) T m)))
double default_gamma(int channels, int width, std::int64_t horizon) noexcept;

// Circular observation window {a, a+1, ..., a+m-1} mod C.
ChannelList circular_window(int action, int width, int channels);

// Common state of every access strategy: channel count C, observation width
// m, horizon T and the slot counter t (number of decide() calls so far).
class AccessPolicy {
 public:
  explicit AccessPolicy(const PolicySetup& setup);
  virtual ~AccessPolicy() = default;

  AccessPolicy(const AccessPolicy&) = default;
  AccessPolicy& operator=(const AccessPolicy&) = default;

  virtual PolicyKind kind() const noexcept = 0;

  // Chooses this slot's action and observation set and advances t.
  virtual Decision decide(Stream& rng) = 0;

  // Feeds back the observations of the slot `decision` was made for.
  virtual void update(const Decision& decision, std::span<const Observation> observations) = 0;

  virtual std::unique_ptr<AccessPolicy> clone() const = 0;

  int channels() const noexcept { return channels_; }
  int width() const noexcept { return width_; }
  std::int64_t horizon() const noexcept { return horizon_; }
  std::int64_t slot() const noexcept { return slot_; }

 protected:
  // Rejects observations outside the decision's observation set.
  static void check_observed(const Decision& decision, const Observation& obs);

  int channels_;
  int width_;
  std::int64_t horizon_;
  std::int64_t slot_ = 0;
};

class RandomPolicy final : public AccessPolicy {
 public:
  explicit RandomPolicy(const PolicySetup& setup) : AccessPolicy(setup) {}
  PolicyKind kind() const noexcept override { return PolicyKind::kRandom; }
  Decision decide(Stream& rng) override;
  void update(const Decision&, std::span<const Observation>) override {}
  std::unique_ptr<AccessPolicy> clone() const override;
};

// UCB1 with side observations on the m-wide circular window of the played
// channel. The first C slots play channels 0..C-1 in order.
class Ucb1Policy final : public AccessPolicy {
 public:
  explicit Ucb1Policy(const PolicySetup& setup);
  PolicyKind kind() const noexcept override { return PolicyKind::kUcb1; }
  Decision decide(Stream& rng) override;
  void update(const Decision& decision, std::span<const Observation> observations) override;
  std::unique_ptr<AccessPolicy> clone() const override;

  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& means() const noexcept { return means_; }

  // Overrides the sufficient statistics and the slot counter.
  void set_statistics(std::vector<std::int64_t> counts, std::vector<double> means,
                      std::int64_t slot);

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> means_;
};

// Shared machinery of the exponential-weights learners. Weights are kept in
// log space; `eta` multiplies importance-weighted reward estimates.
class ExponentialWeights : public AccessPolicy {
 public:
  double gamma() const noexcept { return gamma_; }
  double eta() const noexcept { return eta_; }
  const std::vector<double>& log_weights() const noexcept { return log_weights_; }
  // Normalized weights w / sum(w).
  std::vector<double> weights() const;
  // Current sampling distribution.
  const std::vector<double>& distribution() const noexcept { return distribution_; }

 protected:
  ExponentialWeights(const PolicySetup& setup, double mixing);
  void refresh();
  void reward(int channel, double estimate) { log_weights_[channel] += eta_ * estimate; }
  int sample(Stream& rng) const;

  double gamma_;
  double mixing_;  // uniform share mixed into the distribution
  double eta_;
  std::vector<double> log_weights_;
  std::vector<double> distribution_;
};

// EXP3, p = (1 - gamma) w / sum(w) + gamma / C, observing the m-wide window
// starting at the action. Each observed channel gets x = r / q with q its
// exact probability of falling in the window.
class Exp3Policy final : public ExponentialWeights {
 public:
  explicit Exp3Policy(const PolicySetup& setup);
  PolicyKind kind() const noexcept override { return PolicyKind::kExp3; }
  Decision decide(Stream& rng) override;
  void update(const Decision& decision, std::span<const Observation> observations) override;
  std::unique_ptr<AccessPolicy> clone() const override;

  // Pr[channel observed] under the current distribution.
  double observation_probability(int channel) const;
};

// PROLA: plays from the mixed distribution and observes m channels drawn
// uniformly without replacement among the C - 1 it did not play.
class ProlaPolicy final : public ExponentialWeights {
 public:
  explicit ProlaPolicy(const PolicySetup& setup);
  PolicyKind kind() const noexcept override { return PolicyKind::kProla; }
  Decision decide(Stream& rng) override;
  void update(const Decision& decision, std::span<const Observation> observations) override;
  std::unique_ptr<AccessPolicy> clone() const override;

  double observation_probability(int channel) const;
};

// POLA: with probability eps_t = min(1, eps0 t^(-1/3)) the slot is spent
// observing m uniformly chosen channels; otherwise it plays from w / sum(w)
// and learns nothing.
class PolaPolicy final : public ExponentialWeights {
 public:
  explicit PolaPolicy(const PolicySetup& setup);
  PolicyKind kind() const noexcept override { return PolicyKind::kPola; }
  Decision decide(Stream& rng) override;
  void update(const Decision& decision, std::span<const Observation> observations) override;
  std::unique_ptr<AccessPolicy> clone() const override;

  double epsilon(std::int64_t slot) const noexcept;

 private:
  double eps0_;
  double current_eps_ = 1.0;
};

// Q-learning over channels. After every update the selection distribution is
// the solution of  max_p sum_c p_c Q_c  s.t. p in the simplex, p_c >= eps/C.
class QLearnPolicy final : public AccessPolicy {
 public:
  explicit QLearnPolicy(const PolicySetup& setup);
  PolicyKind kind() const noexcept override { return PolicyKind::kQLearn; }
  Decision decide(Stream& rng) override;
  void update(const Decision& decision, std::span<const Observation> observations) override;
  std::unique_ptr<AccessPolicy> clone() const override;

  const std::vector<double>& q_values() const noexcept { return q_; }
  const std::vector<double>& distribution() const noexcept { return distribution_; }
  double alpha() const noexcept { return alpha_; }
  double epsilon() const noexcept { return eps_; }

  void set_q_values(std::vector<double> q);

  // Closed-form optimum of the floored LP; ties go to the lowest index.
  static std::vector<double> lp_distribution(std::span<const double> q, double eps);

 private:
  double alpha_;
  double eps_;
  std::vector<double> q_;
  std::vector<double> distribution_;
};

std::unique_ptr<AccessPolicy> make_policy(PolicyKind kind, const PolicySetup& setup);

}  // namespace cogbench::policy
