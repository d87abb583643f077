#include "cogbench/access_policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cogbench/errors.hpp"

namespace cogbench::policy {

std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kUcb1: return "ucb1";
    case PolicyKind::kExp3: return "exp3";
    case PolicyKind::kPola: return "pola";
    case PolicyKind::kProla: return "prola";
    case PolicyKind::kQLearn: return "qlearn";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) noexcept {
  for (PolicyKind kind : kAllPolicies) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "q-learning" || name == "qlearning") return PolicyKind::kQLearn;
  return std::nullopt;
}

double algorithmic_cost(PolicyKind kind, int channel_count, const CostTable& table) {
  if (channel_count < 1) throw ContractViolation("algorithmic_cost: channel count must be >= 1");
  return table[kind];
}

double default_gamma(int channels, int width, std::int64_t horizon) noexcept {
  const double c = channels;
  const double g = std::sqrt(c * std::log(c) /
                             ((std::numbers::e - 1.0) * static_cast<double>(horizon) * width));
  return std::min(1.0, g);
}

ChannelList circular_window(int action, int width, int channels) {
  ChannelList window;
  for (int j = 0; j < width; ++j) window.push_back((action + j) % channels);
  return window;
}

namespace {

// Inverse-CDF draw; one uniform.
int SampleIndex(const std::vector<double>& p, Stream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = static_cast<int>(i);
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return last_positive;
}

// m distinct entries of `pool` by partial Fisher-Yates; m uniforms.
ChannelList SampleWithoutReplacement(ChannelList pool, int m, Stream& rng) {
  const int n = static_cast<int>(pool.size());
  for (int i = 0; i < m; ++i) {
    const int j = i + rng.index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(m));
  return pool;
}

}  // namespace

// ---------------------------------------------------------------------------

AccessPolicy::AccessPolicy(const PolicySetup& setup)
    : channels_(setup.channels), width_(setup.width), horizon_(setup.horizon) {
  if (channels_ < 1) throw ConfigError("policy needs at least one channel");
  if (width_ < 1 || width_ > channels_)
    throw ConfigError("observation width m=" + std::to_string(width_) +
                      " must satisfy 1 <= m <= C=" + std::to_string(channels_));
  if (horizon_ < channels_) throw ContractViolation("policy horizon T must be >= C");
}

void AccessPolicy::check_observed(const Decision& decision, const Observation& obs) {
  if (std::find(decision.observe.begin(), decision.observe.end(), obs.channel) ==
      decision.observe.end())
    throw ContractViolation("observation for channel " + std::to_string(obs.channel) +
                            " outside the decision's observation set");
}

// ---------------------------------------------------------------------------

Decision RandomPolicy::decide(Stream& rng) {
  ++slot_;
  Decision d;
  d.action = rng.index(channels_);
  d.observe.push_back(d.action);
  return d;
}

std::unique_ptr<AccessPolicy> RandomPolicy::clone() const {
  return std::make_unique<RandomPolicy>(*this);
}

// ---------------------------------------------------------------------------

Ucb1Policy::Ucb1Policy(const PolicySetup& setup)
    : AccessPolicy(setup),
      counts_(static_cast<std::size_t>(channels_), 0),
      means_(static_cast<std::size_t>(channels_), 0.0) {}

Decision Ucb1Policy::decide(Stream& /*rng*/) {
  ++slot_;
  int action = 0;
  if (slot_ <= channels_) {
    action = static_cast<int>(slot_ - 1);
  } else {
    const double log_t = std::log(static_cast<double>(slot_));
    double best = -1.0;
    for (int c = 0; c < channels_; ++c) {
      const double index = counts_[c] == 0
                               ? std::numeric_limits<double>::infinity()
                               : means_[c] + std::sqrt(2.0 * log_t / static_cast<double>(counts_[c]));
      if (index > best) {
        best = index;
        action = c;
      }
    }
  }
  return {action, circular_window(action, width_, channels_)};
}

void Ucb1Policy::update(const Decision& decision, std::span<const Observation> observations) {
  for (const auto& obs : observations) {
    check_observed(decision, obs);
    auto& n = counts_[obs.channel];
    ++n;
    means_[obs.channel] += (obs.reward - means_[obs.channel]) / static_cast<double>(n);
  }
}

void Ucb1Policy::set_statistics(std::vector<std::int64_t> counts, std::vector<double> means,
                                std::int64_t slot) {
  if (counts.size() != static_cast<std::size_t>(channels_) || means.size() != counts.size())
    throw ContractViolation("set_statistics: need one count and mean per channel");
  counts_ = std::move(counts);
  means_ = std::move(means);
  slot_ = slot;
}

std::unique_ptr<AccessPolicy> Ucb1Policy::clone() const {
  return std::make_unique<Ucb1Policy>(*this);
}

// ---------------------------------------------------------------------------

ExponentialWeights::ExponentialWeights(const PolicySetup& setup, double mixing)
    : AccessPolicy(setup),
      gamma_(setup.params.exp3_gamma.value_or(default_gamma(channels_, width_, horizon_))),
      mixing_(mixing),
      log_weights_(static_cast<std::size_t>(channels_), 0.0),
      distribution_(static_cast<std::size_t>(channels_), 1.0 / channels_) {
  if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw ConfigError("exp3_gamma must lie in [0,1]");
  const double scale = setup.params.scale_rate_by_width ? width_ : 1;
  eta_ = gamma_ * scale / channels_;
}

std::vector<double> ExponentialWeights::weights() const {
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  std::vector<double> w(log_weights_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = std::exp(log_weights_[i] - top));
  for (double& x : w) x /= total;
  return w;
}

void ExponentialWeights::refresh() {
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  double total = 0.0;
  for (int c = 0; c < channels_; ++c) total += (distribution_[c] = std::exp(log_weights_[c] - top));
  const double floor = mixing_ / channels_;
  for (double& p : distribution_) p = (1.0 - mixing_) * p / total + floor;
}

int ExponentialWeights::sample(Stream& rng) const { return SampleIndex(distribution_, rng); }

// ---------------------------------------------------------------------------

Exp3Policy::Exp3Policy(const PolicySetup& setup) : ExponentialWeights(setup, 0.0) {
  mixing_ = gamma_;
  refresh();
}

Decision Exp3Policy::decide(Stream& rng) {
  ++slot_;
  const int action = sample(rng);
  return {action, circular_window(action, width_, channels_)};
}

double Exp3Policy::observation_probability(int channel) const {
  double q = 0.0;
  for (int j = 0; j < width_; ++j) q += distribution_[(channel - j + channels_) % channels_];
  return q;
}

void Exp3Policy::update(const Decision& decision, std::span<const Observation> observations) {
  for (const auto& obs : observations) {
    check_observed(decision, obs);
    const double q = observation_probability(obs.channel);
    if (!(q > 0.0)) throw InternalError("EXP3: observed channel has zero observation probability");
    reward(obs.channel, obs.reward / q);
  }
  refresh();
}

std::unique_ptr<AccessPolicy> Exp3Policy::clone() const {
  return std::make_unique<Exp3Policy>(*this);
}

// ---------------------------------------------------------------------------

ProlaPolicy::ProlaPolicy(const PolicySetup& setup) : ExponentialWeights(setup, 0.0) {
  if (width_ > channels_ - 1)
    throw ConfigError("PROLA observes channels other than the played one: need m <= C - 1");
  mixing_ = gamma_;
  refresh();
}

Decision ProlaPolicy::decide(Stream& rng) {
  ++slot_;
  const int action = sample(rng);
  ChannelList others;
  for (int c = 0; c < channels_; ++c) {
    if (c != action) others.push_back(c);
  }
  return {action, SampleWithoutReplacement(std::move(others), width_, rng)};
}

double ProlaPolicy::observation_probability(int channel) const {
  return (1.0 - distribution_[channel]) * width_ / (channels_ - 1);
}

void ProlaPolicy::update(const Decision& decision, std::span<const Observation> observations) {
  for (const auto& obs : observations) {
    check_observed(decision, obs);
    if (obs.channel == decision.action)
      throw ContractViolation("PROLA never observes the played channel");
    const double q = observation_probability(obs.channel);
    if (!(q > 0.0)) throw InternalError("PROLA: observed channel has zero observation probability");
    reward(obs.channel, obs.reward / q);
  }
  refresh();
}

std::unique_ptr<AccessPolicy> ProlaPolicy::clone() const {
  return std::make_unique<ProlaPolicy>(*this);
}

// ---------------------------------------------------------------------------

PolaPolicy::PolaPolicy(const PolicySetup& setup)
    : ExponentialWeights(setup, 0.0), eps0_(setup.params.pola_eps0) {
  if (!(eps0_ > 0.0)) throw ConfigError("pola_eps0 must be positive");
  refresh();
}

double PolaPolicy::epsilon(std::int64_t slot) const noexcept {
  return std::min(1.0, eps0_ * std::pow(static_cast<double>(slot), -1.0 / 3.0));
}

Decision PolaPolicy::decide(Stream& rng) {
  ++slot_;
  current_eps_ = epsilon(slot_);
  Decision d;
  if (rng.uniform() < current_eps_) {
    ChannelList all;
    for (int c = 0; c < channels_; ++c) all.push_back(c);
    d.action = kObserveOnly;
    d.observe = SampleWithoutReplacement(std::move(all), width_, rng);
  } else {
    d.action = sample(rng);
  }
  return d;
}

void PolaPolicy::update(const Decision& decision, std::span<const Observation> observations) {
  if (!decision.observe_only()) {
    if (!observations.empty())
      throw ContractViolation("POLA receives no feedback on play slots");
    return;
  }
  const double q = current_eps_ * width_ / channels_;
  if (!(q > 0.0)) throw InternalError("POLA: zero observation probability");
  for (const auto& obs : observations) {
    check_observed(decision, obs);
    reward(obs.channel, obs.reward / q);
  }
  refresh();
}

std::unique_ptr<AccessPolicy> PolaPolicy::clone() const {
  return std::make_unique<PolaPolicy>(*this);
}

// ---------------------------------------------------------------------------

QLearnPolicy::QLearnPolicy(const PolicySetup& setup)
    : AccessPolicy(setup),
      alpha_(setup.params.qlearn_alpha),
      eps_(setup.params.qlearn_eps),
      q_(static_cast<std::size_t>(channels_), 0.0),
      distribution_(static_cast<std::size_t>(channels_), 1.0 / channels_) {
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) throw ConfigError("qlearn_alpha must lie in (0,1]");
  if (!(eps_ >= 0.0 && eps_ <= 1.0)) throw ConfigError("qlearn_eps must lie in [0,1]");
}

std::vector<double> QLearnPolicy::lp_distribution(std::span<const double> q, double eps) {
  if (q.empty()) throw ContractViolation("lp_distribution: empty Q vector");
  const std::size_t n = q.size();
  const double floor = eps / static_cast<double>(n);
  std::size_t best = 0;
  for (std::size_t c = 1; c < n; ++c) {
    if (q[c] > q[best]) best = c;
  }
  std::vector<double> p(n, floor);
  p[best] = 1.0 - floor * static_cast<double>(n - 1);
  return p;
}

Decision QLearnPolicy::decide(Stream& rng) {
  ++slot_;
  const bool explore = rng.uniform() < eps_;
  const int action = explore ? rng.index(channels_) : SampleIndex(distribution_, rng);
  return {action, circular_window(action, width_, channels_)};
}

void QLearnPolicy::update(const Decision& decision, std::span<const Observation> observations) {
  for (const auto& obs : observations) {
    check_observed(decision, obs);
    q_[obs.channel] = (1.0 - alpha_) * q_[obs.channel] + alpha_ * obs.reward;
  }
  distribution_ = lp_distribution(q_, eps_);
}

void QLearnPolicy::set_q_values(std::vector<double> q) {
  if (q.size() != static_cast<std::size_t>(channels_))
    throw ContractViolation("set_q_values: need one value per channel");
  q_ = std::move(q);
  distribution_ = lp_distribution(q_, eps_);
}

std::unique_ptr<AccessPolicy> QLearnPolicy::clone() const {
  return std::make_unique<QLearnPolicy>(*this);
}

// ---------------------------------------------------------------------------

std::unique_ptr<AccessPolicy> make_policy(PolicyKind kind, const PolicySetup& setup) {
  switch (kind) {
    case PolicyKind::kRandom: return std::make_unique<RandomPolicy>(setup);
    case PolicyKind::kUcb1: return std::make_unique<Ucb1Policy>(setup);
    case PolicyKind::kExp3: return std::make_unique<Exp3Policy>(setup);
    case PolicyKind::kPola: return std::make_unique<PolaPolicy>(setup);
    case PolicyKind::kProla: return std::make_unique<ProlaPolicy>(setup);
    case PolicyKind::kQLearn: return std::make_unique<QLearnPolicy>(setup);
  }
  throw ContractViolation("make_policy: unknown policy kind");
}

}  // namespace cogbench::policy
