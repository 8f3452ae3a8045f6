#include "dbandit/policy.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "dbandit/errors.hpp"

namespace dbandit {

std::size_t argmax_random_tie(std::span<const double> values, Rng& rng) {
  if (values.empty()) throw ContractViolation("argmax of an empty range");
  std::size_t best = 0;
  std::size_t ties = 1;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
      ties = 1;
    } else if (values[i] == values[best]) {
      ++ties;
    }
  }
  if (ties == 1) return best;

  auto pick = std::uniform_int_distribution<std::size_t>(0, ties - 1)(rng);
  for (std::size_t i = best; i < values.size(); ++i) {
    if (values[i] == values[best] && pick-- == 0) return i;
  }
  return best;  // unreachable
}

void ArmTallies::add(std::span<const Observation> batch) {
  for (const Observation& o : batch) {
    if (o.arm >= count_.size()) throw ContractViolation("observation for an unknown arm");
    if (o.reward != 0 && o.reward != 1) {
      std::ostringstream os;
      os << "non-binary reward " << o.reward << " for arm " << o.arm;
      throw ContractViolation(os.str());
    }
  }
  for (const Observation& o : batch) {
    ++count_[o.arm];
    sum_[o.arm] += o.reward;
  }
  total_ += static_cast<std::int64_t>(batch.size());
}

double ArmTallies::mean(std::size_t arm) const {
  const std::int64_t n = count_.at(arm);
  return n == 0 ? 0.0 : static_cast<double>(sum_[arm]) / static_cast<double>(n);
}

// --- Thompson Sampling ------------------------------------------------------

ThompsonSampling::ThompsonSampling(std::size_t arms) : tallies_(arms), theta_(arms) {
  if (arms < 1) throw ConfigError("policy needs at least one arm");
}

double ThompsonSampling::sample_beta(double a, double b, Rng& rng) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x / (x + y);
}

std::size_t ThompsonSampling::select(Round, Rng& rng) {
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    theta_[i] = sample_beta(static_cast<double>(tallies_.successes(i)) + 1.0,
                            static_cast<double>(tallies_.failures(i)) + 1.0, rng);
  }
  return argmax_random_tie(theta_, rng);
}

// --- Delayed-UCB1 -----------------------------------------------------------

DelayedUcb1::DelayedUcb1(std::size_t arms) : tallies_(arms), index_(arms) {
  if (arms < 1) throw ConfigError("policy needs at least one arm");
}

double DelayedUcb1::index(std::size_t arm, Round t) const {
  const std::int64_t n = tallies_.count(arm);
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double bonus = std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(n));
  return tallies_.mean(arm) + bonus;
}

std::size_t DelayedUcb1::select(Round t, Rng& rng) {
  if (t < 1) throw ContractViolation("rounds start at 1");
  for (std::size_t i = 0; i < index_.size(); ++i) index_[i] = index(i, t);
  return argmax_random_tie(index_, rng);
}

// --- Successive Elimination -------------------------------------------------

SuccessiveElimination::SuccessiveElimination(std::size_t arms) : tallies_(arms) {
  if (arms < 1) throw ConfigError("policy needs at least one arm");
  active_.resize(arms);
  for (std::size_t i = 0; i < arms; ++i) active_[i] = i;
  sweep_ = active_;
}

double SuccessiveElimination::radius(std::int64_t observed) {
  return std::sqrt(2.0 / static_cast<double>(std::max<std::int64_t>(observed, 1)));
}

void SuccessiveElimination::eliminate() {
  double best_lower = -std::numeric_limits<double>::infinity();
  for (std::size_t i : active_)
    best_lower = std::max(best_lower, tallies_.mean(i) - radius(tallies_.count(i)));

  std::vector<std::size_t> kept;
  kept.reserve(active_.size());
  for (std::size_t i : active_) {
    if (!(tallies_.mean(i) + radius(tallies_.count(i)) < best_lower)) kept.push_back(i);
  }
  active_ = std::move(kept);
}

std::size_t SuccessiveElimination::select(Round, Rng&) {
  if (cursor_ == sweep_.size()) {
    ++sweeps_;
    eliminate();
    sweep_ = active_;
    cursor_ = 0;
  }
  return sweep_[cursor_++];
}

// --- factory ----------------------------------------------------------------

namespace {
constexpr std::array<std::string_view, 3> kPolicyNames{"ts", "ducb1", "se"};
}

std::span<const std::string_view> policy_names() noexcept { return kPolicyNames; }

std::unique_ptr<Policy> make_policy(std::string_view name, std::size_t arms) {
  if (name == "ts") return std::make_unique<ThompsonSampling>(arms);
  if (name == "ducb1") return std::make_unique<DelayedUcb1>(arms);
  if (name == "se") return std::make_unique<SuccessiveElimination>(arms);
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected ts, ducb1 or se)");
}

}  // namespace dbandit
