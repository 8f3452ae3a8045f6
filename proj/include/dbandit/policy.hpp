#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dbandit/delay.hpp"
#include "dbandit/environment.hpp"
#include "dbandit/rng.hpp"

namespace dbandit {

// A delay-agnostic bandit policy. It sees the round index and the revealed
// (arm, reward) pairs and nothing else; baselines that need oracle delay
// information would receive it through their own constructor.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t arm_count() const noexcept = 0;

  // Arm to play at round t (1-based). All randomness comes from `rng`.
  virtual std::size_t select(Round t, Rng& rng) = 0;

  // Ingest a batch of reveals. Throws ContractViolation on a reward other
  // than 0 or 1 or an arm out of range.
  virtual void observe(std::span<const Observation> batch) = 0;

  // Total number of rewards ingested so far.
  virtual std::int64_t observed_count() const noexcept = 0;
};

// Index of the largest value; ties broken uniformly at random. Draws from
// `rng` only when there is an actual tie.
std::size_t argmax_random_tie(std::span<const double> values, Rng& rng);

// Shared per-arm tallies of observed rewards.
class ArmTallies {
 public:
  explicit ArmTallies(std::size_t arms) : count_(arms, 0), sum_(arms, 0) {}

  void add(std::span<const Observation> batch);

  std::size_t arm_count() const noexcept { return count_.size(); }
  std::int64_t count(std::size_t arm) const { return count_.at(arm); }
  std::int64_t successes(std::size_t arm) const { return sum_.at(arm); }
  std::int64_t failures(std::size_t arm) const { return count_.at(arm) - sum_.at(arm); }
  std::int64_t total() const noexcept { return total_; }

  // Empirical mean, 0 for an unobserved arm.
  double mean(std::size_t arm) const;

 private:
  std::vector<std::int64_t> count_;
  std::vector<std::int64_t> sum_;
  std::int64_t total_ = 0;
};

// Beta-Bernoulli Thompson Sampling with a uniform prior. Every round draws
// theta_i ~ Beta(S_i + 1, F_i + 1) for arms 0..K-1 in order, each as a ratio
// of two Gamma variates, and plays the argmax.
class ThompsonSampling final : public Policy {
 public:
  explicit ThompsonSampling(std::size_t arms);

  std::string_view name() const noexcept override { return "ts"; }
  std::size_t arm_count() const noexcept override { return tallies_.arm_count(); }
  std::size_t select(Round t, Rng& rng) override;
  void observe(std::span<const Observation> batch) override { tallies_.add(batch); }
  std::int64_t observed_count() const noexcept override { return tallies_.total(); }

  std::int64_t successes(std::size_t arm) const { return tallies_.successes(arm); }
  std::int64_t failures(std::size_t arm) const { return tallies_.failures(arm); }

  // Draw from Beta(a, b) using the same recipe select() uses.
  static double sample_beta(double a, double b, Rng& rng);

 private:
  ArmTallies tallies_;
  std::vector<double> theta_;
};

// UCB1 fed with whatever feedback has arrived:
// index_i = mean_i + sqrt(2 ln t / n_i), +inf for unobserved arms.
class DelayedUcb1 final : public Policy {
 public:
  explicit DelayedUcb1(std::size_t arms);

  std::string_view name() const noexcept override { return "ducb1"; }
  std::size_t arm_count() const noexcept override { return tallies_.arm_count(); }
  std::size_t select(Round t, Rng& rng) override;
  void observe(std::span<const Observation> batch) override { tallies_.add(batch); }
  std::int64_t observed_count() const noexcept override { return tallies_.total(); }

  double index(std::size_t arm, Round t) const;
  const ArmTallies& tallies() const noexcept { return tallies_; }

 private:
  ArmTallies tallies_;
  std::vector<double> index_;
};

// Successive elimination with delays. Sweeps the active set round-robin;
// when a sweep finishes, confidence radii sqrt(2 / max(n_i, 1)) are
// recomputed from all feedback seen so far and every arm whose upper bound
// falls below some other arm's lower bound is dropped for good.
class SuccessiveElimination final : public Policy {
 public:
  explicit SuccessiveElimination(std::size_t arms);

  std::string_view name() const noexcept override { return "se"; }
  std::size_t arm_count() const noexcept override { return tallies_.arm_count(); }
  std::size_t select(Round t, Rng& rng) override;
  void observe(std::span<const Observation> batch) override { tallies_.add(batch); }
  std::int64_t observed_count() const noexcept override { return tallies_.total(); }

  static double radius(std::int64_t observed);

  // Applies the elimination rule to the current tallies. select() calls
  // this at every sweep boundary.
  void eliminate();

  std::span<const std::size_t> active() const noexcept { return active_; }
  std::int64_t sweeps_completed() const noexcept { return sweeps_; }
  const ArmTallies& tallies() const noexcept { return tallies_; }

  // Test hook: preload tallies as if these rewards had been observed.
  void preload(std::span<const Observation> batch) { tallies_.add(batch); }

 private:
  ArmTallies tallies_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> sweep_;
  std::size_t cursor_ = 0;
  std::int64_t sweeps_ = 0;
};

// Policy names accepted by make_policy.
std::span<const std::string_view> policy_names() noexcept;

// "ts", "ducb1" or "se". Throws ConfigError for anything else.
std::unique_ptr<Policy> make_policy(std::string_view name, std::size_t arms);

}  // namespace dbandit
