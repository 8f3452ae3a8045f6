#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dbandit/delay.hpp"
#include "dbandit/rng.hpp"

namespace dbandit {

namespace delay {

// Every pull waits exactly `rounds`.
struct Fixed {
  std::int64_t rounds = 0;
};

// Survival P[X > x] = x^-alpha on x >= 1, discretised as ceil(X) - 1 so the
// support starts at 0. One tail index per arm.
struct Pareto {
  std::vector<double> alpha;
};

// Immediate feedback with probability p[arm], lost forever otherwise.
struct PacketLoss {
  std::vector<double> p;
};

// Failures before the first success: P[l = k] = (1-p)^k p, k >= 0.
struct Geometric {
  double p = 1.0;
};

// Uniform over the integers lo..hi inclusive.
struct UniformInt {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// Per-arm single-server FIFO queue with Exponential(service_rate) service
// times in continuous time. Not i.i.d.: depends on the arm's queue clock.
struct QueueBased {
  double service_rate = 1.0;
};

}  // namespace delay

using DelayFamily = std::variant<delay::Fixed, delay::Pareto, delay::PacketLoss,
                                 delay::Geometric, delay::UniformInt, delay::QueueBased>;

// Continuous busy-until time of each arm's queue. Only QueueBased reads it.
using QueueClocks = std::vector<double>;

class DelayModel {
 public:
  // Throws ConfigError when parameters violate the family's constraints.
  explicit DelayModel(DelayFamily family);

  const DelayFamily& family() const noexcept { return family_; }
  std::string family_name() const;

  // Per-arm families constrain the number of arms; shared ones accept any.
  bool has_per_arm_parameters() const noexcept;
  std::size_t arm_count() const noexcept;  // 0 when shared
  bool is_iid() const noexcept;

  // Draws the delay of a pull of `arm` made at `pull_round`. QueueBased
  // advances clocks[arm]; other families ignore the clocks.
  Delay sample(std::size_t arm, Round pull_round, QueueClocks& clocks, Rng& rng) const;

  // Convenience for i.i.d. families.
  Delay sample(std::size_t arm, Rng& rng) const;

  // inf{d : P[l <= d | arm] >= q} over the integer support, q in (0, 1].
  // Throws UnsupportedFamily for QueueBased and ContractViolation for q
  // outside (0, 1].
  Delay quantile(std::size_t arm, double q) const;

  // P[l <= d | arm] for the finite delay d. i.i.d. families only.
  double cdf(std::size_t arm, std::int64_t d) const;

 private:
  void check_arm(std::size_t arm) const;

  DelayFamily family_;
};

}  // namespace dbandit
