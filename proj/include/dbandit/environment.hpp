#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "dbandit/bandit_instance.hpp"
#include "dbandit/delay.hpp"
#include "dbandit/delay_model.hpp"
#include "dbandit/rng.hpp"

namespace dbandit {

// One revealed (arm, reward) pair. Deliberately carries no timing.
struct Observation {
  std::size_t arm = 0;
  int reward = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Everything revealed at the end of one round, ordered by pull round.
using FeedbackBatch = std::vector<Observation>;

struct PendingReveal {
  Round reveal_round = 0;
  Round pull_round = 0;
  std::size_t arm = 0;
  int reward = 0;

  friend auto operator<=>(const PendingReveal& a, const PendingReveal& b) {
    if (auto c = a.reveal_round <=> b.reveal_round; c != 0) return c;
    if (auto c = a.pull_round <=> b.pull_round; c != 0) return c;
    return a.arm <=> b.arm;
  }
  friend bool operator==(const PendingReveal&, const PendingReveal&) = default;
};

// Running totals for conservation checks:
// delivered + pending + beyond_horizon + lost == pulls.
struct FeedbackCounters {
  std::int64_t pulls = 0;
  std::int64_t delivered = 0;
  std::int64_t lost = 0;            // infinite delay
  std::int64_t beyond_horizon = 0;  // finite delay landing after the horizon
};

// Round-by-round delayed-feedback protocol. Each step draws the reward and
// the delay of the chosen arm, schedules the reveal, and returns every
// reveal due in that round (including the fresh pull when its delay is 0).
// Rewards and delays come from two separate substreams of the reset seed.
class Environment {
 public:
  Environment(BanditInstance instance, DelayModel delays, Round horizon, std::uint64_t seed);

  // Back to round 1 with nothing pending and idle queues.
  void reset(std::uint64_t seed);

  // Plays `arm` in the current round. Throws ContractViolation on a bad arm
  // or once the horizon is exhausted.
  FeedbackBatch step(std::size_t arm);

  Round round() const noexcept { return round_; }
  Round horizon() const noexcept { return horizon_; }
  bool done() const noexcept { return round_ > horizon_; }

  const BanditInstance& instance() const noexcept { return instance_; }
  const DelayModel& delays() const noexcept { return delays_; }

  std::size_t pending_count() const noexcept { return pending_.size(); }
  const FeedbackCounters& counters() const noexcept { return counters_; }
  const QueueClocks& queue_clocks() const noexcept { return clocks_; }

  // Timing of the most recent pull; for tests and diagnostics only, never
  // handed to policies.
  Delay last_delay() const noexcept { return last_delay_; }

 private:
  BanditInstance instance_;
  DelayModel delays_;
  Round horizon_;

  Round round_ = 1;
  std::priority_queue<PendingReveal, std::vector<PendingReveal>, std::greater<>> pending_;
  QueueClocks clocks_;
  Rng reward_rng_;
  Rng delay_rng_;
  FeedbackCounters counters_;
  Delay last_delay_;
};

}  // namespace dbandit
