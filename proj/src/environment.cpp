#include "dbandit/environment.hpp"

#include <sstream>

#include "dbandit/errors.hpp"

namespace dbandit {

Environment::Environment(BanditInstance instance, DelayModel delays, Round horizon, std::uint64_t seed)
    : instance_(std::move(instance)), delays_(std::move(delays)), horizon_(horizon) {
  if (horizon_ < 1) throw ConfigError("horizon must be >= 1");
  const std::size_t k = delays_.arm_count();
  if (k != 0 && k != instance_.arm_count()) {
    std::ostringstream os;
    os << delays_.family_name() << " delay model has " << k << " arms, instance has "
       << instance_.arm_count();
    throw ConfigError(os.str());
  }
  reset(seed);
}

void Environment::reset(std::uint64_t seed) {
  round_ = 1;
  pending_ = {};
  clocks_.assign(instance_.arm_count(), 0.0);
  reward_rng_.seed(derive_seed(seed, Stream::kReward));
  delay_rng_.seed(derive_seed(seed, Stream::kDelay));
  counters_ = {};
  last_delay_ = Delay{};
}

FeedbackBatch Environment::step(std::size_t arm) {
  if (arm >= instance_.arm_count()) {
    std::ostringstream os;
    os << "arm " << arm << " out of range [0, " << instance_.arm_count() << ")";
    throw ContractViolation(os.str());
  }
  if (done()) throw ContractViolation("step past the horizon");

  const Round t = round_;
  const int reward = std::bernoulli_distribution(instance_.mean(arm))(reward_rng_) ? 1 : 0;
  const Delay l = delays_.sample(arm, t, clocks_, delay_rng_);
  last_delay_ = l;
  ++counters_.pulls;

  if (l.is_infinite()) {
    ++counters_.lost;
  } else if (l.count() > horizon_ - t) {
    ++counters_.beyond_horizon;
  } else {
    pending_.push({t + l.count(), t, arm, reward});
  }

  FeedbackBatch batch;
  while (!pending_.empty() && pending_.top().reveal_round == t) {
    const PendingReveal& top = pending_.top();
    batch.push_back({top.arm, top.reward});
    pending_.pop();
  }
  counters_.delivered += static_cast<std::int64_t>(batch.size());
  ++round_;
  return batch;
}

}  // namespace dbandit
