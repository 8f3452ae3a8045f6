#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dbandit {

// Bernoulli arms with a unique best mean. Hidden from policies.
class BanditInstance {
 public:
  // Throws ConfigError unless K >= 2, every mean lies in [0, 1] and the
  // maximum is attained by exactly one arm.
  explicit BanditInstance(std::vector<double> means);

  std::size_t arm_count() const noexcept { return means_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  double mean(std::size_t arm) const { return means_.at(arm); }
  std::size_t optimal_arm() const noexcept { return best_; }

  // max_j mu_j - mu_arm.
  double gap(std::size_t arm) const { return gaps_.at(arm); }
  std::span<const double> gaps() const noexcept { return gaps_; }

 private:
  std::vector<double> means_;
  std::vector<double> gaps_;
  std::size_t best_ = 0;
};

}  // namespace dbandit
