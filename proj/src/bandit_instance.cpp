#include "dbandit/bandit_instance.hpp"

#include <algorithm>

#include "dbandit/errors.hpp"

namespace dbandit {

BanditInstance::BanditInstance(std::vector<double> means) : means_(std::move(means)) {
  if (means_.size() < 2) throw ConfigError("bandit instance needs at least two arms");
  for (double m : means_)
    if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("arm means must lie in [0, 1]");

  const auto top = std::max_element(means_.begin(), means_.end());
  if (std::count(means_.begin(), means_.end(), *top) != 1)
    throw ConfigError("bandit instance needs a unique optimal arm");
  best_ = static_cast<std::size_t>(top - means_.begin());

  gaps_.reserve(means_.size());
  for (double m : means_) gaps_.push_back(*top - m);
}

}  // namespace dbandit
