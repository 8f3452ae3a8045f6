#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dbandit/bandit_instance.hpp"
#include "dbandit/delay.hpp"
#include "dbandit/delay_model.hpp"

namespace dbandit {

struct ExplicitMeans {
  std::vector<double> values;
};

// Means drawn i.i.d. Uniform[lo, hi] once per replication.
struct UniformMeans {
  double lo = 0.0;
  double hi = 1.0;
};

using MeanSpec = std::variant<ExplicitMeans, UniformMeans>;

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

// A delay family as configured. When `packet_loss_range` is set the family
// must be PacketLoss and its per-arm p are redrawn Uniform[lo, hi] every
// replication; otherwise the family is used verbatim.
struct DelaySpec {
  DelayFamily family = delay::Fixed{0};
  std::optional<Range> packet_loss_range;
};

// Alternative delay setting run under the same instances, e.g. a sweep of
// one arm's Pareto tail index. Results are labelled "<name>/<label>".
struct ScenarioVariant {
  std::string label;
  DelaySpec delay;
};

struct ScenarioConfig {
  std::string name;
  std::size_t arms = 2;
  MeanSpec means = ExplicitMeans{};
  DelaySpec delay;
  std::vector<ScenarioVariant> variants;
  Round horizon = 1;
  std::size_t replications = 1;
  std::vector<std::string> policies{"ducb1", "se", "ts"};
  std::uint64_t seed = 1;
  std::string output;  // directory; may be overridden on the command line
  std::string description;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  // (label, delay) pairs actually run: the variants, or the base delay
  // labelled with the scenario name when there are none.
  std::vector<ScenarioVariant> settings() const;
};

// Instance and delay model of one replication, drawn from the replication's
// instance substream so every policy sees the same ones.
struct ResolvedReplication {
  BanditInstance instance;
  DelayModel delays;
};

ResolvedReplication resolve_replication(const ScenarioConfig& config, const DelaySpec& delay,
                                        std::size_t replication);

// Built-in scenarios mirroring the published experiments.
std::vector<std::string> scenario_names();
// Throws ConfigError("unknown scenario ...") for names not in the registry.
ScenarioConfig scenario_registry(std::string_view name);

// Strict JSON round trip; unknown keys are rejected with ConfigError.
nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const DelaySpec& delay);
ScenarioConfig scenario_from_json(const nlohmann::json& j);
DelaySpec delay_spec_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace dbandit
