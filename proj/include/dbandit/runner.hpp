#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dbandit/environment.hpp"
#include "dbandit/policy.hpp"
#include "dbandit/scenario.hpp"

namespace dbandit {

// One policy on one replication. `regret[t-1]` is the cumulative
// pseudo-regret after round t: the sum of the gaps of the arms pulled so
// far, whose expectation is the regret of the run.
struct RunResult {
  std::string policy;
  std::size_t replication = 0;
  std::vector<double> regret;
  std::vector<double> means;                // realised arm means
  std::vector<double> delay_parameters;     // realised per-arm p or alpha, if any
  std::vector<std::int64_t> pulls;          // per arm
  FeedbackCounters feedback;
};

// Per-round mean and standard error of the cumulative pseudo-regret across
// replications of one (setting, policy) pair.
struct AggregateResult {
  std::string scenario;  // setting label
  std::string policy;
  std::size_t replications = 0;
  std::vector<double> mean;
  std::vector<double> stderr_;

  double final_mean() const { return mean.back(); }
  double final_stderr() const { return stderr_.back(); }
};

// Drives `policy` against `env` until the horizon. The policy sees each
// round's batch before its next selection.
RunResult run_episode(Environment& env, Policy& policy, Rng& policy_rng);

RunResult run_replication(const ScenarioConfig& config, const DelaySpec& delay, std::string_view policy,
                          std::size_t replication);

// Row-major replications x horizon matrix of traces -> aggregate.
AggregateResult aggregate(std::string scenario, std::string policy, std::span<const double> traces,
                          std::size_t replications);

struct RunOptions {
  unsigned workers = 1;
};

// All settings x policies x replications of `config`, ordered by
// (setting, policy as listed). The output is independent of `workers`.
std::vector<AggregateResult> run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// --- output -----------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "scenario,policy,round,mean_regret,stderr,replications";

// Every max(1, T / 1000)-th round, plus the final round.
std::vector<Round> csv_rounds(Round horizon);

// Writes `<dir>/<name>.csv`. Throws std::runtime_error naming the path on
// I/O failure.
std::filesystem::path write_csv(const std::filesystem::path& dir, const std::string& name,
                                const std::vector<AggregateResult>& results);

// Writes `<dir>/<name>.meta.json` with the resolved config, seed and the
// realised per-replication instances.
std::filesystem::path write_metadata(const std::filesystem::path& dir, const ScenarioConfig& config);

// Shortest round-trip decimal form of `x`.
std::string format_number(double x);

}  // namespace dbandit
