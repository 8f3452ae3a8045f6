#include "dbandit/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "dbandit/parallel.hpp"
#include "dbandit/rng.hpp"
#include "dbandit/simd/kernels.hpp"

namespace dbandit {

namespace {

std::vector<double> realised_parameters(const DelayModel& model) {
  if (const auto* f = std::get_if<delay::PacketLoss>(&model.family())) return f->p;
  if (const auto* f = std::get_if<delay::Pareto>(&model.family())) return f->alpha;
  return {};
}

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error("cannot write '" + path.string() + "': " + what);
}

}  // namespace

RunResult run_episode(Environment& env, Policy& policy, Rng& policy_rng) {
  const BanditInstance& instance = env.instance();
  RunResult out;
  out.policy = std::string(policy.name());
  out.means.assign(instance.means().begin(), instance.means().end());
  out.pulls.assign(instance.arm_count(), 0);
  out.regret.reserve(static_cast<std::size_t>(env.horizon() - env.round() + 1));

  double regret = 0.0;
  while (!env.done()) {
    const Round t = env.round();
    const std::size_t arm = policy.select(t, policy_rng);
    const FeedbackBatch batch = env.step(arm);
    policy.observe(batch);
    regret += instance.gap(arm);
    ++out.pulls[arm];
    out.regret.push_back(regret);
  }
  out.feedback = env.counters();
  return out;
}

RunResult run_replication(const ScenarioConfig& config, const DelaySpec& delay, std::string_view policy_name,
                          std::size_t replication) {
  ResolvedReplication setup = resolve_replication(config, delay, replication);
  const std::uint64_t seed = replication_seed(config.seed, replication);
  std::vector<double> params = realised_parameters(setup.delays);

  Environment env(std::move(setup.instance), std::move(setup.delays), config.horizon, seed);
  auto policy = make_policy(policy_name, config.arms);
  Rng policy_rng(derive_seed(seed, Stream::kPolicy));

  RunResult out = run_episode(env, *policy, policy_rng);
  out.replication = replication;
  out.delay_parameters = std::move(params);
  return out;
}

AggregateResult aggregate(std::string scenario, std::string policy, std::span<const double> traces,
                          std::size_t replications) {
  if (replications == 0 || traces.size() % replications != 0)
    throw std::invalid_argument("aggregate: traces do not form a replications x horizon matrix");
  AggregateResult out;
  out.scenario = std::move(scenario);
  out.policy = std::move(policy);
  out.replications = replications;
  const std::size_t horizon = traces.size() / replications;
  out.mean.resize(horizon);
  out.stderr_.resize(horizon);
  simd::column_mean_stderr(traces, replications, out.mean, out.stderr_);
  return out;
}

std::vector<AggregateResult> run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const std::vector<ScenarioVariant> settings = config.settings();
  const std::size_t policies = config.policies.size();
  const std::size_t reps = config.replications;
  const auto horizon = static_cast<std::size_t>(config.horizon);

  // One replications x horizon matrix per (setting, policy).
  std::vector<std::vector<double>> traces(settings.size() * policies, std::vector<double>(reps * horizon));

  parallel_for(settings.size() * policies * reps, options.workers, [&](std::size_t task) {
    const std::size_t rep = task % reps;
    const std::size_t cell = task / reps;
    const std::size_t setting = cell / policies;
    const std::size_t policy = cell % policies;
    const RunResult r = run_replication(config, settings[setting].delay, config.policies[policy], rep);
    std::copy(r.regret.begin(), r.regret.end(), traces[cell].begin() + static_cast<std::ptrdiff_t>(rep * horizon));
  });

  std::vector<AggregateResult> out;
  out.reserve(traces.size());
  for (std::size_t cell = 0; cell < traces.size(); ++cell) {
    out.push_back(aggregate(settings[cell / policies].label, config.policies[cell % policies], traces[cell], reps));
    std::vector<double>().swap(traces[cell]);
  }
  return out;
}

// --- output -----------------------------------------------------------------

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<Round> csv_rounds(Round horizon) {
  const Round stride = std::max<Round>(1, horizon / 1000);
  std::vector<Round> rounds;
  for (Round t = stride; t <= horizon; t += stride) rounds.push_back(t);
  if (rounds.empty() || rounds.back() != horizon) rounds.push_back(horizon);
  return rounds;
}

std::filesystem::path write_csv(const std::filesystem::path& dir, const std::string& name,
                                const std::vector<AggregateResult>& results) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / (name + ".csv");
  if (ec) io_error(path, ec.message());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "open failed");
  out << kCsvHeader << '\n';
  for (const AggregateResult& r : results) {
    const std::string reps = std::to_string(r.replications);
    for (const Round t : csv_rounds(static_cast<Round>(r.mean.size()))) {
      const auto i = static_cast<std::size_t>(t - 1);
      out << r.scenario << ',' << r.policy << ',' << t << ',' << format_number(r.mean[i]) << ','
          << format_number(r.stderr_[i]) << ',' << reps << '\n';
    }
  }
  out.flush();
  if (!out) io_error(path, "write failed");
  return path;
}

std::filesystem::path write_metadata(const std::filesystem::path& dir, const ScenarioConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / (config.name + ".meta.json");
  if (ec) io_error(path, ec.message());

  nlohmann::json meta;
  meta["config"] = to_json(config);
  meta["master_seed"] = config.seed;
  meta["regret_estimator"] = "pseudo-regret: cumulative sum of the gaps of the pulled arms";
  meta["csv_header"] = std::string(kCsvHeader);
  meta["csv_round_stride"] = std::max<Round>(1, config.horizon / 1000);
  meta["seed_derivation"] =
      "replication seed = splitmix-derived(master_seed, replication); substreams instance/reward/delay/policy";

  nlohmann::json settings = nlohmann::json::array();
  for (const ScenarioVariant& s : config.settings()) {
    nlohmann::json reps = nlohmann::json::array();
    for (std::size_t r = 0; r < config.replications; ++r) {
      const ResolvedReplication rr = resolve_replication(config, s.delay, r);
      nlohmann::json row{{"replication", r},
                         {"means", std::vector<double>(rr.instance.means().begin(), rr.instance.means().end())},
                         {"optimal_arm", rr.instance.optimal_arm()}};
      const auto params = realised_parameters(rr.delays);
      if (!params.empty()) row["delay_parameters"] = params;
      reps.push_back(std::move(row));
    }
    settings.push_back({{"label", s.label}, {"delay", to_json(s.delay)}, {"replications", std::move(reps)}});
  }
  meta["settings"] = std::move(settings);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "open failed");
  out << meta.dump(2) << '\n';
  out.flush();
  if (!out) io_error(path, "write failed");
  return path;
}

}  // namespace dbandit
