// Command-line front end: run scenarios, evaluate bounds, list the registry.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dbandit/bounds.hpp"
#include "dbandit/errors.hpp"
#include "dbandit/runner.hpp"
#include "dbandit/scenario.hpp"

namespace {

using namespace dbandit;

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
  for (const auto& n : scenario_names())
    if (n == name_or_path) return scenario_registry(n);
  if (std::filesystem::is_regular_file(name_or_path)) return load_scenario_file(name_or_path);
  return scenario_registry(name_or_path);  // throws "unknown scenario"
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string bound_value(double v) { return std::isfinite(v) ? format_number(v) : "inf"; }

std::string join_q(const std::vector<double>& q) {
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ';';
    out += format_number(q[i]);
  }
  return out;
}

struct RunArgs {
  std::string scenario;
  std::string policies;
  std::optional<std::size_t> reps;
  std::optional<Round> horizon;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

int cmd_run(const RunArgs& a) {
  ScenarioConfig config = resolve_scenario(a.scenario);
  if (!a.policies.empty()) config.policies = split_csv(a.policies);
  if (a.reps) config.replications = *a.reps;
  if (a.horizon) config.horizon = *a.horizon;
  if (a.seed) config.seed = *a.seed;
  if (!a.out.empty()) config.output = a.out;
  if (config.output.empty()) throw ConfigError("no output directory (use --out)");
  config.validate();

  const auto results = run_scenario(config, RunOptions{a.workers});
  const auto csv = write_csv(config.output, config.name, results);
  write_metadata(config.output, config);

  for (const auto& r : results) {
    std::cout << r.scenario << '\t' << r.policy << "\tfinal mean regret " << format_number(r.final_mean())
              << " (stderr " << format_number(r.final_stderr()) << ", R=" << r.replications << ")\n";
  }
  std::cout << "wrote " << csv.string() << '\n';
  return 0;
}

int cmd_bounds(const std::string& scenario, const std::string& out_dir, std::optional<Round> horizon) {
  ScenarioConfig config = resolve_scenario(scenario);
  if (horizon) config.horizon = *horizon;
  config.validate();

  std::ostringstream table;
  table << "scenario,bound,value,q_star\n";
  for (const auto& setting : config.settings()) {
    const ResolvedReplication rr = resolve_replication(config, setting.delay, 0);
    if (!rr.delays.is_iid())
      throw ConfigError("scenario '" + config.name + "': " + rr.delays.family_name() +
                        " delays have no quantiles, bounds are undefined");
    const BoundInput input = make_bound_input(rr.instance, rr.delays, config.horizon);
    for (BoundKind kind : {BoundKind::kThompson, BoundKind::kSuccessiveElimination}) {
      const BoundValue v = minimize_bound(kind, input);
      std::string name = to_string(kind);
      if (kind == BoundKind::kThompson) name += config.arms == 2 ? "_two_arm" : "_multi_arm";
      table << setting.label << ',' << name << ',' << bound_value(v.value) << ',' << join_q(v.q_star) << '\n';
    }
  }

  std::cout << table.str();
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (config.name + "_bounds.csv");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << table.str();
    f.flush();
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return 0;
}

int cmd_list() {
  for (const auto& name : scenario_names()) {
    const ScenarioConfig c = scenario_registry(name);
    std::cout << name << "\tT=" << c.horizon << " R=" << c.replications << "\t" << c.description << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed-feedback multi-armed bandit simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scenario and write <out>/<scenario>.csv");
  run->add_option("--scenario", run_args.scenario, "Built-in scenario name or path to a JSON config")->required();
  run->add_option("--policies", run_args.policies, "Comma-separated subset of ts,se,ducb1");
  run->add_option("--reps", run_args.reps, "Replications");
  run->add_option("--horizon", run_args.horizon, "Rounds per replication");
  run->add_option("--seed", run_args.seed, "Master seed");
  run->add_option("--out", run_args.out, "Output directory");
  run->add_option("--workers", run_args.workers, "Worker threads (results do not depend on this)");

  std::string bounds_scenario, bounds_out;
  std::optional<Round> bounds_horizon;
  auto* bounds = app.add_subcommand("bounds", "Minimised regret-bound values for a scenario");
  bounds->add_option("--scenario", bounds_scenario, "Built-in scenario name or path to a JSON config")->required();
  bounds->add_option("--out", bounds_out, "Output directory for <scenario>_bounds.csv");
  bounds->add_option("--horizon", bounds_horizon, "Override the horizon T");

  auto* list = app.add_subcommand("list-scenarios", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (bounds->parsed()) return cmd_bounds(bounds_scenario, bounds_out, bounds_horizon);
    if (list->parsed()) return cmd_list();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
