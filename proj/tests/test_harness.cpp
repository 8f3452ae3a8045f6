#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dbandit/errors.hpp"
#include "dbandit/runner.hpp"
#include "dbandit/scenario.hpp"

using namespace dbandit;
namespace fs = std::filesystem;

namespace {

// Always plays the same arm.
class StubbornPolicy final : public Policy {
 public:
  StubbornPolicy(std::size_t arms, std::size_t arm) : arms_(arms), arm_(arm) {}
  std::string_view name() const noexcept override { return "stubborn"; }
  std::size_t arm_count() const noexcept override { return arms_; }
  std::size_t select(Round, Rng&) override { return arm_; }
  void observe(std::span<const Observation> batch) override { seen_ += static_cast<std::int64_t>(batch.size()); }
  std::int64_t observed_count() const noexcept override { return seen_; }

 private:
  std::size_t arms_;
  std::size_t arm_;
  std::int64_t seen_ = 0;
};

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.name = "small";
  c.arms = 4;
  c.means = UniformMeans{0.25, 0.75};
  c.delay.family = delay::Geometric{0.05};
  c.horizon = 1500;
  c.replications = 6;
  c.policies = {"ducb1", "se", "ts"};
  c.seed = 5;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dbandit_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("registry reproduces the published settings") {
  const auto fixed = scenario_registry("fixed");
  REQUIRE(std::holds_alternative<delay::Fixed>(fixed.delay.family));
  CHECK(std::get<delay::Fixed>(fixed.delay.family).rounds == 250);
  CHECK(fixed.arms == 20);
  CHECK(fixed.horizon == 20000);
  CHECK(fixed.replications == 100);

  const auto geo = scenario_registry("geometric");
  CHECK(std::get<ExplicitMeans>(geo.means).values == std::vector<double>{0.5, 0.4, 0.3});
  CHECK(std::get<delay::Geometric>(geo.delay.family).p == 0.01);

  const auto pareto = scenario_registry("pareto");
  CHECK(std::get<ExplicitMeans>(pareto.means).values == std::vector<double>{0.4, 0.45});
  CHECK(BanditInstance(std::get<ExplicitMeans>(pareto.means).values).optimal_arm() == 1);
  REQUIRE(pareto.variants.size() == 3);
  CHECK(std::get<delay::Pareto>(pareto.variants[0].delay.family).alpha == std::vector<double>{1.0, 0.2});
  CHECK(std::get<delay::Pareto>(pareto.variants[2].delay.family).alpha == std::vector<double>{1.0, 0.8});
  CHECK(pareto.horizon == 3000);
  CHECK(pareto.replications == 300);

  const auto uniform = scenario_registry("uniform");
  CHECK(std::get<delay::UniformInt>(uniform.delay.family).lo == 150);
  CHECK(std::get<delay::UniformInt>(uniform.delay.family).hi == 300);

  const auto queue = scenario_registry("queue");
  CHECK(queue.arms == 5);
  CHECK(std::get<delay::QueueBased>(queue.delay.family).service_rate == 0.1);

  const auto loss = scenario_registry("packet_loss");
  REQUIRE(loss.delay.packet_loss_range.has_value());
  CHECK(loss.delay.packet_loss_range->lo == 0.0);
  CHECK(loss.delay.packet_loss_range->hi == 1.0);

  for (const auto& name : scenario_names()) CHECK_NOTHROW(scenario_registry(name).validate());
  CHECK_THROWS_AS(scenario_registry("nope"), ConfigError);
}

TEST_CASE("json round trip preserves every built-in scenario") {
  for (const auto& name : scenario_names()) {
    const auto c = scenario_registry(name);
    const auto j = to_json(c);
    CHECK(to_json(scenario_from_json(j)) == j);
  }
}

TEST_CASE("json parsing is strict") {
  auto j = to_json(scenario_registry("geometric"));
  auto bad = j;
  bad["colour"] = "red";
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
  bad = j;
  bad["delay"]["extra"] = 1;
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
  bad = j;
  bad["delay"] = {{"family", "weibull"}};
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
  bad = j;
  bad.erase("horizon");
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
  bad = j;
  bad["means"] = {{"values", {0.5, 0.5, 0.3}}};
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
  bad = j;
  bad["policies"] = {"ts", "pb"};
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
  bad = j;
  bad["horizon"] = "long";
  CHECK_THROWS_AS(scenario_from_json(bad), ConfigError);
}

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.arms = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.means = UniformMeans{0.5, 1.2};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.delay.family = delay::Pareto{{1.0, 0.5}};  // 2 values for 4 arms
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.policies = {"ts", "ts"};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("replications resolve deterministically on their own substream") {
  const auto c = scenario_registry("packet_loss");
  const auto a = resolve_replication(c, c.delay, 3);
  const auto b = resolve_replication(c, c.delay, 3);
  const auto other = resolve_replication(c, c.delay, 4);
  CHECK(std::vector<double>(a.instance.means().begin(), a.instance.means().end()) ==
        std::vector<double>(b.instance.means().begin(), b.instance.means().end()));
  CHECK(a.instance.mean(0) != other.instance.mean(0));
  for (double m : a.instance.means()) CHECK((m >= 0.25 && m <= 0.75));
  const auto& p = std::get<delay::PacketLoss>(a.delays.family()).p;
  CHECK(p.size() == 20);
  for (double x : p) CHECK((x >= 0.0 && x <= 1.0));
}

TEST_CASE("pseudo-regret accounting") {
  const BanditInstance inst({0.2, 0.7, 0.5});
  SUBCASE("always optimal accumulates nothing") {
    Environment env(inst, DelayModel(delay::Fixed{3}), 500, 1);
    StubbornPolicy p(3, 1);
    Rng rng(1);
    const auto r = run_episode(env, p, rng);
    CHECK(r.regret.size() == 500);
    for (double x : r.regret) CHECK(x == 0.0);
  }
  SUBCASE("always the same suboptimal arm grows linearly") {
    Environment env(inst, DelayModel(delay::Fixed{3}), 500, 1);
    StubbornPolicy p(3, 2);
    Rng rng(1);
    const auto r = run_episode(env, p, rng);
    for (std::size_t t = 1; t <= 500; ++t) CHECK(r.regret[t - 1] == doctest::Approx(t * inst.gap(2)));
    CHECK(r.pulls[2] == 500);
    CHECK(p.observed_count() == 497);
  }
}

TEST_CASE("thompson sampling regret stays far below linear") {
  // Pilot over seeds 1..20: final pseudo-regret 6..31 (mean ~12).
  // Worst case would be 0.2 * 10^4 = 2000; the coarse contract bound is
  // 0.3 T gap = 600.
  ScenarioConfig c;
  c.name = "pilot";
  c.arms = 2;
  c.means = ExplicitMeans{{0.5, 0.3}};
  c.delay.family = delay::Fixed{0};
  c.horizon = 10000;
  c.replications = 1;
  c.policies = {"ts"};
  c.seed = 1;
  const auto r = run_replication(c, c.delay, "ts", 0);
  MESSAGE("ts final pseudo-regret " << r.regret.back());
  CHECK(r.regret.back() < 0.3 * 10000 * 0.2);
  CHECK(r.regret.back() < 60.0);
}

TEST_CASE("run results satisfy the trace invariants") {
  const auto c = small_config();
  for (const auto& policy : c.policies) {
    for (std::size_t rep = 0; rep < 3; ++rep) {
      const auto r = run_replication(c, c.delay, policy, rep);
      const BanditInstance inst(r.means);
      const double max_gap = *std::max_element(inst.gaps().begin(), inst.gaps().end());
      for (std::size_t t = 0; t < r.regret.size(); ++t) {
        if (t) CHECK(r.regret[t] >= r.regret[t - 1]);
        CHECK(r.regret[t] <= static_cast<double>(t + 1) * max_gap + 1e-9);
      }
    }
  }
}

TEST_CASE("aggregation") {
  SUBCASE("one replication has zero standard error") {
    auto c = small_config();
    c.replications = 1;
    for (const auto& a : run_scenario(c)) {
      for (double s : a.stderr_) CHECK(s == 0.0);
    }
  }
  SUBCASE("mean and standard error across replications") {
    const auto c = small_config();
    const auto results = run_scenario(c);
    REQUIRE(results.size() == 3);
    for (const auto& a : results) {
      std::vector<std::vector<double>> traces;
      for (std::size_t r = 0; r < c.replications; ++r) traces.push_back(run_replication(c, c.delay, a.policy, r).regret);
      for (std::size_t t = 0; t < a.mean.size(); ++t) {
        double lo = 1e300, hi = -1e300, sum = 0.0;
        for (const auto& tr : traces) {
          lo = std::min(lo, tr[t]);
          hi = std::max(hi, tr[t]);
          sum += tr[t];
        }
        const double mean = sum / 6.0;
        double ss = 0.0;
        for (const auto& tr : traces) ss += (tr[t] - mean) * (tr[t] - mean);
        CHECK(a.mean[t] >= lo);
        CHECK(a.mean[t] <= hi);
        CHECK(a.mean[t] == doctest::Approx(mean).epsilon(1e-12));
        CHECK(a.stderr_[t] == doctest::Approx(std::sqrt(ss / 5.0) / std::sqrt(6.0)).epsilon(1e-9));
        CHECK(a.stderr_[t] >= 0.0);
        if (t) CHECK(a.mean[t] >= a.mean[t - 1]);
      }
    }
  }
  SUBCASE("always-optimal traces aggregate to zero") {
    std::vector<double> zeros(5 * 100, 0.0);
    const auto a = aggregate("s", "p", zeros, 5);
    for (double m : a.mean) CHECK(m == 0.0);
    for (double s : a.stderr_) CHECK(s == 0.0);
  }
}

TEST_CASE("paired comparisons: adding a policy changes nothing else") {
  auto c = small_config();
  c.policies = {"ts"};
  const auto alone = run_scenario(c);
  c.policies = {"se", "ts", "ducb1"};
  const auto together = run_scenario(c);
  CHECK(alone[0].mean == together[1].mean);
  CHECK(alone[0].stderr_ == together[1].stderr_);
}

TEST_CASE("results do not depend on the worker count") {
  const auto c = small_config();
  const auto one = run_scenario(c, {1});
  const auto four = run_scenario(c, {4});
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].mean == four[i].mean);
    CHECK(one[i].stderr_ == four[i].stderr_);
  }
}

TEST_CASE("variants are labelled and share instances") {
  auto c = scenario_registry("pareto");
  c.replications = 3;
  const auto results = run_scenario(c);
  REQUIRE(results.size() == 9);
  CHECK(results[0].scenario == "pareto/alpha2=0.2");
  CHECK(results[0].policy == "ducb1");
  CHECK(results[8].scenario == "pareto/alpha2=0.8");
  CHECK(results[8].policy == "ts");
}

TEST_CASE("csv downsampling") {
  auto rounds = csv_rounds(20000);
  CHECK(rounds.size() == 1000);
  CHECK(rounds.front() == 20);
  CHECK(rounds.back() == 20000);
  rounds = csv_rounds(1500);
  CHECK(rounds.size() == 1500);
  rounds = csv_rounds(2501);
  CHECK(rounds[1] == 4);
  CHECK(rounds.back() == 2501);
  CHECK(rounds[rounds.size() - 2] == 2500);
  CHECK(csv_rounds(1) == std::vector<Round>{1});
}

TEST_CASE("csv output") {
  const auto dir = scratch("csv");
  auto c = small_config();
  c.replications = 2;
  const auto results = run_scenario(c);
  const auto path = write_csv(dir, c.name, results);
  CHECK(path.filename() == "small.csv");

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "scenario,policy,round,mean_regret,stderr,replications");
  std::size_t rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 3 * 1500);
  CHECK(last.rfind("small,ts,1500,", 0) == 0);
  CHECK(last.substr(last.size() - 2) == ",2");

  const auto meta = write_metadata(dir, c);
  const auto j = nlohmann::json::parse(slurp(meta));
  CHECK(j["master_seed"] == 5);
  CHECK(j["config"] == to_json(c));
  CHECK(j["settings"][0]["replications"].size() == 2);

  // A regular file where the directory should be.
  const auto blocked = dir / "blocked";
  std::ofstream(blocked) << "x";
  try {
    write_csv(blocked / "sub", "x", results);
    FAIL("expected an I/O error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("blocked") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, 12345.678901234567, 1e-300}) {
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(2.5) == "2.5");
}
