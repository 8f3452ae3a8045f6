#include "dbandit/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dbandit/errors.hpp"
#include "dbandit/policy.hpp"
#include "dbandit/rng.hpp"

namespace dbandit {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) fail(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) fail(std::string(where) + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string(where) + ": bad value for '" + key + "': " + e.what());
  }
}

Range range_from(const json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 2) fail(std::string(where) + ": expected [lo, hi]");
  try {
    return {j[0].get<double>(), j[1].get<double>()};
  } catch (const json::exception& e) {
    fail(std::string(where) + ": " + e.what());
  }
}

void validate_delay(const DelaySpec& d, std::size_t arms, std::string_view where) {
  const std::string w(where);
  if (d.packet_loss_range) {
    if (!std::holds_alternative<delay::PacketLoss>(d.family))
      fail(w + ": a sampled p range only applies to packet_loss");
    const Range r = *d.packet_loss_range;
    if (!(r.lo >= 0.0 && r.lo <= r.hi && r.hi <= 1.0)) fail(w + ": packet_loss p range must lie in [0, 1]");
    return;
  }
  try {
    const DelayModel model(d.family);
    if (model.has_per_arm_parameters() && model.arm_count() != arms) {
      std::ostringstream os;
      os << w << ": " << model.family_name() << " needs " << arms << " per-arm values, got "
         << model.arm_count();
      fail(os.str());
    }
  } catch (const ConfigError& e) {
    fail(w + ": " + e.what());
  }
}

}  // namespace

// --- validation ---------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (name.empty()) fail("scenario: name must not be empty");
  if (arms < 2) fail("scenario '" + name + "': need at least two arms");
  if (horizon < 1) fail("scenario '" + name + "': horizon must be >= 1");
  if (replications < 1) fail("scenario '" + name + "': replications must be >= 1");
  if (policies.empty()) fail("scenario '" + name + "': no policies");
  std::set<std::string> seen;
  for (const auto& p : policies) {
    make_policy(p, arms);
    if (!seen.insert(p).second) fail("scenario '" + name + "': policy '" + p + "' listed twice");
  }

  std::visit(overloaded{
                 [&](const ExplicitMeans& m) {
                   if (m.values.size() != arms) fail("scenario '" + name + "': means must have one value per arm");
                   try {
                     BanditInstance check(m.values);
                   } catch (const ConfigError& e) {
                     fail("scenario '" + name + "': " + e.what());
                   }
                 },
                 [&](const UniformMeans& m) {
                   if (!(m.lo >= 0.0 && m.lo < m.hi && m.hi <= 1.0))
                     fail("scenario '" + name + "': mean interval must satisfy 0 <= lo < hi <= 1");
                 },
             },
             means);

  if (variants.empty()) {
    validate_delay(delay, arms, "scenario '" + name + "' delay");
  } else {
    std::set<std::string> labels;
    for (const auto& v : variants) {
      if (v.label.empty()) fail("scenario '" + name + "': variant labels must not be empty");
      if (!labels.insert(v.label).second) fail("scenario '" + name + "': duplicate variant '" + v.label + "'");
      validate_delay(v.delay, arms, "scenario '" + name + "' variant '" + v.label + "'");
    }
  }
}

std::vector<ScenarioVariant> ScenarioConfig::settings() const {
  if (variants.empty()) return {{name, delay}};
  std::vector<ScenarioVariant> out;
  for (const auto& v : variants) out.push_back({name + "/" + v.label, v.delay});
  return out;
}

ResolvedReplication resolve_replication(const ScenarioConfig& config, const DelaySpec& delay,
                                        std::size_t replication) {
  Rng rng(derive_seed(replication_seed(config.seed, replication), Stream::kInstance));

  std::vector<double> means = std::visit(
      overloaded{
          [](const ExplicitMeans& m) { return m.values; },
          [&](const UniformMeans& m) {
            std::uniform_real_distribution<double> u(m.lo, m.hi);
            std::vector<double> v(config.arms);
            for (;;) {
              for (double& x : v) x = u(rng);
              if (std::count(v.begin(), v.end(), *std::max_element(v.begin(), v.end())) == 1) return v;
            }
          },
      },
      config.means);

  DelayFamily family = delay.family;
  if (delay.packet_loss_range) {
    std::uniform_real_distribution<double> u(delay.packet_loss_range->lo, delay.packet_loss_range->hi);
    std::vector<double> p(config.arms);
    for (double& x : p) x = u(rng);
    family = delay::PacketLoss{std::move(p)};
  }
  return {BanditInstance(std::move(means)), DelayModel(std::move(family))};
}

// --- registry -----------------------------------------------------------------

namespace {

ScenarioConfig base(std::string name, std::string description) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.description = std::move(description);
  c.seed = 1;
  return c;
}

std::vector<ScenarioConfig> builtins() {
  std::vector<ScenarioConfig> out;

  {
    auto c = base("fixed", "K=20, means U[0.25,0.75], every delay 250 rounds");
    c.arms = 20;
    c.means = UniformMeans{0.25, 0.75};
    c.delay.family = delay::Fixed{250};
    c.horizon = 20000;
    c.replications = 100;
    out.push_back(std::move(c));
  }
  {
    auto c = base("pareto", "K=2, means (0.4, 0.45), Pareto tails alpha1=1, alpha2 in {0.2, 0.5, 0.8}");
    c.arms = 2;
    c.means = ExplicitMeans{{0.4, 0.45}};
    c.delay.family = delay::Pareto{{1.0, 0.5}};
    for (double a2 : {0.2, 0.5, 0.8}) {
      std::ostringstream label;
      label << "alpha2=" << a2;
      c.variants.push_back({label.str(), DelaySpec{delay::Pareto{{1.0, a2}}, std::nullopt}});
    }
    c.horizon = 3000;
    c.replications = 300;
    out.push_back(std::move(c));
  }
  {
    auto c = base("packet_loss", "K=20, means U[0.25,0.75], per-arm reveal probability p ~ U[0,1] per replication");
    c.arms = 20;
    c.means = UniformMeans{0.25, 0.75};
    c.delay.family = delay::PacketLoss{};
    c.delay.packet_loss_range = Range{0.0, 1.0};
    c.horizon = 10000;
    c.replications = 200;
    out.push_back(std::move(c));
  }
  {
    auto c = base("geometric", "means (0.5, 0.4, 0.3), Geometric(0.01) delays");
    c.arms = 3;
    c.means = ExplicitMeans{{0.5, 0.4, 0.3}};
    c.delay.family = delay::Geometric{0.01};
    c.horizon = 10000;
    c.replications = 200;
    out.push_back(std::move(c));
  }
  {
    auto c = base("uniform", "K=20, means U[0.25,0.75], delays uniform on the integers 150..300");
    c.arms = 20;
    c.means = UniformMeans{0.25, 0.75};
    c.delay.family = delay::UniformInt{150, 300};
    c.horizon = 20000;
    c.replications = 100;
    out.push_back(std::move(c));
  }
  {
    auto c = base("queue", "K=5, means U[0.25,0.75], per-arm FIFO queues with Exponential(0.1) service");
    c.arms = 5;
    c.means = UniformMeans{0.25, 0.75};
    c.delay.family = delay::QueueBased{0.1};
    c.horizon = 10000;
    c.replications = 200;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& c : builtins()) names.push_back(c.name);
  return names;
}

ScenarioConfig scenario_registry(std::string_view name) {
  for (auto& c : builtins())
    if (c.name == name) return c;
  fail("unknown scenario '" + std::string(name) + "'");
}

// --- JSON -----------------------------------------------------------------------

json to_json(const DelaySpec& d) {
  if (d.packet_loss_range) {
    return {{"family", "packet_loss"}, {"p_uniform", {d.packet_loss_range->lo, d.packet_loss_range->hi}}};
  }
  return std::visit(overloaded{
                        [](const delay::Fixed& f) { return json{{"family", "fixed"}, {"rounds", f.rounds}}; },
                        [](const delay::Pareto& f) { return json{{"family", "pareto"}, {"alpha", f.alpha}}; },
                        [](const delay::PacketLoss& f) { return json{{"family", "packet_loss"}, {"p", f.p}}; },
                        [](const delay::Geometric& f) { return json{{"family", "geometric"}, {"p", f.p}}; },
                        [](const delay::UniformInt& f) {
                          return json{{"family", "uniform"}, {"lo", f.lo}, {"hi", f.hi}};
                        },
                        [](const delay::QueueBased& f) {
                          return json{{"family", "queue"}, {"service_rate", f.service_rate}};
                        },
                    },
                    d.family);
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  if (!c.description.empty()) j["description"] = c.description;
  j["arms"] = c.arms;
  std::visit(overloaded{
                 [&](const ExplicitMeans& m) { j["means"] = json{{"values", m.values}}; },
                 [&](const UniformMeans& m) { j["means"] = json{{"uniform", {m.lo, m.hi}}}; },
             },
             c.means);
  j["delay"] = to_json(c.delay);
  if (!c.variants.empty()) {
    json vs = json::array();
    for (const auto& v : c.variants) vs.push_back({{"label", v.label}, {"delay", to_json(v.delay)}});
    j["variants"] = vs;
  }
  j["horizon"] = c.horizon;
  j["replications"] = c.replications;
  j["policies"] = c.policies;
  j["seed"] = c.seed;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

DelaySpec delay_spec_from_json(const json& j) {
  constexpr std::string_view where = "delay";
  if (!j.is_object()) fail("delay: expected an object");
  const auto family = get<std::string>(j, "family", where);
  DelaySpec d;
  if (family == "fixed") {
    check_keys(j, {"family", "rounds"}, where);
    d.family = delay::Fixed{get<std::int64_t>(j, "rounds", where)};
  } else if (family == "pareto") {
    check_keys(j, {"family", "alpha"}, where);
    d.family = delay::Pareto{get<std::vector<double>>(j, "alpha", where)};
  } else if (family == "packet_loss") {
    check_keys(j, {"family", "p", "p_uniform"}, where);
    if (j.contains("p") == j.contains("p_uniform")) fail("delay: packet_loss needs exactly one of p, p_uniform");
    if (j.contains("p")) {
      d.family = delay::PacketLoss{get<std::vector<double>>(j, "p", where)};
    } else {
      d.family = delay::PacketLoss{};
      d.packet_loss_range = range_from(j.at("p_uniform"), "delay.p_uniform");
    }
  } else if (family == "geometric") {
    check_keys(j, {"family", "p"}, where);
    d.family = delay::Geometric{get<double>(j, "p", where)};
  } else if (family == "uniform") {
    check_keys(j, {"family", "lo", "hi"}, where);
    d.family = delay::UniformInt{get<std::int64_t>(j, "lo", where), get<std::int64_t>(j, "hi", where)};
  } else if (family == "queue") {
    check_keys(j, {"family", "service_rate"}, where);
    d.family = delay::QueueBased{get<double>(j, "service_rate", where)};
  } else {
    fail("delay: unknown family '" + family + "'");
  }
  return d;
}

ScenarioConfig scenario_from_json(const json& j) {
  constexpr std::string_view where = "scenario";
  check_keys(j,
             {"name", "description", "arms", "means", "delay", "variants", "horizon", "replications", "policies",
              "seed", "output"},
             where);
  ScenarioConfig c;
  c.name = get<std::string>(j, "name", where);
  if (j.contains("description")) c.description = get<std::string>(j, "description", where);
  c.arms = get<std::size_t>(j, "arms", where);

  if (!j.contains("means")) fail("scenario: missing key 'means'");
  const json& m = j.at("means");
  check_keys(m, {"values", "uniform"}, "means");
  if (m.contains("values") == m.contains("uniform")) fail("means: need exactly one of values, uniform");
  if (m.contains("values")) {
    c.means = ExplicitMeans{get<std::vector<double>>(m, "values", "means")};
  } else {
    const Range r = range_from(m.at("uniform"), "means.uniform");
    c.means = UniformMeans{r.lo, r.hi};
  }

  if (j.contains("delay")) c.delay = delay_spec_from_json(j.at("delay"));
  if (j.contains("variants")) {
    if (!j.at("variants").is_array()) fail("variants: expected an array");
    for (const json& v : j.at("variants")) {
      check_keys(v, {"label", "delay"}, "variant");
      c.variants.push_back({get<std::string>(v, "label", "variant"), delay_spec_from_json(v.at("delay"))});
    }
  }
  if (!j.contains("delay") && c.variants.empty()) fail("scenario: missing key 'delay'");
  if (!j.contains("delay")) c.delay = c.variants.front().delay;

  c.horizon = get<Round>(j, "horizon", where);
  c.replications = get<std::size_t>(j, "replications", where);
  if (j.contains("policies")) c.policies = get<std::vector<std::string>>(j, "policies", where);
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", where);
  if (j.contains("output")) c.output = get<std::string>(j, "output", where);
  c.validate();
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace dbandit
