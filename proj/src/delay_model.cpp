#include "dbandit/delay_model.hpp"

#include <cmath>
#include <sstream>

#include "dbandit/errors.hpp"

namespace dbandit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("delay model: " + what); }

void validate(const DelayFamily& family) {
  std::visit(overloaded{
                 [](const delay::Fixed& f) {
                   if (f.rounds < 0) bad("fixed delay must be >= 0");
                 },
                 [](const delay::Pareto& f) {
                   if (f.alpha.empty()) bad("pareto needs one alpha per arm");
                   for (double a : f.alpha)
                     if (!(a > 0.0) || !std::isfinite(a)) bad("pareto alpha must be > 0");
                 },
                 [](const delay::PacketLoss& f) {
                   if (f.p.empty()) bad("packet_loss needs one p per arm");
                   for (double p : f.p)
                     if (!(p >= 0.0 && p <= 1.0)) bad("packet_loss p must lie in [0, 1]");
                 },
                 [](const delay::Geometric& f) {
                   if (!(f.p > 0.0 && f.p <= 1.0)) bad("geometric p must lie in (0, 1]");
                 },
                 [](const delay::UniformInt& f) {
                   if (f.lo < 0 || f.hi < f.lo) bad("uniform bounds need 0 <= lo <= hi");
                 },
                 [](const delay::QueueBased& f) {
                   if (!(f.service_rate > 0.0) || !std::isfinite(f.service_rate))
                     bad("queue service_rate must be > 0");
                 },
             },
             family);
}

// U in (0, 1].
double open_unit(Rng& rng) { return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Delay from_real(double x) {
  if (!(x < static_cast<double>(Delay::kMaxFinite))) return Delay::rounds(Delay::kMaxFinite);
  return Delay::rounds(static_cast<std::int64_t>(x));
}

double pareto_cdf(double alpha, std::int64_t d) {
  if (d < 0) return 0.0;
  return -std::expm1(-alpha * std::log1p(static_cast<double>(d)));
}

double geometric_cdf(double p, std::int64_t d) {
  if (d < 0) return 0.0;
  if (p >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(d + 1) * std::log1p(-p));
}

// Walks a closed-form guess to the exact smallest d with cdf(d) >= q.
template <class Cdf>
Delay settle(double guess, double q, Cdf cdf) {
  if (!(guess < static_cast<double>(Delay::kMaxFinite))) return Delay::rounds(Delay::kMaxFinite);
  auto d = static_cast<std::int64_t>(std::max(0.0, guess));
  while (cdf(d) < q) ++d;
  while (d > 0 && cdf(d - 1) >= q) --d;
  return Delay::rounds(d);
}

}  // namespace

DelayModel::DelayModel(DelayFamily family) : family_(std::move(family)) { validate(family_); }

std::string DelayModel::family_name() const {
  return std::visit(overloaded{
                        [](const delay::Fixed&) { return std::string("fixed"); },
                        [](const delay::Pareto&) { return std::string("pareto"); },
                        [](const delay::PacketLoss&) { return std::string("packet_loss"); },
                        [](const delay::Geometric&) { return std::string("geometric"); },
                        [](const delay::UniformInt&) { return std::string("uniform"); },
                        [](const delay::QueueBased&) { return std::string("queue"); },
                    },
                    family_);
}

bool DelayModel::has_per_arm_parameters() const noexcept { return arm_count() != 0; }

std::size_t DelayModel::arm_count() const noexcept {
  if (const auto* f = std::get_if<delay::Pareto>(&family_)) return f->alpha.size();
  if (const auto* f = std::get_if<delay::PacketLoss>(&family_)) return f->p.size();
  return 0;
}

bool DelayModel::is_iid() const noexcept { return !std::holds_alternative<delay::QueueBased>(family_); }

void DelayModel::check_arm(std::size_t arm) const {
  const std::size_t k = arm_count();
  if (k != 0 && arm >= k) {
    std::ostringstream os;
    os << "arm " << arm << " out of range for " << family_name() << " model with " << k << " arms";
    throw ContractViolation(os.str());
  }
}

Delay DelayModel::sample(std::size_t arm, Round pull_round, QueueClocks& clocks, Rng& rng) const {
  check_arm(arm);
  return std::visit(
      overloaded{
          [](const delay::Fixed& f) { return Delay::rounds(f.rounds); },
          [&](const delay::Pareto& f) {
            const double x = std::pow(open_unit(rng), -1.0 / f.alpha[arm]);
            return from_real(std::ceil(x) - 1.0);
          },
          [&](const delay::PacketLoss& f) {
            return std::bernoulli_distribution(f.p[arm])(rng) ? Delay::rounds(0) : Delay::infinite();
          },
          [&](const delay::Geometric& f) {
            if (f.p >= 1.0) return Delay::rounds(0);
            return Delay::rounds(std::geometric_distribution<std::int64_t>(f.p)(rng));
          },
          [&](const delay::UniformInt& f) {
            return Delay::rounds(std::uniform_int_distribution<std::int64_t>(f.lo, f.hi)(rng));
          },
          [&](const delay::QueueBased& f) {
            if (arm >= clocks.size()) throw ContractViolation("queue clock missing for arm");
            // Service starts when the arm's previous job completes, or at the
            // pull itself when the queue is idle. The reward is revealed in the
            // round during which its own service completes.
            const auto t = static_cast<double>(pull_round);
            const double start = std::max(clocks[arm], t);
            const double done = start + std::exponential_distribution<double>(f.service_rate)(rng);
            clocks[arm] = done;
            return from_real(std::floor(done) - t);
          },
      },
      family_);
}

Delay DelayModel::sample(std::size_t arm, Rng& rng) const {
  if (!is_iid()) throw UnsupportedFamily("queue delays need a pull round and queue clocks");
  QueueClocks none;
  return sample(arm, 0, none, rng);
}

double DelayModel::cdf(std::size_t arm, std::int64_t d) const {
  check_arm(arm);
  if (d < 0) return 0.0;
  return std::visit(overloaded{
                        [&](const delay::Fixed& f) { return d >= f.rounds ? 1.0 : 0.0; },
                        [&](const delay::Pareto& f) { return pareto_cdf(f.alpha[arm], d); },
                        [&](const delay::PacketLoss& f) { return f.p[arm]; },
                        [&](const delay::Geometric& f) { return geometric_cdf(f.p, d); },
                        [&](const delay::UniformInt& f) {
                          if (d < f.lo) return 0.0;
                          if (d >= f.hi) return 1.0;
                          return static_cast<double>(d - f.lo + 1) / static_cast<double>(f.hi - f.lo + 1);
                        },
                        [](const delay::QueueBased&) -> double {
                          throw UnsupportedFamily("queue delays have no stationary marginal");
                        },
                    },
                    family_);
}

Delay DelayModel::quantile(std::size_t arm, double q) const {
  check_arm(arm);
  if (!(q > 0.0 && q <= 1.0)) throw ContractViolation("quantile level must lie in (0, 1]");
  return std::visit(
      overloaded{
          [](const delay::Fixed& f) { return Delay::rounds(f.rounds); },
          [&](const delay::Pareto& f) {
            if (q >= 1.0) return Delay::infinite();
            const double a = f.alpha[arm];
            return settle(std::ceil(std::pow(1.0 - q, -1.0 / a)) - 1.0, q,
                          [a](std::int64_t d) { return pareto_cdf(a, d); });
          },
          [&](const delay::PacketLoss& f) { return q <= f.p[arm] ? Delay::rounds(0) : Delay::infinite(); },
          [&](const delay::Geometric& f) {
            if (f.p >= 1.0) return Delay::rounds(0);
            if (q >= 1.0) return Delay::infinite();
            const double p = f.p;
            return settle(std::ceil(std::log1p(-q) / std::log1p(-p)) - 1.0, q,
                          [p](std::int64_t d) { return geometric_cdf(p, d); });
          },
          [&](const delay::UniformInt& f) {
            const auto n = static_cast<double>(f.hi - f.lo + 1);
            const auto lo = f.lo, hi = f.hi;
            const auto cdf = [lo, hi, n](std::int64_t d) {
              if (d < lo) return 0.0;
              if (d >= hi) return 1.0;
              return static_cast<double>(d - lo + 1) / n;
            };
            return settle(static_cast<double>(lo) + std::ceil(q * n) - 1.0, q, cdf);
          },
          [](const delay::QueueBased&) -> Delay {
            throw UnsupportedFamily("queue delays have no stationary marginal");
          },
      },
      family_);
}

}  // namespace dbandit
