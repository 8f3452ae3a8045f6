#include "dbandit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dbandit/errors.hpp"
#include "dbandit/parallel.hpp"
#include "dbandit/rng.hpp"
#include "dbandit/simd/kernels.hpp"

namespace dbandit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_q(double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    std::ostringstream os;
    os << "quantile level " << q << " outside (0, 1]";
    throw ContractViolation(os.str());
  }
}

// d(q) * gap with infinity propagating.
double delay_cost(const QuantileFn& quantile, double q, double gap) {
  const Delay d = quantile(q);
  if (d.is_infinite()) return kInf;
  return static_cast<double>(d.count()) * gap;
}

// Terms of the Thompson bounds that depend only on the optimal arm's q.
double ts_optimal_term(const BoundInput& in, double q_opt, double log_t) {
  const std::size_t opt = in.optimal_arm();
  double total = 0.0;
  for (std::size_t i = 0; i < in.arm_count(); ++i) {
    if (i == opt) continue;
    const double g = in.gaps[i];
    const double d_cost = delay_cost(in.quantiles[opt], q_opt, g);
    total += (32.0 * log_t / (q_opt * g) + d_cost + g) * 6.0 / g;
  }
  return total;
}

double ts_suboptimal_term(const BoundInput& in, std::size_t arm, double q, double log_t) {
  const double g = in.gaps[arm];
  return 48.0 * log_t / (q * g) + delay_cost(in.quantiles[arm], q, g);
}

// 1-D minimisation of f over (0, 1]: coarse grid, then `levels` rounds of
// 20x finer search in the neighbourhood of the incumbent.
struct Min1d {
  double q = 1.0;
  double value = kInf;
};

template <class F>
Min1d minimise_1d(F&& f, double step, int levels) {
  Min1d best;
  const auto points = static_cast<int>(std::lround(1.0 / step));
  auto consider = [&](double q) {
    const double v = f(q);
    if (v < best.value) best = {q, v};
  };
  for (int k = 1; k <= points; ++k) consider(static_cast<double>(k) / points);
  if (!std::isfinite(best.value)) return best;

  double h = step;
  for (int level = 0; level < levels; ++level) {
    const double centre = best.q;
    const double fine = h / 20.0;
    for (int k = -20; k <= 20; ++k) {
      const double q = centre + k * fine;
      if (q > 0.0 && q <= 1.0) consider(q);
    }
    h = fine;
  }
  return best;
}

std::vector<double> coarse_grid(double step) {
  const auto points = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> g;
  for (int k = 1; k <= points; ++k) g.push_back(static_cast<double>(k) / points);
  return g;
}

}  // namespace

std::size_t BoundInput::optimal_arm() const {
  std::size_t opt = gaps.size();
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] == 0.0) {
      if (opt != gaps.size()) throw ConfigError("bound input: more than one zero gap");
      opt = i;
    }
  }
  if (opt == gaps.size()) throw ConfigError("bound input: no optimal arm (zero gap)");
  return opt;
}

void BoundInput::validate() const {
  if (horizon < 2) throw ConfigError("bound input: horizon must be >= 2");
  if (gaps.size() < 2) throw ConfigError("bound input: need at least two arms");
  if (quantiles.size() != gaps.size()) throw ConfigError("bound input: one quantile function per arm");
  const std::size_t opt = optimal_arm();
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (i != opt && !(gaps[i] > 0.0 && gaps[i] <= 1.0))
      throw ConfigError("bound input: suboptimal gaps must lie in (0, 1]");
  }
  if (!(grid_step > 0.0) || std::lround(1.0 / grid_step) < 10)
    throw ConfigError("bound input: grid needs at least 10 points per coordinate");
  if (refine_levels < 0) throw ConfigError("bound input: refine_levels must be >= 0");
}

BoundInput make_bound_input(const BanditInstance& instance, const DelayModel& delays, Round horizon) {
  if (!delays.is_iid()) throw UnsupportedFamily("bounds need an i.i.d. delay family");
  BoundInput in;
  in.horizon = horizon;
  in.gaps.assign(instance.gaps().begin(), instance.gaps().end());
  for (std::size_t i = 0; i < instance.arm_count(); ++i) {
    in.quantiles.emplace_back([delays, i](double q) { return delays.quantile(i, q); });
  }
  in.validate();
  return in;
}

double kl_bernoulli(double y, double mu) {
  if (!(y > 0.0 && y < 1.0) || !(mu > 0.0 && mu < 1.0))
    throw std::domain_error("kl_bernoulli: arguments must lie strictly inside (0, 1)");
  const double kl = y * std::log(y / mu) + (1.0 - y) * std::log((1.0 - y) / (1.0 - mu));
  return std::max(kl, 0.0);
}

double thm_2arm_bound(const BoundInput& input, double q_opt, double q_sub) {
  input.validate();
  if (input.arm_count() != 2) throw ContractViolation("two-arm bound needs K = 2");
  check_q(q_opt);
  check_q(q_sub);
  const double log_t = std::log(static_cast<double>(input.horizon));
  const std::size_t opt = input.optimal_arm();
  const std::size_t sub = 1 - opt;
  return ts_suboptimal_term(input, sub, q_sub, log_t) + ts_optimal_term(input, q_opt, log_t);
}

double thm_multiarm_bound(const BoundInput& input, std::span<const double> q) {
  input.validate();
  const std::size_t k = input.arm_count();
  if (k <= 2) throw ContractViolation("multi-arm bound needs K > 2");
  if (q.size() != k) throw ContractViolation("one quantile level per arm");
  for (double v : q) check_q(v);
  const double log_t = std::log(static_cast<double>(input.horizon));
  const std::size_t opt = input.optimal_arm();

  double total = ts_optimal_term(input, q[opt], log_t);
  for (std::size_t i = 0; i < k; ++i) {
    if (i != opt) total += ts_suboptimal_term(input, i, q[i], log_t);
  }
  return total + 4.0 * static_cast<double>(k - 1);
}

double se_bound(const BoundInput& input, std::span<const double> q) {
  input.validate();
  const std::size_t k = input.arm_count();
  if (q.size() != k) throw ContractViolation("one quantile level per arm");
  for (double v : q) check_q(v);
  const double log_t = std::log(static_cast<double>(input.horizon));
  const std::size_t opt = input.optimal_arm();

  const Delay d_opt = input.quantiles[opt](q[opt]);
  double sum = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (i == opt) continue;
    const double g = input.gaps[i];
    sum += 40.0 * log_t / g * (1.0 / q[opt] + 1.0 / q[i]);
    const Delay d_i = input.quantiles[i](q[i]);
    if (d_opt.is_infinite() || d_i.is_infinite()) {
      worst = kInf;
    } else {
      worst = std::max(worst, static_cast<double>(d_opt.count() + d_i.count()) * g);
    }
  }
  return sum + std::log(static_cast<double>(k)) * worst;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kThompson: return "ts";
    case BoundKind::kSuccessiveElimination: return "se";
  }
  return "unknown";
}

double evaluate_bound(BoundKind kind, const BoundInput& input, std::span<const double> q) {
  if (kind == BoundKind::kSuccessiveElimination) return se_bound(input, q);
  if (input.arm_count() == 2) {
    const std::size_t opt = input.optimal_arm();
    if (q.size() != 2) throw ContractViolation("one quantile level per arm");
    return thm_2arm_bound(input, q[opt], q[1 - opt]);
  }
  return thm_multiarm_bound(input, q);
}

BoundValue minimize_bound(BoundKind kind, const BoundInput& input) {
  input.validate();
  const std::size_t k = input.arm_count();
  const std::size_t opt = input.optimal_arm();
  const double log_t = std::log(static_cast<double>(input.horizon));
  const double step = input.grid_step;
  const int levels = input.refine_levels;

  BoundValue out;
  out.q_star.assign(k, 1.0);
  out.note = "explicit terms only; O(1/gap + 1/gap^3) remainders omitted";

  if (kind == BoundKind::kThompson) {
    const Min1d best_opt = minimise_1d([&](double q) { return ts_optimal_term(input, q, log_t); }, step, levels);
    out.q_star[opt] = best_opt.q;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == opt) continue;
      const Min1d m = minimise_1d([&](double q) { return ts_suboptimal_term(input, i, q, log_t); }, step, levels);
      out.q_star[i] = m.q;
    }
    if (k > 2) {
      out.has_unresolved_term = true;
      out.note += "; third sum (O(.) times delay sum) unresolved";
    }
  } else if (k == 2) {
    // The K = 2 form separates: each coordinate carries its own 1/q and d(q).
    const std::size_t sub = 1 - opt;
    const double g = input.gaps[sub];
    const double ln_k = std::log(2.0);
    auto coord = [&](std::size_t arm) {
      return minimise_1d(
          [&](double q) { return 40.0 * log_t / g / q + ln_k * delay_cost(input.quantiles[arm], q, g); }, step,
          levels);
    };
    out.q_star[opt] = coord(opt).q;
    out.q_star[sub] = coord(sub).q;
  } else {
    // The max-coupled delay term: for each q_opt on the grid, enumerate the
    // candidate values M of the max; each arm then takes the largest grid q
    // whose delay cost stays within M. This is exact over the grid.
    const std::vector<double> grid = coarse_grid(step);
    const double ln_k = std::log(static_cast<double>(k));
    double best_value = kInf;
    for (double q1 : grid) {
      const Delay d1 = input.quantiles[opt](q1);
      if (d1.is_infinite()) continue;
      // cost[i][j] = (d1 + d_i(grid[j])) gap_i
      std::vector<std::vector<double>> cost(k);
      std::vector<double> candidates;
      for (std::size_t i = 0; i < k; ++i) {
        if (i == opt) continue;
        for (double q : grid) {
          const Delay di = input.quantiles[i](q);
          const double c = di.is_infinite() ? kInf : static_cast<double>(d1.count() + di.count()) * input.gaps[i];
          cost[i].push_back(c);
          if (std::isfinite(c)) candidates.push_back(c);
        }
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

      for (double cap : candidates) {
        double sum = 0.0;
        double realised = 0.0;
        std::vector<double> qs(k, 1.0);
        qs[opt] = q1;
        bool feasible = true;
        for (std::size_t i = 0; i < k && feasible; ++i) {
          if (i == opt) continue;
          // Largest q keeps 1/q smallest; cost is nondecreasing in q.
          std::size_t pick = grid.size();
          for (std::size_t j = grid.size(); j-- > 0;) {
            if (cost[i][j] <= cap) {
              pick = j;
              break;
            }
          }
          if (pick == grid.size()) {
            feasible = false;
            break;
          }
          qs[i] = grid[pick];
          realised = std::max(realised, cost[i][pick]);
          sum += 40.0 * log_t / input.gaps[i] * (1.0 / q1 + 1.0 / grid[pick]);
        }
        if (!feasible) continue;
        const double value = sum + ln_k * realised;
        if (value < best_value) {
          best_value = value;
          out.q_star = qs;
        }
      }
    }
  }

  out.value = evaluate_bound(kind, input, out.q_star);
  if (!std::isfinite(out.value)) {
    out.value = kInf;
    out.note += "; every grid point has an infinite delay quantile";
  }
  return out;
}

// --- concentration diagnostic ----------------------------------------------

ConcentrationReport concentration_check(const DelayModel& delays, std::size_t arm, double q,
                                   std::span<const std::int64_t> pulls, std::int64_t trials,
                                   std::uint64_t seed, unsigned workers) {
  if (!delays.is_iid()) throw UnsupportedFamily("concentration check needs an i.i.d. delay family");
  check_q(q);
  if (trials < 1) throw ContractViolation("need at least one trial");

  const Delay dq = delays.quantile(arm, q);
  ConcentrationReport report;
  report.q = q;
  report.pass = true;

  for (const std::int64_t m : pulls) {
    if (m < 1) throw ContractViolation("pull counts must be >= 1");
    // A pull at round s is observed by round m + d(q) iff s + l_s <= m + d(q).
    const std::int64_t deadline = dq.is_infinite() ? Delay::infinite().ordinal() - 1 : m + dq.count();
    const std::uint64_t m_seed = derive_seed(seed, static_cast<std::uint64_t>(m));
    std::vector<unsigned char> violated(static_cast<std::size_t>(trials), 0);

    parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t trial) {
      Rng rng(derive_seed(m_seed, trial));
      std::vector<std::int64_t> reveal(static_cast<std::size_t>(m));
      for (std::int64_t s = 1; s <= m; ++s) {
        const Delay l = delays.sample(arm, rng);
        reveal[static_cast<std::size_t>(s - 1)] = l.is_infinite() ? l.ordinal() : s + l.count();
      }
      const auto observed = static_cast<double>(simd::count_at_most(reveal, deadline));
      violated[trial] = observed < 0.5 * q * static_cast<double>(m) ? 1 : 0;
    });

    ConcentrationRow row;
    row.pulls = m;
    row.quantile = dq;
    row.trials = trials;
    for (unsigned char v : violated) row.violations += v;
    row.estimate = static_cast<double>(row.violations) / static_cast<double>(trials);
    row.standard_error = std::sqrt(row.estimate * (1.0 - row.estimate) / static_cast<double>(trials));
    row.bound = std::exp(-q * static_cast<double>(m) / 8.0);
    row.pass = row.estimate <= row.bound + 3.0 * row.standard_error;
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace dbandit
