#include "harq/sdo_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <fmt/core.h>

namespace harq {

void SdoConfig::validate() const {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(n_max >= k)) throw std::invalid_argument("nmax must be >= k");
  if (!(n1_step > 0.0)) throw std::invalid_argument("n1 step must be positive");
  if (!(lambda_tol > 0.0)) throw std::invalid_argument("lambda tolerance must be positive");
  if (max_seq < 1) throw std::invalid_argument("max_seq must be >= 1");
  if (fixed_m && *fixed_m < 1) throw std::invalid_argument("fixed m must be >= 1");
  if (pinned_n1 && (*pinned_n1 < k || *pinned_n1 > n_max))
    throw std::invalid_argument("pinned N_1 must lie in [k, nmax]");
}

Roots next_blocklength(std::optional<double> prev2, double prev, int f, double lambda,
                       double beta, const AckModel& model) {
  Roots out;
  const double dp = model.prob(prev) - (prev2 ? model.prob(*prev2) : 0.0);
  const double slope = model.deriv(prev);
  if (!(slope > 0.0)) {
    // Flat model: the stationarity condition pushes N_{f+1} to infinity.
    out.value[0] = std::numeric_limits<double>::infinity();
    out.count = 1;
    return out;
  }
  const double ratio = dp / slope;
  const double a_f = prev + f * beta;
  const double one_minus = 1.0 - lambda;
  const double c = 2.0 * one_minus * (ratio + a_f) + 2.0 * a_f * (ratio + 0.5 * a_f);
  const double disc = one_minus * one_minus + c;
  if (disc < 0.0) return out;
  const double root = std::sqrt(disc);
  const double shift = (f + 1) * beta;
  out.value[0] = -one_minus + root - shift;
  out.value[1] = -one_minus - root - shift;
  out.count = root > 0.0 ? 2 : 1;
  return out;
}

double auxiliary_objective(const Moments& mom, double lambda) {
  return (1.0 - lambda) * mom.m1 + 0.5 * mom.m2;
}

namespace {

constexpr int kMaxDepth = 4096;

SequenceResult finish(std::vector<double> n, double lambda, const SdoConfig& cfg,
                      const AckModel& model) {
  SequenceResult r;
  r.schedule.k = cfg.k;
  r.schedule.beta = cfg.beta;
  r.schedule.n = std::move(n);
  r.moments = schedule_moments(r.schedule, model);
  r.objective = auxiliary_objective(r.moments, lambda);
  return r;
}

bool better(const SequenceResult& a, const std::optional<SequenceResult>& incumbent) {
  return !incumbent || a.objective < incumbent->objective;
}

}  // namespace

std::optional<SequenceResult> solve_sequence_from(const std::vector<double>& prefix, double lambda,
                                                  const SdoConfig& cfg, const AckModel& model) {
  if (prefix.empty()) throw std::invalid_argument("empty prefix");
  const auto accept_len = [&](std::size_t len) {
    return !cfg.fixed_m || static_cast<int>(len) == *cfg.fixed_m;
  };

  std::optional<SequenceResult> best;
  if (prefix.back() >= cfg.n_max) {
    auto n = prefix;
    n.back() = cfg.n_max;
    if (!accept_len(n.size())) return std::nullopt;
    return finish(std::move(n), lambda, cfg, model);
  }

  std::vector<std::vector<double>> live{prefix};
  std::vector<std::vector<double>> next;
  for (int depth = 0; !live.empty(); ++depth) {
    if (depth > kMaxDepth) return best;
    next.clear();
    for (const auto& seq : live) {
      const int f = static_cast<int>(seq.size());
      const std::optional<double> prev2 =
          f >= 2 ? std::optional<double>(seq[f - 2]) : std::nullopt;
      for (double cand : next_blocklength(prev2, seq.back(), f, lambda, cfg.beta, model)) {
        if (!(cand > seq.back())) continue;
        auto grown = seq;
        if (cand >= cfg.n_max) {
          grown.push_back(cfg.n_max);
          if (!accept_len(grown.size())) continue;
          auto done = finish(std::move(grown), lambda, cfg, model);
          if (better(done, best)) best = std::move(done);
          continue;
        }
        grown.push_back(cand);
        // A live branch of length L completes with at least L + 1 entries.
        if (cfg.fixed_m && static_cast<int>(grown.size()) >= *cfg.fixed_m) continue;
        next.push_back(std::move(grown));
      }
    }
    if (static_cast<int>(next.size()) > cfg.max_seq)
      throw BranchExplosionError(
          fmt::format("{} live solution sequences exceed the cap of {}", next.size(), cfg.max_seq));
    live.swap(next);
  }
  return best;
}

std::optional<SequenceResult> solve_sequence(double n1, double lambda, const SdoConfig& cfg,
                                             const AckModel& model) {
  return solve_sequence_from({n1}, lambda, cfg, model);
}

namespace {

// Starting prefixes swept by p(lambda): every N_1 on the grid, or every N_2
// after a pinned N_1.
std::vector<std::vector<double>> sweep_prefixes(const SdoConfig& cfg) {
  std::vector<std::vector<double>> out;
  const double eps = 1e-9 * cfg.n_max;
  if (!cfg.pinned_n1) {
    for (int i = 0;; ++i) {
      const double n1 = cfg.k + i * cfg.n1_step;
      if (n1 > cfg.n_max + eps) break;
      out.push_back({std::min(n1, cfg.n_max)});
    }
    return out;
  }
  const double n1 = *cfg.pinned_n1;
  if (n1 >= cfg.n_max) {
    out.push_back({cfg.n_max});
    return out;
  }
  for (int i = 1;; ++i) {
    const double n2 = n1 + i * cfg.n1_step;
    if (n2 > cfg.n_max + eps) break;
    out.push_back({n1, std::min(n2, cfg.n_max)});
  }
  if (out.empty() || out.back().back() < cfg.n_max) out.push_back({n1, cfg.n_max});
  return out;
}

using SweepResults = std::vector<std::optional<SequenceResult>>;

SweepResults sweep_serial(const std::vector<std::vector<double>>& prefixes, double lambda,
                          const SdoConfig& cfg, const AckModel& model) {
  SweepResults out(prefixes.size());
  for (std::size_t i = 0; i < prefixes.size(); ++i)
    out[i] = solve_sequence_from(prefixes[i], lambda, cfg, model);
  return out;
}

SweepResults sweep_parallel(const std::vector<std::vector<double>>& prefixes, double lambda,
                            const SdoConfig& cfg, const AckModel& model) {
  SweepResults out(prefixes.size());
  std::exception_ptr error;
  const auto count = static_cast<long>(prefixes.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = solve_sequence_from(prefixes[i], lambda, cfg, model);
    } catch (...) {
#pragma omp critical(harq_sdo_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

SweepResults sweep(double lambda, const SdoConfig& cfg, const AckModel& model, Exec exec) {
  const auto prefixes = sweep_prefixes(cfg);
  return exec == Exec::Parallel ? sweep_parallel(prefixes, lambda, cfg, model)
                                : sweep_serial(prefixes, lambda, cfg, model);
}

PLambda reduce(const SweepResults& results, double lambda) {
  std::optional<SequenceResult> best;
  for (const auto& r : results)
    if (r && better(*r, best)) best = *r;
  if (!best)
    throw InfeasibleError(fmt::format("every start blocklength is rejected at lambda={}", lambda));
  PLambda out;
  out.lambda = lambda;
  out.p = best->objective;
  out.best = std::move(*best);
  return out;
}

}  // namespace

PLambda p_lambda(double lambda, const SdoConfig& cfg, const AckModel& model, Exec exec) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  cfg.validate();
  return reduce(sweep(lambda, cfg, model, exec), lambda);
}

Schedule round_schedule(const Schedule& sched, double n_max) {
  Schedule out = sched;
  auto& n = out.n;
  for (auto& v : n) v = std::nearbyint(v);
  for (std::size_t i = 1; i < n.size(); ++i)
    if (n[i] <= n[i - 1]) n[i] = n[i - 1] + 1.0;
  const double terminal = std::nearbyint(n_max);
  n.back() = terminal;
  // Collision repair may have pushed interior entries onto or past the
  // terminal blocklength; those transmissions are absorbed by the last one.
  while (n.size() >= 2 && n[n.size() - 2] >= terminal) n.erase(n.end() - 2);
  return out;
}

SdoSolution solve(const SdoConfig& cfg, const AckModel& model, Exec exec) {
  cfg.validate();
  if (cfg.n_max > model.max_n())
    throw std::invalid_argument(fmt::format("nmax={} beyond the ACK model range", cfg.n_max));

  const auto residual = [](const PLambda& r) { return r.p - r.best.moments.m1; };

  PLambda at_zero = p_lambda(0.0, cfg, model, exec);
  if (!(residual(at_zero) > 0.0))
    throw NonBracketingError("p(0) - E[tau_0] is not positive");

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (p_lambda(hi, cfg, model, exec).p >= 0.0) {
    if (++doublings > 60) throw NonBracketingError("no lambda_max with p(lambda_max) < 0");
    hi *= 2.0;
  }

  PLambda chosen = at_zero;
  double chosen_res = std::abs(residual(at_zero));
  int steps = 0;
  while (steps < 200) {
    const double mid = 0.5 * (lo + hi);
    PLambda r = p_lambda(mid, cfg, model, exec);
    ++steps;
    const double g = residual(r);
    if (std::abs(g) <= chosen_res) {
      chosen_res = std::abs(g);
      chosen = r;
    }
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
    const double scale = std::max(1.0, r.best.moments.m1);
    if (hi - lo < cfg.lambda_tol && std::abs(g) <= 1e-10 * scale) break;
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
  }

  SdoSolution sol;
  sol.lambda_star = chosen.lambda;
  sol.p_of_lambda = chosen.p;
  sol.rho_star = chosen.p + chosen.lambda;
  sol.root_residual = chosen_res;
  sol.bisection_steps = steps;
  sol.real_schedule = chosen.best.schedule;
  sol.n1_star = sol.real_schedule.n.front();
  sol.rho_real = rho_zero_wait(chosen.best.moments);
  sol.schedule = round_schedule(sol.real_schedule, cfg.n_max);
  sol.rho_rounded = rho_zero_wait(schedule_moments(sol.schedule, model));

  const auto prefixes = sweep_prefixes(cfg);
  const auto at_star = exec == Exec::Parallel
                           ? sweep_parallel(prefixes, chosen.lambda, cfg, model)
                           : sweep_serial(prefixes, chosen.lambda, cfg, model);
  for (std::size_t i = 0; i < at_star.size(); ++i) {
    if (!at_star[i]) continue;
    const double start = cfg.pinned_n1 && prefixes[i].size() > 1 ? prefixes[i][1] : prefixes[i][0];
    sol.objective_trace.push_back(
        {start, rho_zero_wait(at_star[i]->moments), at_star[i]->schedule.attempts()});
  }
  return sol;
}

namespace {

CurvePoint curve_point(double n1, const SdoConfig& cfg, const AckModel& model) {
  CurvePoint pt;
  pt.n1 = n1;
  SdoConfig pinned = cfg;
  pinned.pinned_n1 = n1;
  try {
    const auto sol = solve(pinned, model, Exec::Serial);
    pt.lambda_star = sol.lambda_star;
    pt.rho = sol.rho_star;
    pt.rho_real = sol.rho_real;
    pt.schedule = sol.real_schedule;
    pt.feasible = true;
  } catch (const InfeasibleError&) {
  } catch (const NonBracketingError&) {
  }
  return pt;
}

}  // namespace

std::vector<CurvePoint> rho_n1_curve(const SdoConfig& cfg, const AckModel& model, Exec exec) {
  cfg.validate();
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double n1 = cfg.k + i * cfg.n1_step;
    if (n1 > cfg.n_max + 1e-9 * cfg.n_max) break;
    grid.push_back(std::min(n1, cfg.n_max));
  }
  std::vector<CurvePoint> out(grid.size());
  const auto count = static_cast<long>(grid.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < count; ++i) out[i] = curve_point(grid[i], cfg, model);
    return out;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = curve_point(grid[i], cfg, model);
    } catch (...) {
#pragma omp critical(harq_curve_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::optional<std::size_t> curve_argmin(const std::vector<CurvePoint>& curve) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (curve[i].feasible && (!best || curve[i].rho < curve[*best].rho)) best = i;
  return best;
}

std::optional<FixedMChoice> select_fixed_m(const std::vector<CurvePoint>& curve, int m) {
  const auto opt = curve_argmin(curve);
  if (!opt) return std::nullopt;
  // Walk back from the right end while every point stays within m attempts.
  std::size_t threshold = curve.size();
  for (std::size_t i = curve.size(); i-- > *opt;) {
    if (curve[i].feasible && curve[i].schedule.attempts() > m) break;
    threshold = i;
  }
  std::optional<std::size_t> pick;
  for (std::size_t i = threshold; i < curve.size(); ++i) {
    if (!curve[i].feasible || curve[i].schedule.attempts() != m) continue;
    if (!pick || curve[i].rho < curve[*pick].rho) pick = i;
  }
  if (!pick) return std::nullopt;
  return FixedMChoice{curve[threshold].n1, curve[*pick]};
}

}  // namespace harq
