// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "harq/ack_model.hpp"
#include "harq/baselines.hpp"
#include "harq/sdo_optimizer.hpp"
#include "harq/service_time.hpp"
#include "harq/simulator.hpp"
#include "harq/waiting_policy.hpp"

using namespace harq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const AckModel& model() {
  static const AckModel m = AckModel::gaussian_tbcc(64);
  return m;
}

SdoConfig config(double beta) {
  SdoConfig c;
  c.k = 64;
  c.n_max = 192;
  c.beta = beta;
  return c;
}

const std::vector<CurvePoint>& curve_beta10() {
  static const auto c = rho_n1_curve(config(10), model());
  return c;
}

struct SweepRow {
  double beta = 0;
  SdoSolution harq;
  BaselineResult iir, fr_no, fr_rep;
};

const std::vector<SweepRow>& sweep() {
  static const auto rows = [] {
    std::vector<SweepRow> out;
    const auto [lo, hi] = fr_grid(model());
    const int cap = iir_cap(model());
    for (int b = 0; b <= 150; b += 10) {
      SweepRow r;
      r.beta = b;
      r.harq = solve(config(b), model());
      r.iir = iir_aoi(64, b, model(), cap);
      r.fr_no = fr_no_replace_aoi(64, b, model(), lo, hi);
      r.fr_rep = fr_replace_aoi(64, b, model(), lo, hi);
      out.push_back(std::move(r));
    }
    return out;
  }();
  return rows;
}

bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = solve(config(10), model(), Exec::Serial);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = near(sol.lambda_star, 70, 2) && near(sol.p_of_lambda, 138, 3) && secs < 10;
  return {ok, fmt::format("lambda*={:.3f} (70±2) p(lambda*)={:.3f} (138±3) serial time={:.3f}s (<10s)",
                          sol.lambda_star, sol.p_of_lambda, secs)};
}

Outcome criterion2() {
  const auto& c = curve_beta10();
  const auto best = curve_argmin(c);
  if (!best) return {false, "per-N1 curve has no feasible point"};
  const auto& pt = c[*best];
  const int m = pt.schedule.attempts();
  const auto swept = solve(config(10), model());
  const bool ok = near(pt.n1, 119, 1) && m == 6 && near(pt.rho, 208, 4);
  return {ok, fmt::format("argmin of rho0*(N1): N1*={} (119±1) m={} (6) rho0*={:.3f} (208±4); "
                          "swept-N1 route: N1={} m={} rho0={:.3f}",
                          pt.n1, m, pt.rho, swept.n1_star, swept.real_schedule.attempts(), swept.rho_star)};
}

Outcome criterion3() {
  const auto sol = solve(config(10), model());
  const auto& c = curve_beta10();
  const auto best = curve_argmin(c);
  if (!best) return {false, "per-N1 curve has no feasible point"};
  const double lhs = sol.p_of_lambda + sol.lambda_star;
  const double rel = std::abs(lhs - c[*best].rho) / c[*best].rho;
  return {rel <= 5e-3, fmt::format("p(lambda*)+lambda*={:.4f} min rho0*(N1)={:.4f} rel diff={:.3e} (<=5e-3)",
                                   lhs, c[*best].rho, rel)};
}

Outcome criterion4() {
  const auto pick = select_fixed_m(curve_beta10(), 5);
  if (!pick) return {false, "no N1 on the curve uses exactly 5 transmissions"};
  const double n1 = pick->choice.n1;
  return {near(n1, 137, 1), fmt::format("fixed m=5: threshold N1={} selected N1={} (137±1) rho0={:.3f}",
                                        pick->threshold_n1, n1, pick->choice.rho)};
}

Outcome criterion5() {
  bool dominance = true;
  std::string worst;
  std::optional<double> crossover;
  for (const auto& r : sweep()) {
    for (double h : {r.harq.rho_real, r.harq.rho_rounded}) {
      if (h > r.iir.aoi || h > r.fr_no.aoi) {
        dominance = false;
        worst += fmt::format(" beta={} HARQ={:.3f} IIR={:.3f} FRnr={:.3f};", r.beta, h, r.iir.aoi, r.fr_no.aoi);
      }
    }
    if (!crossover && r.fr_rep.aoi < r.harq.rho_real) crossover = r.beta;
  }
  const bool cross_ok = crossover && *crossover >= 100 && *crossover <= 140;
  return {dominance && cross_ok,
          fmt::format("HARQ <= IIR and FR-no-replace at all 16 betas: {}{}; FR-replace crossover beta={} ([100,140])",
                      dominance ? "yes" : "no", worst, crossover ? fmt::format("{}", *crossover) : "none")};
}

Outcome criterion6() {
  double worst = 0, at = 0;
  for (const auto& r : sweep()) {
    const double rel = std::abs(r.harq.rho_rounded - r.harq.rho_real) / r.harq.rho_real;
    if (rel > worst) {
      worst = rel;
      at = r.beta;
    }
  }
  return {worst < 0.01, fmt::format("max |rounded - real|/real = {:.4f}% at beta={} (<1%)", 100 * worst, at)};
}

// Largest normalised stationarity residual over the imposed conditions and
// the largest relative gap between the closed-form partials and central
// differences.
struct Stationarity {
  double residual = 0;
  double fd_gap = 0;
  int conditions = 0;
};

void check_schedule(const Schedule& s, double lambda, int first_f, Stationarity& acc) {
  const auto mom = schedule_moments(s, model());
  const double scale = 1.0 + std::abs(auxiliary_objective(mom, lambda));
  for (int f = first_f; f + 1 < s.attempts(); ++f) {
    const auto d = moment_partials(s, model(), f);
    acc.residual = std::max(acc.residual, std::abs((1.0 - lambda) * d.m1 + 0.5 * d.m2) / scale);
    ++acc.conditions;
    const double h = 1e-3;
    const double lo_gap = s.n[f - 1] - (f >= 2 ? s.n[f - 2] : -1e9);
    if (s.n[f] - s.n[f - 1] < 2 * h || lo_gap < 2 * h) continue;
    auto up = s, dn = s;
    up.n[f - 1] += h;
    dn.n[f - 1] -= h;
    const auto mu = schedule_moments(up, model()), md = schedule_moments(dn, model());
    const double fd1 = (mu.m1 - md.m1) / (2 * h), fd2 = (mu.m2 - md.m2) / (2 * h);
    acc.fd_gap = std::max({acc.fd_gap, std::abs(d.m1 - fd1) / std::max(1.0, std::abs(fd1)),
                           std::abs(d.m2 - fd2) / std::max(1.0, std::abs(fd2))});
  }
}

Outcome criterion7() {
  Stationarity acc;
  int schedules = 0;
  for (const auto& r : sweep()) {
    check_schedule(r.harq.real_schedule, r.harq.lambda_star, 1, acc);
    ++schedules;
  }
  for (const auto& pt : curve_beta10()) {
    if (!pt.feasible) continue;
    check_schedule(pt.schedule, pt.lambda_star, 2, acc);
    ++schedules;
  }
  const bool ok = acc.residual < 1e-4 && acc.fd_gap <= 1e-5;
  return {ok, fmt::format("{} schedules, {} conditions: max residual/(1+|obj|)={:.2e} (<1e-4), "
                          "max partial vs finite difference gap={:.2e} (<=1e-5)",
                          schedules, acc.conditions, acc.residual, acc.fd_gap)};
}

Outcome criterion8() {
  std::vector<ServiceTimeDist> dists{ServiceTimeDist({15, 30}, {0.5, 0.5}),
                                     build_dist(solve(config(10), model()).schedule, model()),
                                     iir_dist(120, 10, model(), iir_cap(model())),
                                     *geometric_dist(138, 10, model().prob(138))};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1, 100);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> t{u(rng)};
    for (int j = 0; j < 4; ++j) t.push_back(t.back() + u(rng));
    std::vector<double> w{0.1, 0.3, 0.2, 0.15};
    w.push_back(1.0 - (0.1 + 0.3 + 0.2 + 0.15));
    dists.emplace_back(t, w);
  }
  double min_gamma = 1e300;
  for (const auto& d : dists) min_gamma = std::min(min_gamma, solve_gamma(d).gamma_star);

  const double c = 202;
  const auto det = solve_gamma(ServiceTimeDist::deterministic(c));
  const bool det_ok = near(det.eta_star, 1.5 * c, 1e-12 * c) && near(det.gamma_star, c / 2, 1e-12 * c);

  // Thresholds below the smallest service time never trigger a wait, so the
  // grid minimisers of the two-point ratio form an interval.
  const ServiceTimeDist two({15, 30}, {0.5, 0.5});
  const auto s = solve_gamma(two);
  std::vector<double> ratio;
  for (int i = 0; i <= 60000; ++i) ratio.push_back(epoch_moments(two, i * 1e-3).ratio());
  const double best = *std::min_element(ratio.begin(), ratio.end());
  double g_lo = 1e300, g_hi = -1;
  for (int i = 0; i <= 60000; ++i) {
    if (ratio[i] <= best + 1e-12) {
      g_lo = std::min(g_lo, i * 1e-3);
      g_hi = std::max(g_hi, i * 1e-3);
    }
  }
  const bool grid_ok = s.gamma_star >= g_lo - 1e-2 && s.gamma_star <= g_hi + 1e-2 && near(s.eta_star, best, 1e-2);
  return {min_gamma > 0 && det_ok && grid_ok,
          fmt::format("min gamma* over {} distributions={:.4f} (>0); deterministic c={}: eta*={} gamma*={}; "
                      "two-point gamma*={:.5f} vs grid minimisers [{:.3f}, {:.3f}], eta*={:.5f} vs grid {:.5f} (1e-2)",
                      dists.size(), min_gamma, c, det.eta_star, det.gamma_star, s.gamma_star, g_lo, g_hi,
                      s.eta_star, best)};
}

Outcome criterion9() {
  struct Case {
    std::string name;
    SimScheme scheme;
    double gamma;
  };
  std::vector<Case> cases;
  cases.push_back({"hand {15,30}", ServiceTimeDist({15, 30}, {0.5, 0.5}), 0.0});
  const auto [lo, hi] = fr_grid(model());
  const int cap = iir_cap(model());
  for (double b : {0.0, 10.0, 50.0, 100.0, 150.0}) {
    const auto d = build_dist(solve(config(b), model()).schedule, model());
    cases.push_back({fmt::format("HARQ beta={}", b), d, 0.0});
    if (b == 10.0) cases.push_back({"HARQ beta=10 waiting", d, solve_gamma(d).gamma_star});
  }
  for (double b : {10.0, 100.0}) {
    const auto ir = iir_aoi(64, b, model(), cap);
    cases.push_back({fmt::format("IIR beta={}", b), iir_dist(ir.n1_star, b, model(), cap), *ir.gamma_star});
    const auto nr = fr_no_replace_aoi(64, b, model(), lo, hi);
    cases.push_back({fmt::format("FR-no-replace beta={}", b),
                     *geometric_dist(nr.n1_star, b, model().prob(nr.n1_star)), *nr.gamma_star});
    const auto fr = fr_replace_aoi(64, b, model(), lo, hi);
    cases.push_back({fmt::format("FR-replace beta={}", b),
                     FrReplaceScheme{fr.n1_star + b, model().prob(fr.n1_star)}, 0.0});
  }
  int pass = 0;
  std::string fails;
  double hand = 0, hand_se = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    SimConfig cfg;
    cfg.epochs = 1'000'000;
    cfg.seed = 1 + i;
    cfg.gamma = cases[i].gamma;
    const auto r = simulate(cfg, cases[i].scheme);
    const double a = analytical_aoi(cases[i].scheme, cases[i].gamma);
    if (i == 0) {
      hand = r.aoi_estimate;
      hand_se = r.std_error;
    }
    if (std::abs(r.aoi_estimate - a) <= 3 * r.std_error)
      ++pass;
    else
      fails += fmt::format(" {}: sim={:.4f} analytic={:.4f} se={:.4f};", cases[i].name, r.aoi_estimate, a,
                           r.std_error);
  }
  const bool ok = pass == static_cast<int>(cases.size()) && cases.size() >= 10;
  return {ok, fmt::format("{}/{} (scheme, beta) pairs within 3 standard errors at 1e6 epochs; "
                          "hand example {:.4f} ± {:.4f} (35.0){}",
                          pass, cases.size(), hand, 3 * hand_se, fails)};
}

Outcome criterion10() {
  bool p_ok = true, e_ok = true;
  std::string detail;
  for (double b : {10.0, 15.0, 20.0}) {
    // The expectation of the optimal service time only moves monotonically
    // once N1 is swept finely enough to track the continuous optimum.
    auto cfg = config(b);
    cfg.n1_step = 1e-3;
    double prev_p = 1e300, prev_e = -1e300, worst_e = 0;
    for (int i = 0; i < 50; ++i) {
      const double l = 150.0 * i / 49.0;
      const auto r = p_lambda(l, cfg, model());
      if (r.p > prev_p) p_ok = false;
      if (r.best.moments.m1 < prev_e) {
        e_ok = false;
        worst_e = std::max(worst_e, prev_e - r.best.moments.m1);
      }
      prev_p = r.p;
      prev_e = r.best.moments.m1;
    }
    detail += fmt::format(" beta={}: E drop={:.2e};", b, worst_e);
  }
  std::vector<double> n1;
  for (double b : {10.0, 15.0, 20.0}) n1.push_back(solve(config(b), model()).n1_star);
  const bool n1_ok = std::is_sorted(n1.begin(), n1.end());
  return {p_ok && e_ok && n1_ok,
          fmt::format("50-point lambda grid on [0,150]: p nonincreasing={} E[tau] nondecreasing={}{} "
                      "N1* at beta 10/15/20 = {}/{}/{} nondecreasing={}",
                      p_ok, e_ok, detail, n1[0], n1[1], n1[2], n1_ok)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"lambda* and p(lambda*)", criterion1}},
      {2, {"optimal schedule", criterion2}},
      {3, {"p(lambda*)+lambda* identity", criterion3}},
      {4, {"fixed-m methodology", criterion4}},
      {5, {"dominance sweep", criterion5}},
      {6, {"rounding robustness", criterion6}},
      {7, {"stationarity oracle", criterion7}},
      {8, {"waiting-policy properties", criterion8}},
      {9, {"simulator concordance", criterion9}},
      {10, {"monotonicity suite", criterion10}},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& [n, _] : criteria) selected.push_back(n);

  int failed = 0;
  for (int n : selected) {
    const auto it = criteria.find(n);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << n << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    std::cout << fmt::format("criterion {:>2} {} {}: {}\n", n, o.pass ? "PASS" : "FAIL", it->second.first, o.detail)
              << std::flush;
  }
  return failed ? 1 : 0;
}
