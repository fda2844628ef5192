#include "harq/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "harq/ack_model.hpp"
#include "harq/baselines.hpp"
#include "harq/sdo_optimizer.hpp"
#include "harq/service_time.hpp"
#include "harq/simulator.hpp"
#include "harq/waiting_policy.hpp"

namespace harq::cli {

namespace {

using nlohmann::json;

struct Common {
  int k = 64;
  double nmax = 192.0;
  double beta = 10.0;
  std::string model = "gaussian-tbcc";
  std::string out;
  std::string format = "csv";
  int fixed_m = 0;
  std::uint64_t seed = 1;
  std::uint64_t epochs = 1'000'000;
  double n1_step = 1.0;
  double lambda_tol = 1e-4;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--k", c.k, "Message length in bits")->capture_default_str();
  app->add_option("--nmax", c.nmax, "Terminal cumulative blocklength N_m")->capture_default_str();
  app->add_option("--beta", c.beta, "Processing delay per decoding attempt")->capture_default_str();
  app->add_option("--model", c.model, "gaussian-tbcc or table:<path>")->capture_default_str();
  app->add_option("--out", c.out, "Write machine-readable output to this file");
  app->add_option("--format", c.format, "csv or json")->capture_default_str();
  app->add_option("--fixed-m", c.fixed_m, "Constrain the number of transmissions");
  app->add_option("--seed", c.seed, "Simulator seed")->capture_default_str();
  app->add_option("--epochs", c.epochs, "Simulated epochs")->capture_default_str();
  app->add_option("--n1-step", c.n1_step, "Grid step of the swept start blocklength")
      ->capture_default_str();
  app->add_option("--lambda-tol", c.lambda_tol, "Bisection tolerance on lambda")
      ->capture_default_str();
}

void check_common(const Common& c) {
  if (c.beta < 0.0) throw UsageError("beta must be ≥ 0");
  if (c.k <= 0) throw UsageError("k must be positive");
  if (c.nmax < c.k) throw UsageError("nmax must be ≥ k");
  if (c.fixed_m < 0) throw UsageError("fixed-m must be ≥ 1");
  if (c.format != "csv" && c.format != "json") throw UsageError("format must be csv or json");
  if (c.epochs < 1) throw UsageError("epochs must be ≥ 1");
  if (!(c.n1_step > 0.0)) throw UsageError("n1-step must be positive");
}

AckModel load_model(const Common& c) {
  try {
    return resolve_model(c.model, c.k);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

SdoConfig sdo_config(const Common& c, double beta) {
  SdoConfig cfg;
  cfg.k = c.k;
  cfg.beta = beta;
  cfg.n_max = c.nmax;
  cfg.n1_step = c.n1_step;
  cfg.lambda_tol = c.lambda_tol;
  return cfg;
}

std::string num(double v) { return fmt::format("{:.6f}", v); }

std::string join(const std::vector<double>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += fmt::format("{}", v[i]);
  }
  return s;
}

std::vector<long long> as_ints(const std::vector<double>& v) {
  std::vector<long long> out;
  for (double x : v) out.push_back(std::llround(x));
  return out;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot write '{}'", c.out));
  f << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::istringstream t(tok);
    t.imbue(std::locale::classic());
    double v = 0.0;
    if (!(t >> v) || !(t >> std::ws).eof()) throw UsageError(fmt::format("bad number '{}'", tok));
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// ---------------------------------------------------------------- optimize

json config_json(const Common& c, const std::string& route) {
  json j;
  j["k"] = c.k;
  j["nmax"] = c.nmax;
  j["beta"] = c.beta;
  j["model"] = c.model;
  j["route"] = route;
  j["n1_step"] = c.n1_step;
  if (c.fixed_m > 0) j["fixed_m"] = c.fixed_m;
  return j;
}

int cmd_optimize(const Common& c, const std::string& route, std::ostream& out) {
  const auto model = load_model(c);
  auto cfg = sdo_config(c, c.beta);

  double lambda_star = 0.0, p_of_lambda = 0.0, rho_star = 0.0, rho_rounded = 0.0;
  Schedule real, rounded;
  std::string extra;

  if (c.fixed_m > 0) {
    const auto curve = rho_n1_curve(cfg, model);
    const auto pick = select_fixed_m(curve, c.fixed_m);
    if (!pick) throw InfeasibleError(fmt::format("no N_1 on the curve uses exactly {} transmissions", c.fixed_m));
    const auto& pt = pick->choice;
    lambda_star = pt.lambda_star;
    rho_star = pt.rho;
    p_of_lambda = pt.rho - pt.lambda_star;
    real = pt.schedule;
    rounded = round_schedule(real, cfg.n_max);
    rho_rounded = rho_zero_wait(schedule_moments(rounded, model));
    extra = fmt::format("fixed_m            {}\nn1_threshold       {}\n", c.fixed_m, pick->threshold_n1);
  } else if (route == "per-n1") {
    const auto curve = rho_n1_curve(cfg, model);
    const auto best = curve_argmin(curve);
    if (!best) throw InfeasibleError("every N_1 on the grid is infeasible");
    const auto& pt = curve[*best];
    lambda_star = pt.lambda_star;
    rho_star = pt.rho;
    p_of_lambda = pt.rho - pt.lambda_star;
    real = pt.schedule;
    rounded = round_schedule(real, cfg.n_max);
    rho_rounded = rho_zero_wait(schedule_moments(rounded, model));
  } else {
    const auto sol = solve(cfg, model);
    lambda_star = sol.lambda_star;
    p_of_lambda = sol.p_of_lambda;
    rho_star = sol.rho_star;
    real = sol.real_schedule;
    rounded = sol.schedule;
    rho_rounded = sol.rho_rounded;
  }

  const auto wait = solve_gamma(build_dist(rounded, model));
  const auto ir = as_ints(rounded.ir_lengths());
  const auto sched_ints = as_ints(rounded.n);

  json j;
  j["schema"] = 1;
  j["config"] = config_json(c, route);
  j["lambda_star"] = lambda_star;
  j["p_of_lambda"] = p_of_lambda;
  j["rho_star"] = rho_star;
  j["rho_rounded"] = rho_rounded;
  j["schedule"] = sched_ints;
  j["real_schedule"] = real.n;
  j["ir_lengths"] = ir;
  j["gamma_star"] = wait.gamma_star;
  j["aoi_with_wait"] = wait.aoi_with_wait;

  if (c.format == "json" && c.out.empty()) {
    out << j.dump(2) << "\n";
    return kOk;
  }

  std::string ints, irs;
  for (std::size_t i = 0; i < sched_ints.size(); ++i) {
    ints += fmt::format("{}{}", i ? " " : "", sched_ints[i]);
    irs += fmt::format("{}{}", i ? " " : "", ir[i]);
  }
  out << fmt::format("route              {}\n", c.fixed_m > 0 ? "per-n1 (fixed m)" : route);
  out << extra;
  out << fmt::format("lambda_star        {}\n", num(lambda_star));
  out << fmt::format("p_of_lambda        {}\n", num(p_of_lambda));
  out << fmt::format("rho_star           {}\n", num(rho_star));
  out << fmt::format("rho_rounded        {}\n", num(rho_rounded));
  out << fmt::format("n1                 {}\n", sched_ints.front());
  out << fmt::format("transmissions      {}\n", sched_ints.size());
  out << fmt::format("schedule           {}\n", ints);
  out << fmt::format("ir_lengths         {}\n", irs);
  out << fmt::format("gamma_star         {}\n", num(wait.gamma_star));
  out << fmt::format("aoi_with_wait      {}\n", num(wait.aoi_with_wait));
  if (!c.out.empty()) emit(c, j.dump(2) + "\n", out);
  return kOk;
}

// ------------------------------------------------------------------ sweep

struct SweepRecord {
  double beta = 0.0;
  std::string scheme;
  std::optional<double> n1;
  std::optional<int> m;
  std::optional<double> aoi_zero_wait;
  std::optional<double> aoi_with_wait;
  std::optional<double> gamma_star;
  std::string error;
};

constexpr const char* kSweepHeader = "beta,scheme,n1,m,aoi_zero_wait,aoi_with_wait,gamma_star,error";

template <class T, class F>
std::string opt_str(const std::optional<T>& v, F f) {
  return v ? f(*v) : std::string();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string to_csv(const std::vector<SweepRecord>& rows) {
  std::string s = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    s += fmt::format("{},{},{},{},{},{},{},{}\n", r.beta, r.scheme,
                     opt_str(r.n1, [](double v) { return fmt::format("{}", v); }),
                     opt_str(r.m, [](int v) { return fmt::format("{}", v); }),
                     opt_str(r.aoi_zero_wait, num), opt_str(r.aoi_with_wait, num),
                     opt_str(r.gamma_star, num), csv_escape(r.error));
  }
  return s;
}

json to_json(const std::vector<SweepRecord>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["beta"] = r.beta;
    j["scheme"] = r.scheme;
    j["n1"] = r.n1 ? json(*r.n1) : json(nullptr);
    j["m"] = r.m ? json(*r.m) : json(nullptr);
    j["aoi_zero_wait"] = r.aoi_zero_wait ? json(*r.aoi_zero_wait) : json(nullptr);
    j["aoi_with_wait"] = r.aoi_with_wait ? json(*r.aoi_with_wait) : json(nullptr);
    j["gamma_star"] = r.gamma_star ? json(*r.gamma_star) : json(nullptr);
    j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

template <class F>
SweepRecord guarded(double beta, std::string scheme, F f) {
  SweepRecord r;
  r.beta = beta;
  r.scheme = std::move(scheme);
  try {
    f(r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

SweepRecord from_baseline(double beta, Scheme scheme, const BaselineResult& b) {
  SweepRecord r;
  r.beta = beta;
  r.scheme = std::string(scheme_name(scheme));
  r.n1 = b.n1_star;
  r.aoi_zero_wait = b.aoi_zero_wait;
  r.aoi_with_wait = b.aoi;
  r.gamma_star = b.gamma_star.value_or(0.0);
  return r;
}

std::vector<SweepRecord> baseline_rows(double beta, const Common& c, const AckModel& model,
                                       const std::string& which, Exec exec) {
  std::vector<SweepRecord> rows;
  const auto [lo, hi] = fr_grid(model);
  if (which == "all" || which == "fr-no-replace")
    rows.push_back(guarded(beta, "FR-no-replace", [&](SweepRecord& r) {
      r = from_baseline(beta, Scheme::FrNoReplace, fr_no_replace_aoi(c.k, beta, model, lo, hi, exec));
    }));
  if (which == "all" || which == "fr-replace")
    rows.push_back(guarded(beta, "FR-replace", [&](SweepRecord& r) {
      r = from_baseline(beta, Scheme::FrReplace, fr_replace_aoi(c.k, beta, model, lo, hi));
    }));
  if (which == "all" || which == "iir")
    rows.push_back(guarded(beta, "IIR", [&](SweepRecord& r) {
      const auto b = iir_aoi(c.k, beta, model, iir_cap(model), exec);
      r = from_baseline(beta, Scheme::Iir, b);
      r.m = iir_cap(model) - b.n1_star + 1;
    }));
  return rows;
}

std::vector<SweepRecord> sweep_rows(double beta, const Common& c, const AckModel& model) {
  std::vector<SweepRecord> rows = baseline_rows(beta, c, model, "all", Exec::Serial);
  std::optional<SdoSolution> sol;
  std::string sdo_error;
  try {
    sol = solve(sdo_config(c, beta), model, Exec::Serial);
  } catch (const std::exception& e) {
    sdo_error = e.what();
  }
  const auto harq_row = [&](const char* name, bool rounded) {
    return guarded(beta, name, [&](SweepRecord& r) {
      if (!sol) throw std::runtime_error(sdo_error);
      const Schedule& s = rounded ? sol->schedule : sol->real_schedule;
      const auto w = solve_gamma(build_dist(s, model));
      r.n1 = s.n.front();
      r.m = s.attempts();
      r.aoi_zero_wait = rounded ? sol->rho_rounded : sol->rho_real;
      r.aoi_with_wait = w.aoi_with_wait;
      r.gamma_star = w.gamma_star;
    });
  };
  rows.push_back(harq_row("HARQ", false));
  rows.push_back(harq_row("HARQ-rounded", true));
  std::sort(rows.begin(), rows.end(),
            [](const SweepRecord& a, const SweepRecord& b) { return a.scheme < b.scheme; });
  return rows;
}

std::vector<double> beta_grid(const std::string& betas, const std::string& range, double single) {
  if (!betas.empty()) return parse_list(betas);
  if (!range.empty()) {
    std::string spec = range;
    std::replace(spec.begin(), spec.end(), ':', ',');
    const auto v = parse_list(spec);
    if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0])
      throw UsageError("beta-range must be start:stop:step with step > 0");
    std::vector<double> out;
    for (int i = 0;; ++i) {
      const double b = v[0] + i * v[2];
      if (b > v[1] + 1e-9 * std::max(1.0, std::abs(v[1]))) break;
      out.push_back(b);
    }
    return out;
  }
  return {single};
}

int cmd_sweep(const Common& c, const std::vector<double>& betas, std::ostream& out) {
  const auto model = load_model(c);
  for (double b : betas)
    if (b < 0.0) throw UsageError("beta must be ≥ 0");
  std::vector<double> sorted = betas;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<std::vector<SweepRecord>> groups(sorted.size());
  const auto count = static_cast<long>(sorted.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) groups[i] = sweep_rows(sorted[i], c, model);

  std::vector<SweepRecord> rows;
  for (auto& g : groups) rows.insert(rows.end(), g.begin(), g.end());
  emit(c, c.format == "json" ? to_json(rows).dump(2) + "\n" : to_csv(rows), out);
  return kOk;
}

int cmd_baseline(const Common& c, const std::string& which, std::ostream& out) {
  if (which != "all" && which != "iir" && which != "fr-no-replace" && which != "fr-replace")
    throw UsageError(fmt::format("unknown scheme '{}'", which));
  const auto model = load_model(c);
  auto rows = baseline_rows(c.beta, c, model, which, Exec::Parallel);
  emit(c, c.format == "json" ? to_json(rows).dump(2) + "\n" : to_csv(rows), out);
  return kOk;
}

// ----------------------------------------------------------------- curves

int cmd_curves(const Common& c, const std::string& name, double lambda_max, int points,
               std::ostream& out) {
  if (name != "p-lambda" && name != "rho-n1" && name != "ir-n1")
    throw UsageError(fmt::format("unknown curve '{}' (expected p-lambda, rho-n1 or ir-n1)", name));
  const auto model = load_model(c);
  auto cfg = sdo_config(c, c.beta);
  if (c.fixed_m > 0) cfg.fixed_m = c.fixed_m;

  json arr = json::array();
  std::string csv;
  if (name == "p-lambda") {
    if (points < 2 || !(lambda_max > 0.0)) throw UsageError("need points ≥ 2 and lambda-max > 0");
    csv = "lambda,p,e_tau,e_tau2,n1,m\n";
    for (int i = 0; i < points; ++i) {
      const double lambda = lambda_max * i / (points - 1);
      const auto r = p_lambda(lambda, cfg, model);
      csv += fmt::format("{},{},{},{},{},{}\n", num(lambda), num(r.p), num(r.best.moments.m1),
                         num(r.best.moments.m2), r.best.schedule.n.front(),
                         r.best.schedule.attempts());
      arr.push_back({{"lambda", lambda},
                     {"p", r.p},
                     {"e_tau", r.best.moments.m1},
                     {"e_tau2", r.best.moments.m2},
                     {"n1", r.best.schedule.n.front()},
                     {"m", r.best.schedule.attempts()}});
    }
  } else {
    const auto curve = rho_n1_curve(cfg, model);
    csv = name == "rho-n1" ? "n1,feasible,lambda_star,rho,rho_real,m\n"
                           : "n1,feasible,m,blocklengths,ir_lengths\n";
    for (const auto& pt : curve) {
      json j{{"n1", pt.n1}, {"feasible", pt.feasible}};
      if (name == "rho-n1") {
        csv += pt.feasible ? fmt::format("{},1,{},{},{},{}\n", pt.n1, num(pt.lambda_star), num(pt.rho),
                                         num(pt.rho_real), pt.schedule.attempts())
                           : fmt::format("{},0,,,,\n", pt.n1);
        if (pt.feasible) {
          j["lambda_star"] = pt.lambda_star;
          j["rho"] = pt.rho;
          j["rho_real"] = pt.rho_real;
          j["m"] = pt.schedule.attempts();
        }
      } else {
        csv += pt.feasible ? fmt::format("{},1,{},{},{}\n", pt.n1, pt.schedule.attempts(),
                                         join(pt.schedule.n, ";"), join(pt.schedule.ir_lengths(), ";"))
                           : fmt::format("{},0,,,\n", pt.n1);
        if (pt.feasible) {
          j["m"] = pt.schedule.attempts();
          j["blocklengths"] = pt.schedule.n;
          j["ir_lengths"] = pt.schedule.ir_lengths();
        }
      }
      arr.push_back(std::move(j));
    }
  }
  emit(c, c.format == "json" ? arr.dump(2) + "\n" : csv, out);
  return kOk;
}

// --------------------------------------------------------------- simulate

struct SimArgs {
  std::string scheme = "harq";
  std::string schedule;
  std::string support;
  std::string mass;
  std::string wait = "zero";
  int n1 = 0;
  int batches = 100;
};

int cmd_simulate(const Common& c, const SimArgs& a, std::ostream& out) {
  if (a.wait != "zero" && a.wait != "optimal") throw UsageError("wait must be zero or optimal");
  if (a.batches < 1) throw UsageError("batches must be ≥ 1");
  const auto model = load_model(c);

  std::optional<SimScheme> scheme;
  std::string label;
  if (a.scheme == "harq") {
    Schedule s;
    s.k = c.k;
    s.beta = c.beta;
    if (!a.schedule.empty()) {
      s.n = parse_list(a.schedule);
      try {
        s.validate();
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    } else {
      s = solve(sdo_config(c, c.beta), model).schedule;
    }
    scheme = build_dist(s, model);
    label = join(s.n, ",");
  } else if (a.scheme == "dist") {
    if (a.support.empty() || a.mass.empty()) throw UsageError("dist needs --support and --mass");
    try {
      scheme = ServiceTimeDist(parse_list(a.support), parse_list(a.mass));
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    label = a.support;
  } else if (a.scheme == "iir" || a.scheme == "fr-no-replace" || a.scheme == "fr-replace") {
    int n1 = a.n1;
    const auto [lo, hi] = fr_grid(model);
    if (n1 == 0) {
      if (a.scheme == "iir")
        n1 = iir_aoi(c.k, c.beta, model, iir_cap(model)).n1_star;
      else if (a.scheme == "fr-no-replace")
        n1 = fr_no_replace_aoi(c.k, c.beta, model, lo, hi).n1_star;
      else
        n1 = fr_replace_aoi(c.k, c.beta, model, lo, hi).n1_star;
    }
    if (n1 < c.k) throw UsageError("n1 must be ≥ k");
    if (a.scheme == "iir") {
      scheme = iir_dist(n1, c.beta, model, iir_cap(model));
    } else if (a.scheme == "fr-no-replace") {
      auto d = geometric_dist(n1, c.beta, model.prob(n1));
      if (!d) throw InfeasibleError(fmt::format("P_ACK({}) too small to simulate", n1));
      scheme = std::move(*d);
    } else {
      scheme = FrReplaceScheme{n1 + c.beta, model.prob(n1)};
    }
    label = fmt::format("n1={}", n1);
  } else {
    throw UsageError(fmt::format("unknown scheme '{}'", a.scheme));
  }

  double gamma = 0.0;
  if (a.wait == "optimal") {
    if (const auto* d = std::get_if<ServiceTimeDist>(&*scheme)) gamma = solve_gamma(*d).gamma_star;
  }

  SimConfig sc;
  sc.epochs = c.epochs;
  sc.seed = c.seed;
  sc.gamma = gamma;
  sc.batches = a.batches;
  const auto sim = simulate(sc, *scheme);
  const double analytic = analytical_aoi(*scheme, gamma);
  const double diff = std::abs(sim.aoi_estimate - analytic);
  const bool pass = sim.std_error > 0.0 ? diff <= 3.0 * sim.std_error
                                        : diff <= 1e-9 * std::max(1.0, std::abs(analytic));

  out << fmt::format("scheme             {}\n", a.scheme);
  out << fmt::format("parameters         {}\n", label);
  out << fmt::format("gamma              {}\n", num(gamma));
  out << fmt::format("epochs             {}\n", sim.epochs_used);
  out << fmt::format("seed               {}\n", c.seed);
  out << fmt::format("analytical_aoi     {}\n", num(analytic));
  out << fmt::format("simulated_aoi      {}\n", num(sim.aoi_estimate));
  out << fmt::format("std_error          {}\n", num(sim.std_error));
  out << fmt::format("check_3sigma       {}\n", pass ? "pass" : "fail");
  if (!c.out.empty()) {
    json j{{"schema", 1},
           {"scheme", a.scheme},
           {"parameters", label},
           {"gamma", gamma},
           {"epochs", sim.epochs_used},
           {"seed", c.seed},
           {"analytical_aoi", analytic},
           {"simulated_aoi", sim.aoi_estimate},
           {"std_error", sim.std_error},
           {"pass", pass}};
    emit(c, j.dump(2) + "\n", out);
  }
  return pass ? kOk : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AoI-optimal HARQ blocklength schedules", "harq_aoi"};
  app.require_subcommand(1);

  Common common;
  std::string route = "swept";
  std::string betas, beta_range, baseline_scheme = "all", curve_name;
  double lambda_max = 150.0;
  int points = 151;
  SimArgs sim;

  auto* opt = app.add_subcommand("optimize", "Optimal zero-wait schedule, then the waiting threshold");
  add_common(opt, common);
  opt->add_option("--route", route, "swept (N_1 swept inside p(lambda)) or per-n1 (argmin of rho_0*(N_1))")
      ->capture_default_str();

  auto* swp = app.add_subcommand("sweep", "HARQ and baselines over a set of beta values");
  add_common(swp, common);
  swp->add_option("--betas", betas, "Comma-separated beta values");
  swp->add_option("--beta-range", beta_range, "start:stop:step");

  auto* crv = app.add_subcommand("curves", "p-lambda, rho-n1 or ir-n1 sample points");
  add_common(crv, common);
  crv->add_option("name", curve_name, "Curve name")->required();
  crv->add_option("--lambda-max", lambda_max, "Upper end of the lambda grid")->capture_default_str();
  crv->add_option("--points", points, "Number of lambda grid points")->capture_default_str();

  auto* bas = app.add_subcommand("baseline", "IIR and FR baselines at one beta");
  add_common(bas, common);
  bas->add_option("--scheme", baseline_scheme, "all, iir, fr-no-replace or fr-replace")
      ->capture_default_str();

  auto* sml = app.add_subcommand("simulate", "Monte Carlo check of an analytical AoI");
  add_common(sml, common);
  sml->add_option("--scheme", sim.scheme, "harq, iir, fr-no-replace, fr-replace or dist")
      ->capture_default_str();
  sml->add_option("--schedule", sim.schedule, "Explicit HARQ blocklengths, comma-separated");
  sml->add_option("--support", sim.support, "Service-time support for scheme dist");
  sml->add_option("--mass", sim.mass, "Service-time masses for scheme dist");
  sml->add_option("--wait", sim.wait, "zero or optimal")->capture_default_str();
  sml->add_option("--n1", sim.n1, "Baseline N_1 (default: the optimal one)");
  sml->add_option("--batches", sim.batches, "Batches for the standard error")->capture_default_str();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    check_common(common);
    if (opt->parsed()) {
      if (route != "swept" && route != "per-n1") throw UsageError("route must be swept or per-n1");
      return cmd_optimize(common, route, out);
    }
    if (swp->parsed()) return cmd_sweep(common, beta_grid(betas, beta_range, common.beta), out);
    if (crv->parsed()) return cmd_curves(common, curve_name, lambda_max, points, out);
    if (bas->parsed()) return cmd_baseline(common, baseline_scheme, out);
    if (sml->parsed()) return cmd_simulate(common, sim, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const NonBracketingError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace harq::cli
