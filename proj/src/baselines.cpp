#include "harq/baselines.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <vector>

#include <fmt/core.h>

#include "harq/waiting_policy.hpp"

namespace harq {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Iir: return "IIR";
    case Scheme::FrNoReplace: return "FR-no-replace";
    case Scheme::FrReplace: return "FR-replace";
  }
  return "?";
}

int iir_cap(const AckModel& model) {
  const int start = static_cast<int>(std::ceil(model.min_n()));
  const double last = model.max_n();
  for (int n = start; n <= last; ++n)
    if (1.0 - model.prob(n) < kTailMass) return n;
  throw DomainError("ACK model never reaches 1 - 1e-12; no IIR cap exists");
}

ServiceTimeDist iir_dist(int n1, double beta, const AckModel& model, int n_cap) {
  std::vector<double> support;
  std::vector<double> mass;
  double prev = 0.0;
  for (int n = n1, j = 1; n <= n_cap; ++n, ++j) {
    const double cur = n < n_cap ? model.prob(n) : 1.0;
    support.push_back(n + j * beta);
    mass.push_back(cur - prev);
    prev = cur;
  }
  return ServiceTimeDist(std::move(support), std::move(mass));
}

std::optional<ServiceTimeDist> geometric_dist(double n1, double beta, double p,
                                              std::size_t max_terms) {
  if (!(p > 0.0)) return std::nullopt;
  const double slot = n1 + beta;
  if (p >= 1.0) return ServiceTimeDist::deterministic(slot);
  const double q = 1.0 - p;
  // Number of terms until q^j < tail.
  const double needed = std::ceil(std::log(kTailMass) / std::log(q));
  if (!(needed <= static_cast<double>(max_terms))) return std::nullopt;
  const auto terms = static_cast<std::size_t>(std::max(1.0, needed));
  std::vector<double> support(terms);
  std::vector<double> mass(terms);
  double total = 0.0;
  double survive = 1.0;  // q^(j-1)
  for (std::size_t j = 0; j < terms; ++j) {
    support[j] = slot * static_cast<double>(j + 1);
    mass[j] = p * survive;
    total += mass[j];
    survive *= q;
  }
  for (auto& w : mass) w /= total;
  return ServiceTimeDist(std::move(support), std::move(mass));
}

namespace {

struct GridValue {
  double aoi = std::numeric_limits<double>::infinity();
  double zero_wait = 0.0;
  double gamma = 0.0;
  bool valid = false;
};

template <class Eval>
std::vector<GridValue> eval_grid(int lo, int hi, Exec exec, const Eval& eval) {
  std::vector<GridValue> out(hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0);
  const auto count = static_cast<long>(out.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < count; ++i) out[i] = eval(lo + static_cast<int>(i));
    return out;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = eval(lo + static_cast<int>(i));
    } catch (...) {
#pragma omp critical(harq_baseline_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

BaselineResult pick(Scheme scheme, int lo, const std::vector<GridValue>& values) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].valid && (!best || values[i].aoi < values[*best].aoi)) best = i;
  if (!best)
    throw InfeasibleError(fmt::format("{}: no admissible N_1 on the grid", scheme_name(scheme)));
  BaselineResult r;
  r.scheme = scheme;
  r.n1_star = lo + static_cast<int>(*best);
  r.aoi = values[*best].aoi;
  r.aoi_zero_wait = values[*best].zero_wait;
  if (scheme != Scheme::FrReplace) r.gamma_star = values[*best].gamma;
  return r;
}

GridValue from_dist(const ServiceTimeDist& dist) {
  const auto w = solve_gamma(dist);
  return {w.aoi_with_wait, w.aoi_zero_wait, w.gamma_star, true};
}

}  // namespace

BaselineResult iir_aoi(int k, double beta, const AckModel& model, int n_cap, Exec exec) {
  if (n_cap < k) throw std::invalid_argument("IIR cap below k");
  if (1.0 - model.prob(n_cap) >= kTailMass)
    throw DomainError(fmt::format("IIR cap N={} leaves tail mass {} >= 1e-12", n_cap,
                                  1.0 - model.prob(n_cap)));
  const int lo = std::max(k, static_cast<int>(std::ceil(model.min_n())));
  const auto values = eval_grid(lo, n_cap, exec, [&](int n1) {
    return from_dist(iir_dist(n1, beta, model, n_cap));
  });
  return pick(Scheme::Iir, lo, values);
}

BaselineResult fr_no_replace_aoi(int k, double beta, const AckModel& model, int n_lo, int n_hi,
                                 Exec exec) {
  n_lo = std::max(n_lo, k);
  const auto values = eval_grid(n_lo, n_hi, exec, [&](int n1) {
    const auto dist = geometric_dist(n1, beta, model.prob(n1));
    return dist ? from_dist(*dist) : GridValue{};
  });
  return pick(Scheme::FrNoReplace, n_lo, values);
}

double fr_replace_value(double n1, double beta, const AckModel& model) {
  const double p = model.prob(n1);
  if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
  return (n1 + beta) * (1.0 / p + 0.5);
}

BaselineResult fr_replace_aoi(int k, double beta, const AckModel& model, int n_lo, int n_hi) {
  n_lo = std::max(n_lo, k);
  std::vector<GridValue> values;
  for (int n1 = n_lo; n1 <= n_hi; ++n1) {
    const double v = fr_replace_value(n1, beta, model);
    values.push_back({v, v, 0.0, std::isfinite(v)});
  }
  return pick(Scheme::FrReplace, n_lo, values);
}

std::pair<int, int> fr_grid(const AckModel& model) {
  const int lo = std::max(model.k(), static_cast<int>(std::ceil(model.min_n())));
  const double hi = std::min<double>(4.0 * model.k(), model.max_n());
  return {lo, static_cast<int>(std::floor(hi))};
}

}  // namespace harq
