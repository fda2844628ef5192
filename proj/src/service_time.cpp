#include "harq/service_time.hpp"

#include <cmath>

#include <fmt/core.h>

namespace harq {

void Schedule::validate() const {
  if (n.empty()) throw std::invalid_argument("schedule needs at least one blocklength");
  if (n.front() < k)
    throw std::invalid_argument(fmt::format("N_1={} is below k={}", n.front(), k));
  for (std::size_t i = 1; i < n.size(); ++i)
    if (!(n[i] > n[i - 1]))
      throw std::invalid_argument(fmt::format("blocklengths not strictly increasing at f={}", i + 1));
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
}

std::vector<double> Schedule::ir_lengths() const {
  std::vector<double> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i] = i == 0 ? n[0] : n[i] - n[i - 1];
  return out;
}

ServiceTimeDist::ServiceTimeDist(std::vector<double> support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
  if (support_.empty() || support_.size() != mass_.size())
    throw std::invalid_argument("support and mass must be non-empty and of equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (mass_[i] < 0.0) throw NegativeMassError(fmt::format("negative mass at index {}", i));
    if (i > 0 && !(support_[i] > support_[i - 1]))
      throw std::invalid_argument("support must be strictly increasing");
    total += mass_[i];
    moments_.m1 += support_[i] * mass_[i];
    moments_.m2 += support_[i] * support_[i] * mass_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument(fmt::format("masses sum to {}, not 1", total));
}

ServiceTimeDist build_dist(const Schedule& sched, const AckModel& model) {
  sched.validate();
  const auto m = sched.n.size();
  std::vector<double> support(m);
  std::vector<double> mass(m);
  double prev = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    support[i] = sched.n[i] + static_cast<double>(i + 1) * sched.beta;
    const double cur = i + 1 < m ? model.prob(sched.n[i]) : 1.0;
    mass[i] = cur - prev;
    if (mass[i] < 0.0)
      throw NegativeMassError(fmt::format("ACK model not monotone at N={}", sched.n[i]));
    prev = cur;
  }
  return ServiceTimeDist(std::move(support), std::move(mass));
}

Moments schedule_moments(const Schedule& sched, const AckModel& model) {
  Moments out;
  const auto m = sched.n.size();
  double prev = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = sched.n[i] + static_cast<double>(i + 1) * sched.beta;
    const double cur = i + 1 < m ? model.prob(sched.n[i]) : 1.0;
    const double w = cur - prev;
    out.m1 += t * w;
    out.m2 += t * t * w;
    prev = cur;
  }
  return out;
}

Moments moment_partials(const Schedule& sched, const AckModel& model, int f) {
  if (f < 1 || f >= sched.attempts())
    throw std::out_of_range(fmt::format("partial index f={} outside [1, {}]", f, sched.attempts() - 1));
  const auto i = static_cast<std::size_t>(f - 1);
  const double nf = sched.n[i];
  const double a_f = nf + f * sched.beta;
  const double a_next = sched.n[i + 1] + (f + 1) * sched.beta;
  const double dp = model.prob(nf) - (f == 1 ? 0.0 : model.prob(sched.n[i - 1]));
  const double slope = model.deriv(nf);
  return {dp + (a_f - a_next) * slope, 2.0 * a_f * dp + (a_f * a_f - a_next * a_next) * slope};
}

double rho_zero_wait(const Moments& mom) { return mom.m1 + mom.m2 / (2.0 * mom.m1); }

double rho_zero_wait(const ServiceTimeDist& dist) { return rho_zero_wait(dist.moments()); }

}  // namespace harq
