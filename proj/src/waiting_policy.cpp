#include "harq/waiting_policy.hpp"

#include <algorithm>

namespace harq {

EpochMoments epoch_moments(const ServiceTimeDist& dist, double gamma) {
  // W = [gamma - tau_prev]^+ depends only on the previous service time, so
  // E[(W + tau)^2] = E[W^2] + 2 E[W] E[tau] + E[tau^2].
  double ew = 0.0, ew2 = 0.0, etw = 0.0;
  const auto t = dist.support();
  const auto w = dist.mass();
  for (std::size_t i = 0; i < t.size() && t[i] < gamma; ++i) {
    const double wait = gamma - t[i];
    ew += w[i] * wait;
    ew2 += w[i] * wait * wait;
    etw += w[i] * t[i] * wait;
  }
  const double m1 = dist.m1();
  EpochMoments out;
  out.length = ew + m1;
  out.area = etw + m1 * m1 + 0.5 * (ew2 + 2.0 * ew * m1 + dist.m2());
  return out;
}

double q_eta(const ServiceTimeDist& dist, double eta) {
  const auto em = epoch_moments(dist, std::max(eta - dist.m1(), 0.0));
  return em.area - eta * em.length;
}

WaitingSolution solve_gamma(const ServiceTimeDist& dist) {
  WaitingSolution sol;
  sol.aoi_zero_wait = rho_zero_wait(dist);
  double lo = dist.m1();
  double hi = sol.aoi_zero_wait;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (q_eta(dist, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  // hi always satisfies q(hi) <= 0, so the reported AoI never exceeds rho_0.
  sol.eta_star = hi;
  sol.gamma_star = hi - dist.m1();
  sol.aoi_with_wait = hi;
  return sol;
}

}  // namespace harq
