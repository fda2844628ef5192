#pragma once

#include "harq/service_time.hpp"

namespace harq {

/// Expected epoch length E[L] and expected area E[Q] for waiting threshold
/// gamma, with the previous service time and the current one i.i.d.
struct EpochMoments {
  double length = 0.0;  // E[L]
  double area = 0.0;    // E[Q]
  double ratio() const { return area / length; }
};

struct WaitingSolution {
  double gamma_star = 0.0;
  double eta_star = 0.0;
  double aoi_with_wait = 0.0;
  double aoi_zero_wait = 0.0;
};

EpochMoments epoch_moments(const ServiceTimeDist& dist, double gamma);

/// min over gamma >= 0 of E[Q] - eta E[L], attained at gamma = max(eta - E[tau], 0).
double q_eta(const ServiceTimeDist& dist, double eta);

/// Optimal waiting threshold by bisection on q(eta) = 0 over [E[tau], rho_0].
WaitingSolution solve_gamma(const ServiceTimeDist& dist);

}  // namespace harq
