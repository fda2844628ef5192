#pragma once

#include <optional>
#include <string_view>

#include "harq/ack_model.hpp"
#include "harq/sdo_optimizer.hpp"
#include "harq/service_time.hpp"

namespace harq {

enum class Scheme { Iir, FrNoReplace, FrReplace };

std::string_view scheme_name(Scheme s);

struct BaselineResult {
  Scheme scheme = Scheme::Iir;
  int n1_star = 0;
  std::optional<double> gamma_star;
  double aoi = 0.0;
  /// Zero-wait AoI at the same N_1 (equal to aoi for FR with replacement).
  double aoi_zero_wait = 0.0;
};

/// Tail mass below which geometric and IIR service times are cut off.
inline constexpr double kTailMass = 1e-12;

/// Smallest integer N >= k with 1 - P_ACK(N) < kTailMass.
int iir_cap(const AckModel& model);

/// Service time of IIR started at n1: one bit per attempt up to n_cap, where
/// the residual mass sits.
ServiceTimeDist iir_dist(int n1, double beta, const AckModel& model, int n_cap);

/// (n1 + beta) * M with M ~ Geometric(p), truncated once the tail mass drops
/// below kTailMass and renormalised. Nothing when p == 0 or the truncated
/// support would exceed max_terms.
std::optional<ServiceTimeDist> geometric_dist(double n1, double beta, double p,
                                              std::size_t max_terms = 200000);

/// Jointly optimal N_1 and waiting threshold for IIR over N_1 in [k, n_cap].
BaselineResult iir_aoi(int k, double beta, const AckModel& model, int n_cap,
                       Exec exec = Exec::Parallel);

/// Jointly optimal N_1 and waiting threshold for FR without replacement over
/// N_1 in [n_lo, n_hi].
BaselineResult fr_no_replace_aoi(int k, double beta, const AckModel& model, int n_lo, int n_hi,
                                 Exec exec = Exec::Parallel);

/// (n1 + beta) * (1 / P_ACK(n1) + 1/2), zero-wait.
double fr_replace_value(double n1, double beta, const AckModel& model);

BaselineResult fr_replace_aoi(int k, double beta, const AckModel& model, int n_lo, int n_hi);

/// Default FR grid [k, 4k], clipped to the model's domain.
std::pair<int, int> fr_grid(const AckModel& model);

}  // namespace harq
