#pragma once

#include <cstdint>
#include <variant>

#include "harq/sdo_optimizer.hpp"
#include "harq/service_time.hpp"

namespace harq {

/// Fixed-length codeword retransmitted with a fresh measurement after every
/// failure: the epoch lasts slot * M, M ~ Geometric(p), while the delivered
/// update is always slot old.
struct FrReplaceScheme {
  double slot = 0.0;  // N_1 + beta
  double p = 1.0;     // P_ACK(N_1)
};

/// HARQ, IIR and FR without replacement are all described by their
/// service-time distribution.
using SimScheme = std::variant<ServiceTimeDist, FrReplaceScheme>;

struct SimConfig {
  std::uint64_t epochs = 1'000'000;
  std::uint64_t seed = 1;
  double gamma = 0.0;
  int batches = 100;
};

struct SimResult {
  double aoi_estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t epochs_used = 0;
};

/// Renewal-reward Monte Carlo estimate sum(Q) / sum(L) over i.i.d. epochs with
/// W = [gamma - tau_prev]^+, L = W + tau, Q = tau_prev L + L^2 / 2. The
/// standard error comes from batch means. Batch b draws from its own stream
/// seeded with seed ^ b, so both executions are bit-identical.
SimResult simulate(const SimConfig& cfg, const SimScheme& scheme, Exec exec = Exec::Parallel);

/// Analytical long-term average AoI for the same scheme and threshold.
double analytical_aoi(const SimScheme& scheme, double gamma);

}  // namespace harq
