#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "harq/ack_model.hpp"

namespace harq {

/// Cumulative blocklengths N_1 < ... < N_m of one HARQ message, plus the
/// message length k and the per-decoding processing delay beta. The last entry
/// is the terminal blocklength N_max. Entries are real while optimizing and
/// integral after rounding.
struct Schedule {
  int k = 64;
  double beta = 0.0;
  std::vector<double> n;

  int attempts() const { return static_cast<int>(n.size()); }
  double n_max() const { return n.back(); }

  /// Throws std::invalid_argument unless n is non-empty, strictly increasing
  /// and n[0] >= k.
  void validate() const;

  /// Incremental redundancy lengths: l_1 = N_1, l_f = N_f - N_{f-1}.
  std::vector<double> ir_lengths() const;
};

struct Moments {
  double m1 = 0.0;  // E[tau]
  double m2 = 0.0;  // E[tau^2]
};

/// Finite discrete distribution of the service time.
class ServiceTimeDist {
 public:
  /// support must be strictly increasing, masses nonnegative and sum to 1.
  ServiceTimeDist(std::vector<double> support, std::vector<double> mass);

  static ServiceTimeDist deterministic(double t) { return ServiceTimeDist({t}, {1.0}); }

  std::span<const double> support() const { return support_; }
  std::span<const double> mass() const { return mass_; }
  std::size_t size() const { return support_.size(); }
  double m1() const { return moments_.m1; }
  double m2() const { return moments_.m2; }
  const Moments& moments() const { return moments_; }

 private:
  std::vector<double> support_;
  std::vector<double> mass_;
  Moments moments_;
};

class NegativeMassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Service time t_f = N_f + f*beta with mass P(N_1), P(N_f) - P(N_{f-1}),
/// and the residual 1 - P(N_{m-1}) on the final attempt.
ServiceTimeDist build_dist(const Schedule& sched, const AckModel& model);

/// E[tau] and E[tau^2] directly from a schedule, without materialising the
/// distribution. Matches build_dist(...).moments().
Moments schedule_moments(const Schedule& sched, const AckModel& model);

inline Moments moments(const ServiceTimeDist& dist) { return dist.moments(); }

/// Closed-form partial derivatives of E[tau] and E[tau^2] with respect to N_f,
/// 1 <= f <= m-1 (one-based; N_m is held fixed).
Moments moment_partials(const Schedule& sched, const AckModel& model, int f);

/// Zero-wait average AoI: E[tau] + E[tau^2] / (2 E[tau]).
double rho_zero_wait(const ServiceTimeDist& dist);
double rho_zero_wait(const Moments& mom);

}  // namespace harq
