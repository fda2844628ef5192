#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "harq/ack_model.hpp"
#include "harq/service_time.hpp"

namespace harq {

enum class Exec { Serial, Parallel };

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BranchExplosionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonBracketingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SdoConfig {
  int k = 64;
  double beta = 0.0;
  double n_max = 192.0;
  /// Step of the grid over the first swept blocklength.
  double n1_step = 1.0;
  /// Bisection stops once the lambda bracket is narrower than this and the
  /// root residual is small.
  double lambda_tol = 1e-4;
  /// Cap on concurrently tracked solution sequences.
  int max_seq = 64;
  /// Keep only sequences with exactly this many transmissions.
  std::optional<int> fixed_m;
  /// Pin N_1 and sweep N_2 instead; the first free stationarity condition is
  /// then the one for N_2. Produces the per-N_1 optimum rho_0*(N_1).
  std::optional<double> pinned_n1;

  void validate() const;
};

/// Zero, one or two real candidates for the next cumulative blocklength.
struct Roots {
  std::array<double, 2> value{};
  int count = 0;

  const double* begin() const { return value.data(); }
  const double* end() const { return value.data() + count; }
};

/// One step of the sequential recursion. Given N_{f-1} (absent for f = 1),
/// N_f and lambda, returns the real roots N_{f+1} of the stationarity
/// condition of (1 - lambda) E[tau] + E[tau^2] / 2 with respect to N_f.
/// Larger root first. Empty when the discriminant is negative.
Roots next_blocklength(std::optional<double> prev2, double prev, int f, double lambda,
                       double beta, const AckModel& model);

/// (1 - lambda) E[tau] + E[tau^2] / 2.
double auxiliary_objective(const Moments& mom, double lambda);

struct SequenceResult {
  Schedule schedule;
  Moments moments;
  double objective = 0.0;
};

/// Expands all root branches from a fixed prefix (N_1, or N_1 and N_2) until
/// each branch reaches n_max, rejecting non-increasing branches and branches
/// with no real root. Returns the completed sequence with the smallest
/// auxiliary objective, or nothing when every branch is rejected.
std::optional<SequenceResult> solve_sequence_from(const std::vector<double>& prefix, double lambda,
                                                  const SdoConfig& cfg, const AckModel& model);

std::optional<SequenceResult> solve_sequence(double n1, double lambda, const SdoConfig& cfg,
                                             const AckModel& model);

struct PLambda {
  double lambda = 0.0;
  double p = 0.0;
  SequenceResult best;
};

/// p(lambda): minimum of the auxiliary objective over the swept start
/// blocklength. Ties go to the smallest start value. Both executions give
/// identical results.
PLambda p_lambda(double lambda, const SdoConfig& cfg, const AckModel& model,
                 Exec exec = Exec::Parallel);

struct TracePoint {
  double n1 = 0.0;
  double rho = 0.0;
  int attempts = 0;
};

struct SdoSolution {
  /// Integer schedule after simultaneous rounding.
  Schedule schedule;
  /// Real-valued schedule straight out of the recursion.
  Schedule real_schedule;
  double lambda_star = 0.0;
  double p_of_lambda = 0.0;
  /// p(lambda*) + lambda*.
  double rho_star = 0.0;
  /// Zero-wait AoI of the real and rounded schedules.
  double rho_real = 0.0;
  double rho_rounded = 0.0;
  double n1_star = 0.0;
  /// |p(lambda*) - E[tau_lambda*]| at the reported lambda*.
  double root_residual = 0.0;
  int bisection_steps = 0;
  /// (start blocklength, rho_0 of its sequence) at lambda*, rejected starts omitted.
  std::vector<TracePoint> objective_trace;
};

/// Finds lambda* with p(lambda*) = E[tau_lambda*] by bisection on
/// [0, lambda_max], lambda_max found by doubling from 1 until p < 0.
SdoSolution solve(const SdoConfig& cfg, const AckModel& model, Exec exec = Exec::Parallel);

/// Rounds every entry to the nearest integer at once, bumps collisions up by
/// one and pins the last entry to n_max.
Schedule round_schedule(const Schedule& sched, double n_max);

struct CurvePoint {
  double n1 = 0.0;
  double lambda_star = 0.0;
  double rho = 0.0;          // p(lambda*) + lambda*
  double rho_real = 0.0;     // rho_0 of the real-valued schedule
  Schedule schedule;         // real-valued
  bool feasible = false;
};

/// rho_0*(N_1) for N_1 in {k, k + step, ..., n_max}: the pinned-N_1 solve at
/// every grid point. Infeasible points are kept with feasible = false.
std::vector<CurvePoint> rho_n1_curve(const SdoConfig& cfg, const AckModel& model,
                                     Exec exec = Exec::Parallel);

struct FixedMChoice {
  double threshold_n1 = 0.0;  // smallest N_1 from which the curve never needs more than m
  CurvePoint choice;
};

/// Reads a fixed transmission count off the per-N_1 curve: the smallest N_1
/// beyond the unconstrained optimum after which every point uses at most m
/// transmissions, then the lowest-AoI point with exactly m from there on.
std::optional<FixedMChoice> select_fixed_m(const std::vector<CurvePoint>& curve, int m);

/// Index of the feasible curve point with the smallest rho.
std::optional<std::size_t> curve_argmin(const std::vector<CurvePoint>& curve);

}  // namespace harq
