#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace harq {

/// Thrown when a blocklength falls outside the domain of an ACK model.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a tabulated ACK model cannot be read or is malformed.
class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TablePoint {
  double n;
  double p;
};

/// Probability of a positive acknowledgement as a function of the cumulative
/// blocklength N (bits), together with its derivative in N.
///
/// Two kinds are supported:
///  - GaussianTbcc: P(N) = Q((k/N - mu) / sigma), the Gaussian fit of a
///    tail-biting convolutional code at 2 dB. Valid for any real N >= k.
///  - Table: piecewise-linear interpolation of user-supplied (N, p) points.
///
/// Instances are immutable once constructed.
class AckModel {
 public:
  enum class Kind { GaussianTbcc, Table };

  static constexpr double kDefaultMu = 0.5666;
  static constexpr double kDefaultSigma = 0.0573;

  static AckModel gaussian_tbcc(int k, double mu = kDefaultMu, double sigma = kDefaultSigma);
  /// Points must be strictly increasing in both n and p, with p in [0, 1].
  static AckModel table(int k, std::vector<TablePoint> points);

  Kind kind() const { return kind_; }
  int k() const { return k_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  const std::vector<TablePoint>& points() const { return points_; }

  /// Smallest and largest blocklength accepted by prob()/deriv().
  double min_n() const;
  double max_n() const;

  double prob(double n) const;
  double deriv(double n) const;

  std::string describe() const;

 private:
  AckModel() = default;
  void check_domain(double n) const;

  Kind kind_ = Kind::GaussianTbcc;
  int k_ = 0;
  double mu_ = kDefaultMu;
  double sigma_ = kDefaultSigma;
  std::vector<TablePoint> points_;
};

inline double ack_prob(const AckModel& model, double n) { return model.prob(n); }
inline double ack_prob_deriv(const AckModel& model, double n) { return model.deriv(n); }

/// Reads a CSV with header `N,p_ack`. Rows must be strictly increasing in both
/// columns; the error message names the offending line.
AckModel load_table_model(const std::filesystem::path& path, int k);

/// Resolves a `--model` flag value: `gaussian-tbcc` or `table:<path>`.
AckModel resolve_model(const std::string& name, int k);

/// Upper Gaussian tail Q(x) = P(Z > x).
double gaussian_tail(double x);

}  // namespace harq
