#include "harq/ack_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/core.h>

namespace harq {

double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

AckModel AckModel::gaussian_tbcc(int k, double mu, double sigma) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  AckModel m;
  m.kind_ = Kind::GaussianTbcc;
  m.k_ = k;
  m.mu_ = mu;
  m.sigma_ = sigma;
  return m;
}

AckModel AckModel::table(int k, std::vector<TablePoint> points) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (points.size() < 2) throw TableError("table model needs at least 2 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (!(pt.p >= 0.0 && pt.p <= 1.0))
      throw TableError(fmt::format("point {}: p_ack={} outside [0,1]", i + 1, pt.p));
    if (i > 0 && !(pt.n > points[i - 1].n && pt.p > points[i - 1].p))
      throw TableError(fmt::format("point {}: (N={}, p_ack={}) is not strictly increasing", i + 1,
                                   pt.n, pt.p));
  }
  AckModel m;
  m.kind_ = Kind::Table;
  m.k_ = k;
  m.points_ = std::move(points);
  return m;
}

double AckModel::min_n() const {
  if (kind_ == Kind::Table) return std::max<double>(k_, points_.front().n);
  return k_;
}

double AckModel::max_n() const {
  if (kind_ == Kind::Table) return points_.back().n;
  return std::numeric_limits<double>::infinity();
}

void AckModel::check_domain(double n) const {
  if (std::isnan(n) || n < k_) throw DomainError(fmt::format("blocklength {} below k={}", n, k_));
  if (kind_ == Kind::Table && (n < points_.front().n || n > points_.back().n))
    throw DomainError(fmt::format("blocklength {} outside table range [{}, {}]", n,
                                  points_.front().n, points_.back().n));
}

namespace {

// Index i of the segment [points[i], points[i+1]] containing n.
std::size_t segment(const std::vector<TablePoint>& pts, double n) {
  auto it = std::upper_bound(pts.begin(), pts.end(), n,
                             [](double v, const TablePoint& p) { return v < p.n; });
  auto idx = static_cast<std::size_t>(it - pts.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, pts.size() - 2);
}

}  // namespace

double AckModel::prob(double n) const {
  check_domain(n);
  if (kind_ == Kind::GaussianTbcc) {
    if (std::isinf(n)) return 1.0;
    return gaussian_tail((k_ / n - mu_) / sigma_);
  }
  const auto i = segment(points_, n);
  const auto& a = points_[i];
  const auto& b = points_[i + 1];
  return a.p + (b.p - a.p) * (n - a.n) / (b.n - a.n);
}

double AckModel::deriv(double n) const {
  check_domain(n);
  if (kind_ == Kind::GaussianTbcc) {
    if (std::isinf(n)) return 0.0;
    const double z = (k_ / n - mu_) / sigma_;
    const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return density * k_ / (sigma_ * n * n);
  }
  const auto i = segment(points_, n);
  const auto& a = points_[i];
  const auto& b = points_[i + 1];
  return (b.p - a.p) / (b.n - a.n);
}

std::string AckModel::describe() const {
  if (kind_ == Kind::GaussianTbcc) return fmt::format("gaussian-tbcc(mu={}, sigma={})", mu_, sigma_);
  return fmt::format("table({} points)", points_.size());
}

AckModel load_table_model(const std::filesystem::path& path, int k) {
  std::ifstream in(path);
  if (!in) throw TableError(fmt::format("cannot open table model '{}'", path.string()));

  std::string line;
  if (!std::getline(in, line)) throw TableError("table model is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "N,p_ack")
    throw TableError(fmt::format("bad header '{}', expected 'N,p_ack'", line));

  std::vector<TablePoint> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    TablePoint pt{};
    char comma = 0;
    if (!(row >> pt.n >> comma >> pt.p) || comma != ',' || !(row >> std::ws).eof())
      throw TableError(fmt::format("line {}: cannot parse '{}'", lineno, line));
    if (!pts.empty() && !(pt.n > pts.back().n && pt.p > pts.back().p))
      throw TableError(fmt::format("line {}: monotonicity violation (N={}, p_ack={})", lineno,
                                   pt.n, pt.p));
    pts.push_back(pt);
  }
  return AckModel::table(k, std::move(pts));
}

AckModel resolve_model(const std::string& name, int k) {
  if (name == "gaussian-tbcc") return AckModel::gaussian_tbcc(k);
  constexpr std::string_view prefix = "table:";
  if (name.starts_with(prefix)) return load_table_model(name.substr(prefix.size()), k);
  throw std::invalid_argument(fmt::format("unknown model '{}'", name));
}

}  // namespace harq
