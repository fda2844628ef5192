#include "harq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "harq/waiting_policy.hpp"

namespace harq {

namespace {

// Uniform on [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// SplitMix64 finaliser. Batch streams come from mix(seed) ^ batch so that
// nearby user seeds do not share streams.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Sampler {
 public:
  explicit Sampler(const ServiceTimeDist& dist) : support_(dist.support().begin(), dist.support().end()) {
    double acc = 0.0;
    for (double w : dist.mass()) {
      acc += w;
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }

  double draw(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    return support_[idx];
  }

 private:
  std::vector<double> support_;
  std::vector<double> cdf_;
};

struct BatchSums {
  double area = 0.0;
  double length = 0.0;
};

BatchSums run_batch(const SimScheme& scheme, const std::vector<Sampler>& sampler, double gamma,
                    std::uint64_t seed, std::uint64_t epochs) {
  std::mt19937_64 rng(seed);
  BatchSums s;
  if (const auto* fr = std::get_if<FrReplaceScheme>(&scheme)) {
    const double log_q = std::log1p(-fr->p);
    for (std::uint64_t i = 0; i < epochs; ++i) {
      double trials = 1.0;
      if (fr->p < 1.0) {
        const double u = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        trials += std::floor(std::log(u) / log_q);
      }
      const double wait = std::max(gamma - fr->slot, 0.0);
      const double len = wait + fr->slot * trials;
      s.area += fr->slot * len + 0.5 * len * len;
      s.length += len;
    }
    return s;
  }
  const Sampler& draw = sampler.front();
  double prev = draw.draw(rng);
  for (std::uint64_t i = 0; i < epochs; ++i) {
    const double tau = draw.draw(rng);
    const double len = std::max(gamma - prev, 0.0) + tau;
    s.area += prev * len + 0.5 * len * len;
    s.length += len;
    prev = tau;
  }
  return s;
}

}  // namespace

SimResult simulate(const SimConfig& cfg, const SimScheme& scheme, Exec exec) {
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (cfg.batches < 1) throw std::invalid_argument("batches must be >= 1");
  if (cfg.gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");

  std::vector<Sampler> sampler;
  if (const auto* dist = std::get_if<ServiceTimeDist>(&scheme)) sampler.emplace_back(*dist);

  const auto batches = static_cast<std::uint64_t>(
      std::min<std::uint64_t>(cfg.epochs, static_cast<std::uint64_t>(cfg.batches)));
  const std::uint64_t base = cfg.epochs / batches;
  const std::uint64_t extra = cfg.epochs % batches;
  std::vector<BatchSums> sums(batches);
  const auto count = static_cast<long>(batches);
  const std::uint64_t mixed = mix(cfg.seed);
  const auto body = [&](long b) {
    const auto ub = static_cast<std::uint64_t>(b);
    sums[b] = run_batch(scheme, sampler, cfg.gamma, mixed ^ ub, base + (ub < extra ? 1 : 0));
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long b = 0; b < count; ++b) body(b);
  } else {
    for (long b = 0; b < count; ++b) body(b);
  }

  double area = 0.0, length = 0.0;
  for (const auto& s : sums) {
    area += s.area;
    length += s.length;
  }
  SimResult out;
  out.aoi_estimate = area / length;
  out.epochs_used = cfg.epochs;
  if (batches >= 2) {
    double mean = 0.0;
    for (const auto& s : sums) mean += s.area / s.length;
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (const auto& s : sums) {
      const double d = s.area / s.length - mean;
      var += d * d;
    }
    var /= static_cast<double>(batches - 1);
    out.std_error = std::sqrt(var / static_cast<double>(batches));
  }
  return out;
}

double analytical_aoi(const SimScheme& scheme, double gamma) {
  if (const auto* fr = std::get_if<FrReplaceScheme>(&scheme)) {
    // E[L] = W + slot/p, E[L^2] with L = W + slot M.
    const double w = std::max(gamma - fr->slot, 0.0);
    const double em = 1.0 / fr->p;
    const double em2 = (2.0 - fr->p) / (fr->p * fr->p);
    const double el = w + fr->slot * em;
    const double el2 = w * w + 2.0 * w * fr->slot * em + fr->slot * fr->slot * em2;
    return (fr->slot * el + 0.5 * el2) / el;
  }
  return epoch_moments(std::get<ServiceTimeDist>(scheme), gamma).ratio();
}

}  // namespace harq
