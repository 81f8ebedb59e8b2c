#include "rrt_mppi/sample_size.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rrt_mppi::sample_size {

namespace {

// Ceiling that absorbs floating-point noise around exactly integral bounds
// (e.g. 4 / 0.001 evaluating to 3999.9999999999995).
std::uint64_t ceil_count(double x) {
  if (!(x > 0.0)) return 0;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(const Discrete& d, const char* name) {
  double total = 0.0;
  for (const auto& [value, p] : d) {
    if (!(p >= 0.0)) throw std::invalid_argument(std::string(name) + ": negative probability");
    total += p;
  }
  if (d.empty() || std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(name) + ": probabilities must sum to 1");
  Moments m;
  for (const auto& [value, p] : d) m.mean += p * value;
  for (const auto& [value, p] : d) m.variance += p * (value - m.mean) * (value - m.mean);
  return m;
}

}  // namespace

std::uint64_t k1(double eps1, double rho1) {
  if (!(eps1 > 0.0)) throw std::invalid_argument("k1: eps1 must be positive");
  if (!(rho1 > 0.0)) throw std::invalid_argument("k1: rho1 must be positive");
  if (rho1 >= 2.0) return 0;
  return ceil_count(-std::log(rho1 / 2.0) / (eps1 * eps1));
}

double gamma(std::span<const double> mean_u, std::span<const double> var_u) {
  if (mean_u.size() != var_u.size() || mean_u.empty())
    throw std::invalid_argument("gamma: mean_u and var_u must have the same nonzero length");
  double g = 0.0;
  for (std::size_t c = 0; c < mean_u.size(); ++c) {
    if (!(var_u[c] >= 0.0)) throw std::invalid_argument("gamma: variance must be nonnegative");
    g += 2.0 * (var_u[c] + mean_u[c] * mean_u[c]);
  }
  return g;
}

std::uint64_t k2(const Inputs& in) {
  if (!(in.eps1 > 0.0) || !(in.eps2 > 0.0)) throw std::invalid_argument("k2: error bounds must be positive");
  if (!(in.rho2 > 0.0 && in.rho2 <= 1.0)) throw std::invalid_argument("k2: rho2 must lie in (0, 1]");
  if (!(in.eps1 < in.e1_hat))
    throw AssumptionViolation("k2: eps1 must be smaller than E1_hat (got eps1=" + std::to_string(in.eps1) +
                              ", E1_hat=" + std::to_string(in.e1_hat) + ")");
  if (!(in.e1_hat <= 1.0)) throw std::invalid_argument("k2: e1_hat must lie in (0, 1]");
  const double g = gamma(in.mean_u, in.var_u);
  const double gap = in.e1_hat - in.eps1;
  return ceil_count(g / (in.rho2 * in.eps2 * in.eps2) / (gap * gap));
}

std::uint64_t required_sample_size(const Inputs& in) { return std::max(k1(in.eps1, in.rho1), k2(in)); }

double estimate_e1(std::span<const double> costs, double lambda) {
  if (costs.empty()) throw std::invalid_argument("estimate_e1: empty cost list");
  if (!(lambda > 0.0)) throw std::invalid_argument("estimate_e1: lambda must be positive");
  double sum = 0.0;
  for (double s : costs) sum += std::exp(-s / lambda);
  return sum / static_cast<double>(costs.size());
}

ProductVarianceTerms product_variance_terms(const Discrete& x, const Discrete& y) {
  const Moments mx = moments(x, "X");
  const Moments my = moments(y, "Y");
  double mean_xy = 0.0;
  for (const auto& [xv, xp] : x)
    for (const auto& [yv, yp] : y) mean_xy += xp * yp * xv * yv;
  double var_xy = 0.0;
  for (const auto& [xv, xp] : x)
    for (const auto& [yv, yp] : y) var_xy += xp * yp * (xv * yv - mean_xy) * (xv * yv - mean_xy);

  ProductVarianceTerms t;
  t.var_xy = var_xy;
  t.var_x = mx.variance;
  t.var_y = my.variance;
  t.mean_x = mx.mean;
  t.mean_y = my.mean;
  t.bound = 2.0 * mx.variance * my.variance + 2.0 * my.variance * mx.mean * mx.mean;
  return t;
}

bool verify_product_variance_bound(const Discrete& x, const Discrete& y) { return product_variance_terms(x, y).slack() >= -1e-12; }

bool WeightMomentChain::holds(double tol) const {
  return variance <= (1.0 - mean) * mean + tol && (1.0 - mean) * mean <= mean + tol && mean <= 1.0 + tol;
}

WeightMomentChain weight_moment_chain(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("weight_moment_chain: empty weight sample");
  WeightMomentChain c;
  for (double w : weights) c.mean += w;
  c.mean /= static_cast<double>(weights.size());
  for (double w : weights) c.variance += (w - c.mean) * (w - c.mean);
  c.variance /= static_cast<double>(weights.size());
  return c;
}

}  // namespace rrt_mppi::sample_size
