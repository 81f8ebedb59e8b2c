#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rrt_mppi::sample_size {

/// Inputs of the Hoeffding / Chebyshev sample-size bounds. mean_u and var_u
/// hold one entry per control channel.
struct Inputs {
  double eps1 = 0.02;
  double eps2 = 0.1;
  double rho1 = 0.05;
  double rho2 = 0.1;
  std::vector<double> mean_u{1.0};
  std::vector<double> var_u{1.0};
  double e1_hat = 0.5;
};

/// eps1 >= E1_hat: the denominator (E1_hat - eps1) of K2 is not positive.
class AssumptionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Hoeffding count ceil(-ln(rho1 / 2) / eps1^2); 0 when rho1 >= 2.
std::uint64_t k1(double eps1, double rho1);

/// Gamma = sum over channels of 2 (Var + E^2).
double gamma(std::span<const double> mean_u, std::span<const double> var_u);

/// Chebyshev count ceil(Gamma / (rho2 eps2^2) / (E1_hat - eps1)^2).
std::uint64_t k2(const Inputs& in);

/// max(k1, k2).
std::uint64_t required_sample_size(const Inputs& in);

/// Sample mean of exp(-S / lambda), normalized by the number of costs.
double estimate_e1(std::span<const double> costs, double lambda);

/// Finite discrete distribution as (value, probability) pairs.
using Discrete = std::vector<std::pair<double, double>>;

struct ProductVarianceTerms {
  double var_xy = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double bound = 0.0;  // 2 Var[X] Var[Y] + 2 Var[Y] E[X]^2
  double slack() const { return bound - var_xy; }
};

/// Exact moments over the product support of independent X and Y.
/// Throws std::invalid_argument when a probability list does not sum to 1
/// within 1e-9 or has a negative entry.
ProductVarianceTerms product_variance_terms(const Discrete& x, const Discrete& y);

/// Var[XY] <= 2 Var[X] Var[Y] + 2 Var[Y] E[X]^2 + 1e-12 for independent X, Y.
bool verify_product_variance_bound(const Discrete& x, const Discrete& y);

struct WeightMomentChain {
  double mean = 0.0;
  double variance = 0.0;  // population variance of the sample
  bool holds(double tol = 1e-12) const;
};

/// Moments of a weight sample treated as an empirical distribution.
WeightMomentChain weight_moment_chain(std::span<const double> weights);

}  // namespace rrt_mppi::sample_size
