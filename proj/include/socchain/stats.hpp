#pragma once

#include <functional>
#include <vector>

#include "socchain/samplers.hpp"

namespace soc {

/// Right-continuous self-normalized step function.
class WeightedEcdf {
 public:
  explicit WeightedEcdf(std::vector<WeightedSample> samples);

  double operator()(double x) const;
  std::size_t jumps() const { return x_.size(); }
  double jump_at(std::size_t k) const { return x_[k]; }
  /// F just after jump k and just before it.
  double after(std::size_t k) const { return F_[k]; }
  double before(std::size_t k) const { return k == 0 ? 0.0 : F_[k - 1]; }

 private:
  std::vector<double> x_, F_;
};

WeightedEcdf weighted_ecdf(const std::vector<WeightedSample>& samples);

/// sup |F_hat - cdf| over both sides of every jump.
double ks_distance(const WeightedEcdf& ecdf, const std::function<double(double)>& cdf);

/// sup |F1 - F2| over the union of jump points.
double ks_two_sample(const WeightedEcdf& a, const WeightedEcdf& b);

struct WeightedMoments {
  double mean = 0.0;
  double var = 0.0;
  double ess = 0.0;   // (sum w)^2 / sum w^2
  double mean_se = 0.0;
};

WeightedMoments weighted_moments(const std::vector<WeightedSample>& samples);

/// Self-normalized mean of f with its delta-method standard error.
std::pair<double, double> weighted_mean_se(const std::vector<WeightedSample>& samples,
                                           const std::function<double(double)>& f);

/// Effective sample size of a correlated series by initial positive
/// sequence of autocorrelations.
double effective_sample_size(const std::vector<double>& series);

/// Ordinary least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace soc
