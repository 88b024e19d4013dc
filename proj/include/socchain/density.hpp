#pragma once

#include <complex>
#include <vector>

#include "socchain/model.hpp"
#include "socchain/numerics.hpp"

namespace soc {

/// Contour shift u_star and scale w of the auxiliary variable (n - A_n) / w.
/// The shift in the unscaled variable is kappa = u_star / w.
struct TiltPlan {
  double u_star = 0.0;
  double w = 1.0;

  double kappa() const { return u_star / w; }
};

/// Throws DomainError unless u_star >= 0 and w >= 1.
void validate_plan(const TiltPlan& plan);

TiltPlan default_tilt(const ModelParams& p, Regime g);

/// Modulus majorant [1 + v^2/(1 + u_star)^2]^(-3/4) for the shifted integrand,
/// v being the unscaled frequency.
double domination_bound(const TiltPlan& plan, double v);

/// Cached Fourier inversion of n - A_n along the shifted contour Im u = -kappa.
/// With G(v) = exp(phi(v - i kappa) - phi0), phi0 = phi(-i kappa) real, the
/// density of X = n - A_n is f(x) = exp(phi0 - kappa x) g(x) where
/// g(x) = (1/pi) Re int_0^inf G(v) exp(-i v x) dv is what the grid stores.
class InversionGrid {
 public:
  InversionGrid(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q);

  double log_scale() const { return phi0_; }
  double kappa() const { return kappa_; }
  double v_max() const { return v_max_; }
  long n() const { return n_; }
  double tilted_mean() const { return mean_; }
  double tilted_sd() const { return sd_; }

  /// g(x) above; may be slightly negative from quadrature noise.
  double scaled_density(double x) const;

  /// e^{-phi0} P(A_n < n).
  double scaled_tail() const { return tail_; }

  /// log P(A_n < n).
  double log_tail() const;

  /// Largest |G(v)| / domination_bound(v) over the cached nodes.
  double max_domination_ratio(const TiltPlan& plan) const;

  std::size_t nodes() const { return v_.size(); }

 private:
  long n_ = 0;
  double kappa_ = 0.0, phi0_ = 0.0, v_max_ = 0.0, mean_ = 0.0, sd_ = 0.0, tail_ = 0.0;
  std::vector<double> v_, wt_;
  std::vector<std::complex<double>> g_;
};

/// Density of (n - A_n)/w on {A_n < n}, normalized to integrate to one.
class ConditionalDensity {
 public:
  ConditionalDensity(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q = {});

  double operator()(double y) const;
  double log_tail() const { return grid_.log_tail(); }
  double y_max() const { return static_cast<double>(grid_.n()) / w_; }
  /// Upper end of the effective support (mass beyond is negligible).
  double y_support() const;
  const InversionGrid& grid() const { return grid_; }

 private:
  InversionGrid grid_;
  double w_ = 1.0;
};

struct DensityGrid {
  std::vector<double> x, density, normalized;
  long clamped = 0;      // values below zero set to zero
  long significant = 0;  // of which below -abs_tol
};

/// Density of n - A_n at x by untilted Fourier inversion.
double aux_density(const Spectrum& s, double x, const QuadratureControl& q = {});

/// P(A_n < n) along the contour selected by plan.
double tail_probability(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q = {});
double log_tail_probability(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q = {});

/// Unnormalized density of (n - A_n)/w at x in (0, n/w) on {A_n < n}.
double conditional_density_shifted(const Spectrum& s, const TiltPlan& plan, double x,
                                   const QuadratureControl& q = {});

/// Conditional density on a grid with clamp accounting. Throws
/// ConvergenceError if more than 0.1% of points are significantly negative.
DensityGrid conditional_density_grid(const Spectrum& s, const TiltPlan& plan,
                                     const std::vector<double>& xs, const QuadratureControl& q = {});

}  // namespace soc
