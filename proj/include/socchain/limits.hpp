#pragma once

#include <complex>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Core>

#include "socchain/model.hpp"
#include "socchain/numerics.hpp"

namespace soc {

struct LimitLaw {
  enum class Kind { Quartic, Threshold, Gaussian, IntermediateGaussian };
  Kind kind = Kind::Quartic;
  double lambda = 0.0;    // Threshold only
  double variance = 0.0;  // Gaussian kinds
  double a = 0.0;         // range exponent, r ~ n^a
  double b = 0.0;         // fluctuation exponent, S_n ~ n^b
  std::string scale;      // "n^3/4", "sqrt(n)" or "r^1/3 sqrt(n)"
};

struct ZLambdaConfig {
  double lambda = 1.0;
  long truncation_J = 10000;
  bool tail_compensation = true;
  long exact_terms = 256;  // pairs drawn exactly; the rest are moment-matched
};

double quartic_pdf(double x);
double quartic_cdf(double x);

/// Integral over t in [0,1] of 1 / (x + 1 - (1/r) sum_m cos(2 pi m t)).
double big_F(double x, long r);

/// The root sigma_r > 0 of F(1/sigma^2) = 1.
double sigma_r(long r);

/// One draw of sqrt(2) Y_0 - 3/(2 lambda^2 pi^2) sum_{0<|j|<=J} Y_j^2 / j^2.
double zlambda_sample(const ZLambdaConfig& cfg, std::mt19937_64& rng);

/// Characteristic function of Z_lambda with log-term constant c (3 or 12).
std::complex<double> zlambda_cf(double u, double lambda, double c = 3.0);

/// Density of Z_lambda by Fourier inversion; tabulated once per lambda.
double zlambda_pdf(double x, double lambda, const QuadratureControl& q = {});

/// zlambda_pdf(x^2) normalized over the real line.
double threshold_pdf(double x, double lambda);

/// Chain transform of a density on (0, inf): f(x^2) / int f(t^2) dt, with the
/// normalizer computed by adaptive quadrature.
double chain_normalizer(const std::function<double(double)>& f, double t_max);

/// The intermediate law is the same for every a in (0, 3/4); a = 1/2 is stored
/// as a representative exponent.
LimitLaw limit_for_regime(Regime g, double lambda_or_r = 1.0);

/// Density of the magnetization limit in its natural scale.
double limit_pdf(const LimitLaw& law, double x);

/// Guaranteed rectangle-rule error K/(2n) for a K-Lipschitz function on [0,1].
double rectangle_sum_bound(const Eigen::VectorXd& f_grid, double lipschitz_K, long n);

/// Left rectangle sum (1/n) sum_{k<n} f(k/n) for a grid holding f(k/n), k = 0..n.
double rectangle_sum(const Eigen::VectorXd& f_grid);

/// Sum over j >= 1 of 1/(y + j^2), by direct summation plus an Euler-Maclaurin tail.
double lorentz_sum(double y);

/// Variance (2/3)^(1/3) of the intermediate Gaussian limit.
double intermediate_variance();

/// Decay rate 3^(1/3)/2^(4/3) of the intermediate exponential limit.
double intermediate_rate();

}  // namespace soc
