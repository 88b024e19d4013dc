#pragma once

#include <Eigen/Core>

#include <string>

namespace soc {

enum class Regime { Finite, Intermediate, Threshold, Long };

/// Accepts finite, intermediate, threshold, long; throws UnknownRegime.
Regime parse_regime(const std::string& tag);
std::string regime_name(Regime g);

struct ModelParams {
  long n = 0;
  long r = 0;
};

/// Eigenvalues of the circulant interaction form. Index k holds alpha_{k+1}
/// (resp. beta_{k+1}); alphas has n entries, betas has n-1.
struct Spectrum {
  ModelParams params;
  Eigen::VectorXd alphas;
  Eigen::VectorXd betas;

  long n() const { return params.n; }
  double alpha(long j) const { return alphas(j - 1); }
  double beta(long j) const { return betas(j - 1); }
  double min_beta() const { return betas.minCoeff(); }
};

/// Throws RangeError unless n >= 3, r >= 1 and 2r < n.
ModelParams validate_params(long n, long r);

/// Direct O(n r) build from a sin^2 table with exact angle reduction.
Spectrum compute_spectrum(const ModelParams& p);

/// O(n) build: Dirichlet-kernel closed form where it is well conditioned,
/// direct sums near the low modes. Agrees with compute_spectrum to ~1e-12.
Spectrum compute_spectrum_fast(const ModelParams& p);

/// alpha_j in O(1); j = n returns 1. Throws IndexError for j outside [1, n].
double alpha_closed_form(const ModelParams& p, long j);

/// |(2r)^2 / (n^2 beta_j) - 6 / (pi^2 j^2)| for 1 <= j <= n/2.
double spectrum_residual(const Spectrum& s, long j);

}  // namespace soc
