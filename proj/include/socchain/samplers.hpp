#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "socchain/density.hpp"
#include "socchain/model.hpp"

namespace soc {

using Rng = std::mt19937_64;

struct WeightedSample {
  double value = 0.0;
  double weight = 1.0;
};

/// One tilted draw of A_n. log_weight is the exact log density ratio
/// sum_j 1/2 log(beta_j / c_j) + kappa A with c_j = beta_j + 2 kappa.
struct AuxDraw {
  double A = 0.0;
  double log_weight = 0.0;
  bool accepted = false;
};

/// Precomputed per-spectrum quantities shared by the A_n samplers.
class AuxSampler {
 public:
  AuxSampler(const Spectrum& s, const TiltPlan& plan = {});

  AuxDraw draw(Rng& rng) const;
  double kappa() const { return kappa_; }
  double log_normalizer() const { return log_norm_; }
  long n() const { return n_; }

 private:
  long n_ = 0;
  double kappa_ = 0.0, log_norm_ = 0.0;
  std::vector<double> pair_scale_;  // 2 / c_j for the pairs (j, n-j)
  double middle_scale_ = 0.0;       // 1 / c_{n/2} when n is even
};

/// A_n = sum Z_j^2 with Z_j ~ N(0, 1/beta_j); accepted = (A < n).
std::pair<double, bool> sample_aux(const Spectrum& s, Rng& rng);

/// Tilted draw of A_n with value = A and weight = exp(kappa (A - n)).
WeightedSample sample_aux_tilted(const Spectrum& s, const TiltPlan& plan, Rng& rng);

/// T_n = (sum of n squared standard normals) / n, drawn as Gamma(n/2, 2) / n.
double sample_tn(long n, Rng& rng);

/// Draw of S_n / sqrt(T_n): value = +-sqrt(n (n - A)), weight =
/// exp(kappa (A - n)) / sqrt(n (n - A)). Empty when A >= n. The sign comes
/// from sign_rng so the A stream is unaffected by symmetrization.
std::optional<WeightedSample> sample_self_normalized(const AuxSampler& aux, Rng& rng, Rng& sign_rng);

/// Self-normalized draw times sqrt(T_n) with T_n drawn from tn_rng.
std::optional<WeightedSample> sample_magnetization(const AuxSampler& aux, Rng& rng, Rng& sign_rng,
                                                   Rng& tn_rng);

/// Independent substreams for batch b of a run seeded by master.
struct BatchStreams {
  Rng a, sign, tn;
  BatchStreams(std::uint64_t master, std::uint64_t batch);
};

/// Worker count: SOCCHAIN_THREADS if set, else hardware concurrency.
int worker_count();

/// Calls body(i) for i in [0, count) on worker_count() threads. Callers write
/// results into slot i so the merged output does not depend on scheduling.
void parallel_for(long count, const std::function<void(long)>& body);

inline constexpr long kBatchSize = 4096;

enum class SampleKind { SelfNormalized, Magnetization, Aux };

struct SampleRun {
  std::vector<WeightedSample> samples;  // accepted draws only
  long proposals = 0;
  double log_acceptance = 0.0;          // log P(A_n < n) estimate
};

/// Draws `proposals` tilted proposals in fixed-size batches. Aux yields
/// value = n - A with the tilt weight.
SampleRun sample_many(const Spectrum& s, const TiltPlan& plan, long proposals, std::uint64_t seed,
                      SampleKind kind);

/// Rows j < n/2: sqrt(2/n) cos(2 pi j k/n); rows n - j: sqrt(2/n) sin(2 pi j k/n);
/// row n/2 (n even): (-1)^k / sqrt(n); row n: 1/sqrt(n). Row j pairs with alpha_j.
Eigen::MatrixXd fourier_basis(long n);

struct SpinConfig {
  Eigen::VectorXd x;
  Eigen::VectorXd nbr;  // sum_{d=1..r} (x_{i+d} + x_{i-d})
  double S = 0.0;
  double Q = 0.0;
  double H = 0.0;

  static SpinConfig from(const Eigen::VectorXd& x, const ModelParams& p);
  /// Recomputes every cache from x.
  void refresh(const ModelParams& p);
  /// Sets x_i (0-based) to v, updating all caches in O(r).
  void update(const ModelParams& p, long i, double v);
};

/// -(1/(2r)) sum_i sum_{d=1..r} x_i x_{i+d}, periodic.
double hamiltonian(const Eigen::VectorXd& x, const ModelParams& p);
double hamiltonian(const SpinConfig& c, const ModelParams& p);

/// H(after) - H(before) for x_i -> v, with i 1-based.
double delta_hamiltonian(const SpinConfig& c, const ModelParams& p, long i, double v);

/// log of the unnormalized target: -H/T - Q/2 with T = Q/n.
double log_target(double H, double Q, long n);

/// Metropolis acceptance probability min(1, exp(log_b - log_a)).
double metropolis_accept(double log_a, double log_b);

struct McmcOptions {
  long burn_in_sweeps = 100000;
  long thin = 1;  // sweeps between recorded states
  double proposal_scale = 1.0;
  bool adapt = true;
  long refresh_every = 1000;  // sweeps between cache recomputations
};

struct McmcTrace {
  std::vector<double> S, T, H;
  double acceptance = 0.0;
  double proposal_scale = 0.0;
};

/// Random-scan single-site Metropolis; `steps` recorded states.
McmcTrace mcmc_run(const ModelParams& p, long steps, const McmcOptions& opt, Rng& rng);

}  // namespace soc
