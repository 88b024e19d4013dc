#include "socchain/model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "socchain/errors.hpp"
#include "socchain/numerics.hpp"

namespace soc {

Regime parse_regime(const std::string& tag) {
  if (tag == "finite") return Regime::Finite;
  if (tag == "intermediate") return Regime::Intermediate;
  if (tag == "threshold") return Regime::Threshold;
  if (tag == "long") return Regime::Long;
  throw UnknownRegime("unknown regime tag '" + tag + "'");
}

std::string regime_name(Regime g) {
  switch (g) {
    case Regime::Finite: return "finite";
    case Regime::Intermediate: return "intermediate";
    case Regime::Threshold: return "threshold";
    case Regime::Long: return "long";
  }
  return "unknown";
}

ModelParams validate_params(long n, long r) {
  if (n < 3) throw RangeError("n must be at least 3, got " + std::to_string(n));
  if (r < 1) throw RangeError("r must be at least 1, got " + std::to_string(r));
  if (2 * r >= n)
    throw RangeError("need 2r < n, got n=" + std::to_string(n) + " r=" + std::to_string(r));
  return {n, r};
}

namespace {

// sin^2(k pi / n) for k in [0, n); sin^2 has period n in k.
std::vector<double> sin2_table(long n) {
  std::vector<double> t(n);
  for (long k = 0; k < n; ++k) {
    // Reflect into [0, n/2] so the argument stays below pi/2.
    const long kk = std::min(k, n - k);
    const double s = std::sin(kPi * static_cast<double>(kk) / static_cast<double>(n));
    t[k] = s * s;
  }
  return t;
}

double beta_direct(const std::vector<double>& table, long n, long r, long j) {
  double acc = 0.0;
  long k = 0;
  for (long m = 1; m <= r; ++m) {
    k += j;
    if (k >= n) k -= n;
    acc += table[k];
  }
  return 2.0 * acc / static_cast<double>(r);
}

Spectrum assemble(const ModelParams& p, const Eigen::VectorXd& half) {
  // half(k) = beta_{k+1} for k+1 <= n/2; mirrored so beta_j = beta_{n-j} exactly.
  const long n = p.n;
  Spectrum s;
  s.params = p;
  s.betas.resize(n - 1);
  for (long j = 1; j <= n / 2; ++j) {
    s.betas(j - 1) = half(j - 1);
    s.betas(n - j - 1) = half(j - 1);
  }
  s.alphas.resize(n);
  s.alphas.head(n - 1) = 1.0 - s.betas.array();
  s.alphas(n - 1) = 1.0;
  return s;
}

}  // namespace

Spectrum compute_spectrum(const ModelParams& p0) {
  const ModelParams p = validate_params(p0.n, p0.r);
  const auto table = sin2_table(p.n);
  Eigen::VectorXd half(p.n / 2);
  for (long j = 1; j <= p.n / 2; ++j) half(j - 1) = beta_direct(table, p.n, p.r, j);
  return assemble(p, half);
}

Spectrum compute_spectrum_fast(const ModelParams& p0) {
  const ModelParams p = validate_params(p0.n, p0.r);
  const long n = p.n, r = p.r;
  std::vector<double> table;
  Eigen::VectorXd half(n / 2);
  for (long j = 1; j <= n / 2; ++j) {
    if ((2 * r + 1) * j >= n) {
      half(j - 1) = 1.0 - alpha_closed_form(p, j);
    } else {
      if (table.empty()) table = sin2_table(n);
      half(j - 1) = beta_direct(table, n, r, j);
    }
  }
  return assemble(p, half);
}

double alpha_closed_form(const ModelParams& p, long j) {
  if (j < 1 || j > p.n) throw IndexError("j must lie in [1, n], got " + std::to_string(j));
  if (j == p.n) return 1.0;
  const long n = p.n, r = p.r;
  // Reduce (2r+1) j pi / n modulo 2 pi using integers.
  const long num = ((2 * r + 1) * j) % (2 * n);
  const double top = std::sin(kPi * static_cast<double>(num) / static_cast<double>(n));
  const double bottom = std::sin(kPi * static_cast<double>(j) / static_cast<double>(n));
  return (top / bottom - 1.0) / (2.0 * static_cast<double>(r));
}

double spectrum_residual(const Spectrum& s, long j) {
  const long n = s.n();
  if (j < 1 || j > n / 2) throw IndexError("j must lie in [1, n/2], got " + std::to_string(j));
  const double b = s.beta(j);
  if (!(b > 0.0)) throw DomainError("beta_j vanishes");
  const double r2 = 2.0 * static_cast<double>(s.params.r);
  const double nd = static_cast<double>(n), jd = static_cast<double>(j);
  return std::abs(r2 * r2 / (nd * nd * b) - 6.0 / (kPi * kPi * jd * jd));
}

}  // namespace soc
