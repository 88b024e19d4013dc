#include "socchain/limits.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "socchain/charfn.hpp"
#include "socchain/errors.hpp"

namespace soc {

double quartic_pdf(double x) {
  static const double c = std::sqrt(2.0) / std::tgamma(0.25);
  return c * std::exp(-0.25 * x * x * x * x);
}

double quartic_cdf(double x) {
  const double ax = std::min(std::abs(x), 8.0);
  if (ax == 0.0) return 0.5;
  AdaptiveOptions opt;
  opt.abs_tol = 1e-14;
  const double half = integrate_adaptive([](double t) { return quartic_pdf(t); }, 0.0, ax, opt).value;
  return x > 0 ? 0.5 + half : 0.5 - half;
}

namespace {

// 1 - (1/r) sum_m cos(2 pi m t), stable near t = 0.
double beta_of_t(double t, long r) {
  const double rd = static_cast<double>(r);
  if (r <= 32) {
    double acc = 0.0;
    for (long m = 1; m <= r; ++m) {
      const double s = std::sin(kPi * static_cast<double>(m) * t);
      acc += s * s;
    }
    return 2.0 * acc / rd;
  }
  const double N = 2.0 * rd + 1.0;
  const double th = kPi * t;
  if (N * th < 0.01) {
    const double s2 = rd * (rd + 1) * (2 * rd + 1) / 6.0;
    const double s4 = rd * (rd + 1) * (2 * rd + 1) * (3 * rd * rd + 3 * rd - 1) / 30.0;
    const double s6 =
        rd * (rd + 1) * (2 * rd + 1) * (3 * std::pow(rd, 4) + 6 * std::pow(rd, 3) - 3 * rd + 1) / 42.0;
    const double t2 = th * th;
    return (2.0 * t2 * s2 - (2.0 / 3.0) * t2 * t2 * s4 + (4.0 / 45.0) * t2 * t2 * t2 * s6) / rd;
  }
  return (N - std::sin(N * th) / std::sin(th)) / (2.0 * rd);
}

// sum_{j > J} 1/j^2.
double inverse_square_tail(long J) {
  double s = hurwitz_tail(2.0, std::max(16.0, J + 1.0));
  for (long j = J + 1; j < 16; ++j) s += 1.0 / (static_cast<double>(j) * static_cast<double>(j));
  return s;
}

}  // namespace

double big_F(double x, long r) {
  if (!(x > 0.0)) throw DomainError("big_F: x must be positive");
  if (r < 1) throw RangeError("big_F: r must be at least 1");
  const double w = 1.0 / (2.0 * static_cast<double>(r) + 1.0);
  std::vector<double> bp{0.0};
  for (double k : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0})
    if (k * w < 0.5) bp.push_back(k * w);
  bp.push_back(0.5);
  AdaptiveOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-12;
  opt.max_evaluations = 2000000;
  auto f = [&](double t) { return 1.0 / (x + beta_of_t(t, r)); };
  return 2.0 * integrate_adaptive(f, bp, opt).value;
}

double sigma_r(long r) {
  if (r < 1) throw RangeError("sigma_r: r must be at least 1");
  const double hi = 10.0 * std::max(1.0, static_cast<double>(r));
  const auto res = find_root_bracketed([&](double x) { return big_F(x, r) - 1.0; }, 1e-8, hi, 1e-13);
  if (std::abs(res.residual) > 1e-10) throw ConvergenceError("sigma_r: residual above 1e-10");
  return 1.0 / std::sqrt(res.root);
}

double zlambda_sample(const ZLambdaConfig& cfg, std::mt19937_64& rng) {
  if (!(cfg.lambda > 0.0)) throw DomainError("zlambda_sample: lambda must be positive");
  if (cfg.truncation_J < 1) throw DomainError("zlambda_sample: truncation_J must be >= 1");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const long J = cfg.truncation_J;
  const long exact = (cfg.exact_terms < 15) ? J : std::min(cfg.exact_terms, J);
  // Pairs j and -j combine to a chi-square with two degrees of freedom.
  double chi = 0.0;
  for (long j = 1; j <= exact; ++j) {
    const double e = -2.0 * std::log1p(-unif(rng));
    chi += e / (static_cast<double>(j) * static_cast<double>(j));
  }
  if (exact < J) {
    const double s2 = hurwitz_tail(2.0, exact + 1.0) - hurwitz_tail(2.0, J + 1.0);
    const double s4 = hurwitz_tail(4.0, exact + 1.0) - hurwitz_tail(4.0, J + 1.0);
    chi += 2.0 * s2 + 2.0 * std::sqrt(s4) * normal(rng);
  }
  if (cfg.tail_compensation) chi += 2.0 * inverse_square_tail(J);
  const double coef = 3.0 / (2.0 * cfg.lambda * cfg.lambda * kPi * kPi);
  return std::sqrt(2.0) * normal(rng) - coef * chi;
}

std::complex<double> zlambda_cf(double u, double lambda, double c) {
  if (!(lambda > 0.0)) throw DomainError("zlambda_cf: lambda must be positive");
  const double a = c * u / (kPi * kPi * lambda * lambda);
  const long J = std::max(16L, static_cast<long>(std::ceil(std::sqrt(std::abs(a) / 1e-3))));
  KahanSum<cplx> acc;
  for (long j = J; j >= 1; --j) {
    const double jj = static_cast<double>(j) * static_cast<double>(j);
    acc += principal_log1p(cplx(0.0, a / jj));
  }
  // Tail: log(1 + i a / j^2) = sum_k (-1)^{k+1} (i a)^k / (k j^{2k}).
  cplx ia_k(1.0, 0.0);
  const cplx ia(0.0, a);
  for (int k = 1; k <= 8; ++k) {
    ia_k *= ia;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    acc += sign * ia_k / static_cast<double>(k) * hurwitz_tail(2.0 * k, J + 1.0);
  }
  return std::exp(-u * u - acc.value());
}

namespace {

struct ZDensityTable {
  std::vector<double> nodes, weights;
  std::vector<cplx> cf;
  double normalizer = 0.0;  // integral of f(t^2) over the real line

  double pdf(double x) const {
    KahanSum<double> acc;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double ph = -nodes[k] * x;
      acc += weights[k] * (cf[k].real() * std::cos(ph) - cf[k].imag() * std::sin(ph));
    }
    return acc.value() / kPi;
  }
};

std::shared_ptr<const ZDensityTable> build_z_table(double lambda, const QuadratureControl& q) {
  const double U = q.u_max > 0.0 ? q.u_max : std::sqrt(std::log(10.0 / q.abs_tol) + 2.0);
  const std::vector<double> probes{-14.0, -9.0, -6.0, -4.0, -2.5, -1.5, -0.5, 0.0, 0.5, 1.5, 3.0, 5.0, 8.0};
  auto f = [&](double u) {
    const cplx g = zlambda_cf(u, lambda);
    Eigen::ArrayXd out(probes.size() + 2);
    out(0) = g.real();
    out(1) = g.imag();
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const double ph = -u * probes[k];
      out(k + 2) = g.real() * std::cos(ph) - g.imag() * std::sin(ph);
    }
    return out;
  };
  std::vector<double> bp;
  for (double u = 0.0; u < U; u += 0.25) bp.push_back(u);
  bp.push_back(U);
  AdaptiveOptions opt;
  opt.abs_tol = q.abs_tol;
  opt.max_evaluations = q.max_points;
  opt.keep_panels = true;
  const auto res = integrate_adaptive(f, bp, opt);
  auto tab = std::make_shared<ZDensityTable>();
  for (const auto& p : res.panels) {
    for (int k = 0; k < 15; ++k) {
      tab->nodes.push_back(gk15::abscissa(p.a, p.b, k));
      tab->weights.push_back(gk15::kronrod_weight(p.a, p.b, k));
      tab->cf.emplace_back(p.samples[k](0), p.samples[k](1));
    }
  }
  AdaptiveOptions nopt;
  nopt.abs_tol = 1e-11;
  const ZDensityTable& t = *tab;
  tab->normalizer =
      2.0 * integrate_adaptive([&](double s) { return std::max(0.0, t.pdf(s * s)); },
                               std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5}, nopt)
                .value;
  return tab;
}

std::shared_ptr<const ZDensityTable> z_table(double lambda, const QuadratureControl& q) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double>, std::shared_ptr<const ZDensityTable>> cache;
  const auto key = std::make_tuple(lambda, q.u_max, q.abs_tol);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto tab = build_z_table(lambda, q);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, tab);
  return tab;
}

}  // namespace

double zlambda_pdf(double x, double lambda, const QuadratureControl& q) {
  return std::max(0.0, z_table(lambda, q)->pdf(x));
}

double threshold_pdf(double x, double lambda) {
  const auto tab = z_table(lambda, QuadratureControl{});
  return std::max(0.0, tab->pdf(x * x)) / tab->normalizer;
}

double chain_normalizer(const std::function<double(double)>& f, double t_max) {
  AdaptiveOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-13;
  std::vector<double> bp;
  for (int k = 0; k <= 16; ++k) bp.push_back(t_max * k / 16.0);
  return 2.0 * integrate_adaptive([&](double t) { return f(t * t); }, bp, opt).value;
}

double intermediate_variance() { return std::cbrt(2.0 / 3.0); }

double intermediate_rate() { return std::cbrt(3.0) / std::pow(2.0, 4.0 / 3.0); }

LimitLaw limit_for_regime(Regime g, double lambda_or_r) {
  LimitLaw law;
  switch (g) {
    case Regime::Long:
      law.kind = LimitLaw::Kind::Quartic;
      law.a = 1.0;
      law.b = 0.75;
      law.scale = "n^3/4";
      break;
    case Regime::Threshold:
      law.kind = LimitLaw::Kind::Threshold;
      law.lambda = lambda_or_r;
      law.a = 0.75;
      law.b = 0.75;
      law.scale = "n^3/4";
      break;
    case Regime::Finite: {
      const double s = sigma_r(static_cast<long>(std::llround(lambda_or_r)));
      law.kind = LimitLaw::Kind::Gaussian;
      law.variance = s * s;
      law.a = 0.0;
      law.b = 0.5;
      law.scale = "sqrt(n)";
      break;
    }
    case Regime::Intermediate:
      law.kind = LimitLaw::Kind::IntermediateGaussian;
      law.variance = intermediate_variance();
      law.a = 0.5;
      law.b = 0.5 + law.a / 3.0;
      law.scale = "r^1/3 sqrt(n)";
      break;
    default:
      throw UnknownRegime("limit_for_regime: unknown regime");
  }
  return law;
}

double limit_pdf(const LimitLaw& law, double x) {
  switch (law.kind) {
    case LimitLaw::Kind::Quartic:
      return quartic_pdf(x);
    case LimitLaw::Kind::Threshold:
      return threshold_pdf(x, law.lambda);
    case LimitLaw::Kind::Gaussian:
    case LimitLaw::Kind::IntermediateGaussian:
      return std::exp(-0.5 * x * x / law.variance) / std::sqrt(2.0 * kPi * law.variance);
  }
  return 0.0;
}

double rectangle_sum_bound(const Eigen::VectorXd&, double lipschitz_K, long n) {
  if (n < 1) throw RangeError("rectangle_sum_bound: n must be at least 1");
  return lipschitz_K / (2.0 * static_cast<double>(n));
}

double rectangle_sum(const Eigen::VectorXd& f_grid) {
  const long n = f_grid.size() - 1;
  if (n < 1) throw EmptyInput("rectangle_sum: grid needs at least two points");
  return f_grid.head(n).sum() / static_cast<double>(n);
}

double lorentz_sum(double y) {
  if (!(y > 0.0)) throw DomainError("lorentz_sum: y must be positive");
  const long J = std::max(1000L, static_cast<long>(std::ceil(20.0 * std::sqrt(y))));
  KahanSum<double> acc;
  for (long j = J; j >= 1; --j) acc += 1.0 / (y + static_cast<double>(j) * static_cast<double>(j));
  const double Jd = static_cast<double>(J), sy = std::sqrt(y);
  const double fJ = 1.0 / (y + Jd * Jd);
  const double dfJ = -2.0 * Jd * fJ * fJ;
  acc += std::atan(sy / Jd) / sy - 0.5 * fJ - dfJ / 12.0;
  return acc.value();
}

}  // namespace soc
