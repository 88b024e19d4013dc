#include "socchain/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "socchain/charfn.hpp"
#include "socchain/errors.hpp"
#include "socchain/limits.hpp"

namespace soc {

void validate_plan(const TiltPlan& plan) {
  if (!(plan.u_star >= 0.0) || !std::isfinite(plan.u_star))
    throw DomainError("tilt plan: u_star must be finite and nonnegative");
  if (!(plan.w >= 1.0) || !std::isfinite(plan.w)) throw DomainError("tilt plan: w must be at least 1");
}

TiltPlan default_tilt(const ModelParams& p, Regime g) {
  switch (g) {
    case Regime::Finite: {
      const double s = sigma_r(p.r);
      return {1.0 / (2.0 * s * s), 1.0};
    }
    case Regime::Intermediate:
      return {intermediate_rate(), std::pow(static_cast<double>(p.r), 2.0 / 3.0)};
    case Regime::Threshold:
    case Regime::Long:
      return {0.0, 1.0};
  }
  throw UnknownRegime("default_tilt: unknown regime");
}

double domination_bound(const TiltPlan& plan, double v) {
  const double a = 1.0 + plan.u_star;
  return std::pow(1.0 + v * v / (a * a), -0.75);
}

namespace {

// Bound on int_V^inf (1 + v^2/a^2)^(-p) dv from convexity of log(1 + C e^{2s}).
double envelope_tail(double V, double a, double p) {
  const double C = V * V / (a * a);
  const double theta = C / (1.0 + C);
  const double d = 2.0 * p * theta - 1.0;
  if (d <= 0.0) return std::numeric_limits<double>::infinity();
  return V * std::exp(-p * std::log1p(C)) / d;
}

// Frequency beyond which the envelope (1 + v^2/a^2)^(-(n-1)/4), a = max(c)/2,
// leaves less than abs_tol/10.
double truncation(const Eigen::ArrayXd& c, double nd, double abs_tol) {
  const double a = 0.5 * c.maxCoeff();
  const double p = 0.25 * (nd - 1.0);
  const double target = 0.1 * abs_tol;
  double hi = a / std::sqrt(p);
  auto excess = [&](double V) { return envelope_tail(V, a, p) * std::max(1.0, std::min(nd, 2.0 / V)); };
  while (excess(hi) > target) hi *= 2.0;
  double lo = 0.5 * hi;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

std::vector<double> octave_breakpoints(double h0, double v_max) {
  std::vector<double> bp{0.0};
  for (double v = h0; v < v_max; v *= 2.0) bp.push_back(v);
  bp.push_back(v_max);
  return bp;
}

// (1 - e^{-z n}) / z.
cplx window(cplx z, double n) {
  const cplx zn = z * n;
  if (std::abs(zn) < 1e-4) return n * (1.0 - zn / 2.0 + zn * zn / 6.0);
  return (1.0 - std::exp(-zn)) / z;
}

}  // namespace

InversionGrid::InversionGrid(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q) {
  if (s.n() < 4) throw DomainError("Fourier inversion needs n >= 4");
  validate_plan(plan);
  n_ = s.n();
  kappa_ = plan.kappa();
  const double nd = static_cast<double>(n_);
  const Eigen::ArrayXd c = s.betas.array() + 2.0 * kappa_;
  phi0_ = phi_n(s, cplx(0.0, -kappa_)).real();
  mean_ = nd - c.inverse().sum();
  sd_ = std::sqrt(2.0 * c.square().inverse().sum());

  v_max_ = q.u_max > 0.0 ? q.u_max : truncation(c, nd, q.abs_tol);

  std::vector<double> probes{0.0};
  for (double k : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0}) probes.push_back(mean_ + k * sd_);
  if (kappa_ > 0.0)
    for (double k : {0.5, 2.0, 5.0}) probes.push_back(k / kappa_);
  std::erase_if(probes, [&](double x) { return x < 0.0 || x > nd; });
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  const cplx shift(0.0, -kappa_);
  auto integrand = [&](double v) {
    const cplx g = std::exp(phi_n(s, shift + v) - phi0_);
    Eigen::ArrayXd out(3 + probes.size());
    out(0) = g.real();
    out(1) = g.imag();
    out(2) = (g * window(cplx(kappa_, v), nd)).real();
    for (std::size_t k = 0; k < probes.size(); ++k) out(3 + k) = (g * std::polar(1.0, -v * probes[k])).real();
    return out;
  };

  const auto bp = octave_breakpoints(std::min(1.0 / std::sqrt(nd), 1.0 / sd_), v_max_);

  AdaptiveOptions opt;
  opt.abs_tol = q.abs_tol * std::min(1.0, 1.0 / sd_);
  opt.max_evaluations = q.max_points;
  opt.keep_panels = true;
  const auto res = integrate_adaptive(integrand, bp, opt);
  tail_ = res.value(2) / kPi;
  for (const auto& pan : res.panels) {
    for (int k = 0; k < 15; ++k) {
      v_.push_back(gk15::abscissa(pan.a, pan.b, k));
      wt_.push_back(gk15::kronrod_weight(pan.a, pan.b, k));
      g_.emplace_back(pan.samples[k](0), pan.samples[k](1));
    }
  }
}

double InversionGrid::scaled_density(double x) const {
  KahanSum<double> acc;
  for (std::size_t k = 0; k < v_.size(); ++k) acc += wt_[k] * (g_[k] * std::polar(1.0, -v_[k] * x)).real();
  return acc.value() / kPi;
}

double InversionGrid::log_tail() const {
  if (!(tail_ > 0.0)) throw ConvergenceError("tail integral is not positive; tighten abs_tol");
  return phi0_ + std::log(tail_);
}

double InversionGrid::max_domination_ratio(const TiltPlan& plan) const {
  double worst = 0.0;
  for (std::size_t k = 0; k < v_.size(); ++k) worst = std::max(worst, std::abs(g_[k]) / domination_bound(plan, v_[k]));
  return worst;
}

ConditionalDensity::ConditionalDensity(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q)
    : grid_(s, plan, q), w_(plan.w) {
  if (!(grid_.scaled_tail() > 0.0)) throw ConvergenceError("conditional density: tail integral not positive");
}

double ConditionalDensity::operator()(double y) const {
  if (y < 0.0 || y > y_max()) return 0.0;
  const double x = w_ * y;
  const double g = grid_.scaled_density(x);
  return std::max(0.0, w_ * std::exp(-grid_.kappa() * x) * g / grid_.scaled_tail());
}

double ConditionalDensity::y_support() const {
  const double hi = grid_.tilted_mean() + 12.0 * grid_.tilted_sd();
  return std::clamp(hi / w_, 0.0, y_max());
}

double aux_density(const Spectrum& s, double x, const QuadratureControl& q) {
  // A dedicated integral per x: cached panels only resolve the oscillation
  // near the probes, and x may lie far out in the left tail.
  if (s.n() < 4) throw DomainError("Fourier inversion needs n >= 4");
  const double nd = static_cast<double>(s.n());
  const Eigen::ArrayXd c = s.betas.array();
  const double sd = std::sqrt(2.0 * c.square().inverse().sum());
  const double v_max = q.u_max > 0.0 ? q.u_max : truncation(c, nd, q.abs_tol);
  const double h0 = std::min({1.0 / std::sqrt(nd), 1.0 / sd, 1.0 / std::max(1.0, std::abs(x))});
  AdaptiveOptions opt;
  opt.abs_tol = q.abs_tol;
  opt.max_evaluations = q.max_points;
  auto f = [&](double v) { return std::exp(phi_n(s, v) - cplx(0.0, v * x)).real(); };
  const double g = integrate_adaptive(f, octave_breakpoints(h0, v_max), opt).value / kPi;
  return std::max(0.0, g);
}

double log_tail_probability(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q) {
  return InversionGrid(s, plan, q).log_tail();
}

double tail_probability(const Spectrum& s, const TiltPlan& plan, const QuadratureControl& q) {
  InversionGrid grid(s, plan, q);
  const double p = std::exp(grid.log_scale()) * grid.scaled_tail();
  return std::clamp(p, 0.0, 1.0);
}

double conditional_density_shifted(const Spectrum& s, const TiltPlan& plan, double x, const QuadratureControl& q) {
  validate_plan(plan);
  const double xmax = static_cast<double>(s.n()) / plan.w;
  if (!(x > 0.0 && x < xmax)) {
    std::ostringstream msg;
    msg << "conditional density: x = " << x << " outside (0, " << xmax << ")";
    throw DomainError(msg.str());
  }
  InversionGrid grid(s, plan, q);
  const double g = grid.scaled_density(plan.w * x);
  if (!(g > 0.0)) return 0.0;
  return std::exp(grid.log_scale() - grid.kappa() * plan.w * x + std::log(plan.w * g));
}

DensityGrid conditional_density_grid(const Spectrum& s, const TiltPlan& plan, const std::vector<double>& xs,
                                     const QuadratureControl& q) {
  InversionGrid grid(s, plan, q);
  const double w = plan.w;
  const double xmax = static_cast<double>(s.n()) / w;
  DensityGrid out;
  out.x = xs;
  const double tail = grid.scaled_tail();
  const double noise = q.abs_tol * std::min(1.0, 1.0 / grid.tilted_sd());
  for (double y : xs) {
    double d = 0.0, nrm = 0.0;
    if (y > 0.0 && y < xmax) {
      const double g = grid.scaled_density(w * y);
      if (g < 0.0) {
        ++out.clamped;
        if (g < -noise) ++out.significant;
      } else {
        const double e = -grid.kappa() * w * y + std::log(w * g);
        d = std::exp(grid.log_scale() + e);
        nrm = std::exp(e) / tail;
      }
    }
    out.density.push_back(d);
    out.normalized.push_back(nrm);
  }
  if (!xs.empty() && static_cast<double>(out.significant) > 0.001 * static_cast<double>(xs.size())) {
    std::ostringstream msg;
    msg << out.significant << " of " << xs.size() << " density values are significantly negative";
    throw ConvergenceError(msg.str());
  }
  return out;
}

}  // namespace soc
