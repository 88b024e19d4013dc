#pragma once

// Small numerical toolkit: compensated summation, adaptive Gauss-Kronrod
// quadrature, bracketed root finding, Hurwitz-zeta tails and a tabulated CDF.
// Header-only; everything is templated on the value type so the same code
// integrates real, complex and Eigen-array valued functions.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "socchain/errors.hpp"

namespace soc {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// ---------------------------------------------------------------------------
// Compensated (Neumaier) summation.

template <typename T>
class KahanSum {
 public:
  KahanSum() = default;
  explicit KahanSum(T init) : sum_(init) {}

  KahanSum& operator+=(T x) {
    if constexpr (std::is_floating_point_v<T>) {
      add_real(sum_, comp_, x);
    } else {
      typename T::value_type sr = sum_.real(), cr = comp_.real();
      typename T::value_type si = sum_.imag(), ci = comp_.imag();
      add_real(sr, cr, x.real());
      add_real(si, ci, x.imag());
      sum_ = T(sr, si);
      comp_ = T(cr, ci);
    }
    return *this;
  }

  T value() const { return sum_ + comp_; }

 private:
  template <typename R>
  static void add_real(R& sum, R& comp, R x) {
    const R t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  T sum_{};
  T comp_{};
};

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15 rule.

namespace gk15 {
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// Abscissa k in [0, 15) on [a, b]; order: -x0, ..., -x6, 0, x6, ..., x0.
inline double abscissa(double a, double b, int k) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  if (k < 7) return c - h * kNodes[k];
  if (k == 7) return c;
  return c + h * kNodes[14 - k];
}

/// Kronrod weight of abscissa k, already scaled by the half width.
inline double kronrod_weight(double a, double b, int k) {
  const double h = 0.5 * (b - a);
  return h * kKronrodWeights[k < 8 ? k : 14 - k];
}
}  // namespace gk15

inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double value_norm(const Eigen::ArrayBase<Derived>& v) {
  return v.abs().maxCoeff();
}

template <typename V>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::array<V, 15> samples{};
  V integral{};
  double error = 0.0;
};

template <typename V>
struct QuadratureResult {
  V value{};
  double error = 0.0;
  int evaluations = 0;
  std::vector<Panel<V>> panels;  // kept only when requested
};

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  int max_evaluations = 200000;
  bool keep_panels = false;
};

namespace detail {
template <typename V>
V zero_like(const V& proto) {
  if constexpr (std::is_arithmetic_v<V> || std::is_same_v<V, std::complex<double>>)
    return V{};
  else
    return V::Zero(proto.size());
}

template <typename V, typename F>
Panel<V> evaluate_panel(F& f, double a, double b) {
  Panel<V> p;
  p.a = a;
  p.b = b;
  for (int k = 0; k < 15; ++k) p.samples[k] = f(gk15::abscissa(a, b, k));
  const double h = 0.5 * (b - a);
  V kron = zero_like(p.samples[0]);
  V gauss = zero_like(p.samples[0]);
  for (int k = 0; k < 15; ++k) kron += gk15::kronrod_weight(a, b, k) * p.samples[k];
  // Gauss nodes are the odd Kronrod indices 1, 3, 5 on each side plus the centre.
  for (int i = 0; i < 3; ++i) {
    const double w = h * gk15::kGaussWeights[i];
    gauss += w * (p.samples[1 + 2 * i] + p.samples[13 - 2 * i]);
  }
  gauss += h * gk15::kGaussWeights[3] * p.samples[7];
  p.integral = kron;
  p.error = value_norm(V(kron - gauss));
  return p;
}
}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature over the given breakpoints.
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol*|I|).
template <typename F>
auto integrate_adaptive(F&& f, const std::vector<double>& breakpoints,
                        const AdaptiveOptions& opt = {}) {
  using V = std::decay_t<decltype(f(0.0))>;
  if (breakpoints.size() < 2) throw DomainError("integrate_adaptive: need at least two breakpoints");

  auto cmp = [](const Panel<V>& x, const Panel<V>& y) { return x.error < y.error; };
  std::priority_queue<Panel<V>, std::vector<Panel<V>>, decltype(cmp)> heap(cmp);
  QuadratureResult<V> out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    heap.push(detail::evaluate_panel<V>(f, breakpoints[i], breakpoints[i + 1]));
    out.evaluations += 15;
  }
  if (heap.empty()) throw DomainError("integrate_adaptive: empty integration range");

  auto totals = [&heap]() {
    auto copy = heap;
    V sum = detail::zero_like(copy.top().integral);
    double err = 0.0;
    while (!copy.empty()) {
      sum += copy.top().integral;
      err += copy.top().error;
      copy.pop();
    }
    return std::pair<V, double>(sum, err);
  };

  // Running totals avoid rescanning the heap on every split.
  auto [sum, err] = totals();
  int since_resync = 0;
  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * value_norm(sum));
    if (err <= target) break;
    if (out.evaluations + 30 > opt.max_evaluations) {
      std::ostringstream msg;
      msg << "adaptive quadrature exceeded " << opt.max_evaluations
          << " evaluations (error estimate " << err << ", target " << target << ")";
      throw ConvergenceError(msg.str());
    }
    Panel<V> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision.
      throw ConvergenceError("adaptive quadrature: panel width underflow");
    }
    Panel<V> left = detail::evaluate_panel<V>(f, worst.a, mid);
    Panel<V> right = detail::evaluate_panel<V>(f, mid, worst.b);
    out.evaluations += 30;
    sum += left.integral + right.integral - worst.integral;
    err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    if (++since_resync == 64) {
      std::tie(sum, err) = totals();
      since_resync = 0;
    }
  }
  std::tie(out.value, out.error) = totals();
  if (opt.keep_panels) {
    out.panels.reserve(heap.size());
    while (!heap.empty()) {
      out.panels.push_back(heap.top());
      heap.pop();
    }
    std::sort(out.panels.begin(), out.panels.end(),
              [](const Panel<V>& x, const Panel<V>& y) { return x.a < y.a; });
  }
  return out;
}

template <typename F>
auto integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  return integrate_adaptive(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

/// Controls for Fourier-inversion integrals. u_max <= 0 selects the
/// truncation automatically from the modulus bound.
struct QuadratureControl {
  double u_max = 0.0;
  double abs_tol = 1e-10;
  int max_points = 400000;
};

// ---------------------------------------------------------------------------
// Brent's bracketed root finder.

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

template <typename F>
RootResult find_root_bracketed(F&& f, double lo, double hi, double f_tol, int max_iter = 300) {
  double a = lo, b = hi, fa = f(a), fb = f(b);
  if (!(std::isfinite(fa) && std::isfinite(fb)) || fa * fb > 0.0)
    throw ConvergenceError("find_root_bracketed: root is not bracketed");
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 1; it <= max_iter; ++it) {
    if (std::abs(fb) <= f_tol) return {b, fb, it};
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol) return {b, fb, it};
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  throw ConvergenceError("find_root_bracketed: iteration budget exhausted");
}

// ---------------------------------------------------------------------------
// Hurwitz zeta tail sum_{j >= N} j^{-s} by Euler-Maclaurin (N >= 16, s > 1).

inline double hurwitz_tail(double s, double N) {
  if (!(s > 1.0) || N < 16.0) throw DomainError("hurwitz_tail: needs s > 1 and N >= 16");
  // Bernoulli numbers B2, B4, B6, B8 over (2k)!.
  const double np = std::pow(N, -s);
  double sum = N * np / (s - 1.0) + 0.5 * np;
  double rising = s;          // s (s+1) ... (s+2k-2)
  double power = np / N;      // N^{-s-2k+1}
  const std::array<double, 4> b_over_fact = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0,
                                             -1.0 / 1209600.0};
  for (int k = 0; k < 4; ++k) {
    sum += b_over_fact[k] * rising * power;
    rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
    power /= N * N;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// SplitMix64 stream derivation for reproducible substreams.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t salt = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(salt)) + stream);
}

// ---------------------------------------------------------------------------
// CDF tabulated from a density by per-interval Gauss-Kronrod integration,
// interpolated with cubic Hermite polynomials that use the density itself as
// the slope. Mass outside [lo, hi] is assigned to the ends.

class TabulatedCdf {
 public:
  TabulatedCdf() = default;

  TabulatedCdf(const std::function<double(double)>& pdf, double lo, double hi, int intervals,
               bool normalize = true)
      : lo_(lo), hi_(hi), step_((hi - lo) / intervals) {
    if (!(hi > lo) || intervals < 1) throw DomainError("TabulatedCdf: bad grid");
    x_.resize(intervals + 1);
    cdf_.resize(intervals + 1);
    pdf_.resize(intervals + 1);
    cdf_[0] = 0.0;
    for (int i = 0; i <= intervals; ++i) {
      x_[i] = lo + i * step_;
      pdf_[i] = pdf(x_[i]);
    }
    KahanSum<double> acc;
    for (int i = 0; i < intervals; ++i) {
      double piece = 0.0;
      for (int k = 0; k < 15; ++k)
        piece += gk15::kronrod_weight(x_[i], x_[i + 1], k) * pdf(gk15::abscissa(x_[i], x_[i + 1], k));
      acc += piece;
      cdf_[i + 1] = acc.value();
    }
    mass_ = cdf_.back();
    if (normalize && mass_ > 0.0) {
      for (auto& c : cdf_) c /= mass_;
      for (auto& p : pdf_) p /= mass_;
    }
  }

  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const double pos = (x - lo_) / step_;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), x_.size() - 2);
    const double t = (x - x_[i]) / step_;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double v = h00 * cdf_[i] + h10 * step_ * pdf_[i] + h01 * cdf_[i + 1] + h11 * step_ * pdf_[i + 1];
    return std::clamp(v, 0.0, 1.0);
  }

  double raw_mass() const { return mass_; }

 private:
  double lo_ = 0.0, hi_ = 1.0, step_ = 1.0, mass_ = 1.0;
  std::vector<double> x_, cdf_, pdf_;
};

}  // namespace soc
