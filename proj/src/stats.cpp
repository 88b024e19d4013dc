#include "socchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socchain/errors.hpp"
#include "socchain/numerics.hpp"

namespace soc {

WeightedEcdf::WeightedEcdf(std::vector<WeightedSample> samples) {
  if (samples.empty()) throw EmptyInput("weighted ECDF needs at least one sample");
  for (const auto& s : samples)
    if (!(s.weight > 0.0) || !std::isfinite(s.weight) || !std::isfinite(s.value))
      throw DomainError("weighted ECDF: weights must be positive and finite");
  std::sort(samples.begin(), samples.end(),
            [](const WeightedSample& a, const WeightedSample& b) { return a.value < b.value; });
  KahanSum<double> total;
  for (const auto& s : samples) total += s.weight;
  const double W = total.value();
  KahanSum<double> run;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    run += samples[k].weight;
    if (!x_.empty() && samples[k].value == x_.back()) {
      F_.back() = run.value() / W;
    } else {
      x_.push_back(samples[k].value);
      F_.push_back(run.value() / W);
    }
  }
  F_.back() = 1.0;
}

double WeightedEcdf::operator()(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.begin()) return 0.0;
  return F_[static_cast<std::size_t>(it - x_.begin()) - 1];
}

WeightedEcdf weighted_ecdf(const std::vector<WeightedSample>& samples) { return WeightedEcdf(samples); }

double ks_distance(const WeightedEcdf& e, const std::function<double(double)>& cdf) {
  double d = 0.0;
  for (std::size_t k = 0; k < e.jumps(); ++k) {
    const double c = cdf(e.jump_at(k));
    d = std::max({d, std::abs(e.after(k) - c), std::abs(e.before(k) - c)});
  }
  return d;
}

double ks_two_sample(const WeightedEcdf& a, const WeightedEcdf& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.jumps(); ++k) d = std::max(d, std::abs(a.after(k) - b(a.jump_at(k))));
  for (std::size_t k = 0; k < b.jumps(); ++k) d = std::max(d, std::abs(b.after(k) - a(b.jump_at(k))));
  return d;
}

std::pair<double, double> weighted_mean_se(const std::vector<WeightedSample>& samples,
                                           const std::function<double(double)>& f) {
  if (samples.empty()) throw EmptyInput("weighted mean needs at least one sample");
  KahanSum<double> sw, swf;
  for (const auto& s : samples) {
    sw += s.weight;
    swf += s.weight * f(s.value);
  }
  const double W = sw.value(), m = swf.value() / W;
  KahanSum<double> v;
  for (const auto& s : samples) {
    const double d = s.weight / W * (f(s.value) - m);
    v += d * d;
  }
  return {m, std::sqrt(v.value())};
}

WeightedMoments weighted_moments(const std::vector<WeightedSample>& samples) {
  if (samples.empty()) throw EmptyInput("weighted moments need at least one sample");
  WeightedMoments out;
  KahanSum<double> sw, sw2;
  for (const auto& s : samples) {
    sw += s.weight;
    sw2 += s.weight * s.weight;
  }
  out.ess = sw.value() * sw.value() / sw2.value();
  auto [m, se] = weighted_mean_se(samples, [](double x) { return x; });
  out.mean = m;
  out.mean_se = se;
  KahanSum<double> v;
  for (const auto& s : samples) v += s.weight * (s.value - m) * (s.value - m);
  out.var = v.value() / sw.value();
  return out;
}

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - m;
  auto acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += c[i] * c[i + lag];
    return s / static_cast<double>(n);
  };
  const double c0 = acov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  double tau = 1.0;
  for (std::size_t lag = 1; lag + 1 < n; lag += 2) {
    const double pair = (acov(lag) + acov(lag + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return static_cast<double>(n) / tau;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw EmptyInput("ols_slope needs two or more points");
  const double nx = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nx;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nx;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace soc
