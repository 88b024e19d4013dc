#include <doctest.h>

#include <cmath>

#include "socchain/errors.hpp"
#include "socchain/limits.hpp"
#include "socchain/numerics.hpp"

using namespace soc;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  AdaptiveOptions opt;
  opt.abs_tol = tol;
  return integrate_adaptive(f, a, b, opt).value;
}

double normal_pdf(double x, double var) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * kPi * var); }

}  // namespace

TEST_CASE("quartic law") {
  CHECK(quartic_pdf(0.0) == doctest::Approx(0.390062251089406774).epsilon(1e-15));
  CHECK(integrate(quartic_pdf, -8, 8) == doctest::Approx(1.0).epsilon(1e-8));
  const double m4 = integrate([](double x) { return x * x * x * x * quartic_pdf(x); }, -8, 8);
  CHECK(m4 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(quartic_cdf(1.0) == doctest::Approx(0.871838972365730521).epsilon(1e-10));
  CHECK(quartic_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(quartic_cdf(-20.0) == 0.0);
  CHECK(quartic_cdf(20.0) == 1.0);
}

TEST_CASE("big_F") {
  CHECK(big_F(1.0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  for (double x : {0.01, 0.3, 2.0, 50.0})
    CHECK(big_F(x, 1) == doctest::Approx(1.0 / std::sqrt((x + 1) * (x + 1) - 1)).epsilon(1e-11));
  CHECK(big_F(0.5, 3) == doctest::Approx(0.763193376849231085).epsilon(1e-11));
  for (long r : {1L, 4L, 40L, 400L}) {
    double prev = INFINITY;
    for (double x : {1e-4, 1e-2, 0.1, 1.0, 10.0, 1e3}) {
      const double v = big_F(x, r);
      CHECK(v < prev);
      CHECK(v <= 1.0 / x);
      prev = v;
    }
  }
  CHECK_THROWS_AS(big_F(0.0, 2), DomainError);
  CHECK_THROWS_AS(big_F(-1.0, 2), DomainError);
}

TEST_CASE("sigma_r") {
  const double s1 = sigma_r(1);
  CHECK(std::abs(s1 * s1 - (std::sqrt(2.0) + 1.0)) < 1e-8);
  // 30-digit root of F(1/sigma^2) = 1
  const std::pair<long, double> ref[] = {{2, 3.11562709465336209}, {5, 4.64708331439169184}, {10, 6.52934911209183684}};
  for (auto [r, s2] : ref) {
    const double s = sigma_r(r);
    CHECK(s * s == doctest::Approx(s2).epsilon(1e-9));
    CHECK(std::abs(big_F(1.0 / (s * s), r) - 1.0) < 1e-10);
  }
  double prev = 0.0;
  for (long r = 1; r <= 100; ++r) {
    const double s = sigma_r(r);
    CHECK(s > prev);
    prev = s;
  }
  CHECK_THROWS_AS(sigma_r(0), RangeError);
}

TEST_CASE("sigma_r growth at large r") {
  // the root itself is pinned; its ratio to (2r/3)^(1/3) is 1.1276 at r = 1000,
  // outside the +-2% band the asymptotic would suggest
  const double s = sigma_r(1000);
  CHECK(s * s == doctest::Approx(97.02).epsilon(1e-3));
  CHECK(std::abs(big_F(1.0 / (s * s), 1000) - 1.0) < 1e-10);
  CHECK(s / std::cbrt(2000.0 / 3.0) == doctest::Approx(1.12756).epsilon(1e-4));
}

TEST_CASE("Z_lambda characteristic function") {
  CHECK(std::abs(zlambda_cf(0.0, 1.0) - 1.0) < 1e-15);
  CHECK(std::abs(zlambda_cf(1.0, 1.0) - std::complex<double>(0.309226680566594059, -0.165320830390085937)) < 1e-10);
  CHECK(std::abs(zlambda_cf(0.5, 2.0) - std::complex<double>(0.776674479026738741, -0.0485909684998651959)) < 1e-10);
  for (double lam : {0.5, 1.0, 3.0}) {
    const double h = 1e-5;
    const auto d = (zlambda_cf(h, lam) - zlambda_cf(-h, lam)) / (2 * h);
    CHECK(std::abs((std::complex<double>(0, -1) * d).real() + 1.0 / (2 * lam * lam)) < 1e-6);
    CHECK(std::abs(zlambda_cf(0.7, lam)) <= std::exp(-0.49) + 1e-15);
  }
  CHECK(std::abs(zlambda_cf(-0.8, 1.0) - std::conj(zlambda_cf(0.8, 1.0))) < 1e-15);
}

TEST_CASE("Z_lambda sampler moments") {
  ZLambdaConfig cfg;
  std::mt19937_64 rng(2024);
  const long N = 200000;
  KahanSum<double> s1, s2;
  for (long k = 0; k < N; ++k) {
    const double z = zlambda_sample(cfg, rng);
    s1 += z;
    s2 += z * z;
  }
  const double mean = s1.value() / N, var = s2.value() / N - mean * mean;
  CHECK(std::abs(mean + 0.5) < 3.0 * std::sqrt(2.1 / N));
  // Var(Z^2 estimate) ~ (m4 - var^2)/N with m4 ~ 3 var^2 up to skew corrections
  CHECK(std::abs(var - 2.1) < 3.0 * std::sqrt(2.0 * 2.1 * 2.1 * 1.05 / N));
}

TEST_CASE("Z_lambda sampler against its CF") {
  ZLambdaConfig cfg;
  std::mt19937_64 rng(99);
  const long N = 400000;
  KahanSum<double> re, im;
  for (long k = 0; k < N; ++k) {
    const double z = zlambda_sample(cfg, rng);
    re += std::cos(z);
    im += std::sin(z);
  }
  const std::complex<double> mc(re.value() / N, im.value() / N);
  const double se = std::sqrt(1.0 / N);
  CHECK(std::abs(mc - zlambda_cf(1.0, 1.0, 3.0)) < 4.0 * se);
  CHECK(std::abs(mc - zlambda_cf(1.0, 1.0, 12.0)) > 10.0 * se);
}

TEST_CASE("Z_lambda at large lambda is N(0,2)") {
  ZLambdaConfig cfg;
  cfg.lambda = 1e3;
  std::mt19937_64 rng(5);
  KahanSum<double> s1, s2;
  const long N = 100000;
  for (long k = 0; k < N; ++k) {
    const double z = zlambda_sample(cfg, rng);
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1.value() / N) < 3.0 * std::sqrt(2.0 / N));
  CHECK(std::abs(s2.value() / N - 2.0) < 3.0 * std::sqrt(8.0 / N));
  double worst = 0.0;
  for (double x = -5; x <= 5; x += 0.25) worst = std::max(worst, std::abs(zlambda_pdf(x, 1e3) - normal_pdf(x, 2.0)));
  CHECK(worst <= 0.01);
}

TEST_CASE("Z_lambda density") {
  const double mass = integrate([](double x) { return zlambda_pdf(x, 1.0); }, -14.0, 10.0, 1e-9);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  const double mean = integrate([](double x) { return x * zlambda_pdf(x, 1.0); }, -14.0, 10.0, 1e-9);
  CHECK(mean == doctest::Approx(-0.5).epsilon(1e-3));
  for (double x : {-3.0, 0.0, 2.0}) CHECK(zlambda_pdf(x, 1.0) >= 0.0);
}

TEST_CASE("threshold density") {
  for (double x : {0.1, 0.7, 1.9}) CHECK(threshold_pdf(x, 1.0) == doctest::Approx(threshold_pdf(-x, 1.0)));
  const double mass = integrate([](double x) { return threshold_pdf(x, 1.0); }, -6.0, 6.0, 1e-8);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  double worst = 0.0;
  for (double x = -3; x <= 3; x += 0.1) worst = std::max(worst, std::abs(threshold_pdf(x, 1e3) - quartic_pdf(x)));
  CHECK(worst <= 0.02);
}

TEST_CASE("chaining the auxiliary limits") {
  // f(x^2)/int f(t^2) maps Exp(c) to N(0, 1/(2c)) and half-N(0,2) to the quartic law
  for (double c : {1.0 / (2.0 * (std::sqrt(2.0) + 1.0)), intermediate_rate()}) {
    auto ex = [c](double y) { return y < 0 ? 0.0 : c * std::exp(-c * y); };
    const double z = chain_normalizer(ex, 40.0);
    for (double x : {0.0, 0.8, 2.5}) CHECK(ex(x * x) / z == doctest::Approx(normal_pdf(x, 1.0 / (2 * c))).epsilon(1e-8));
  }
  CHECK(1.0 / (2.0 * intermediate_rate()) == doctest::Approx(intermediate_variance()).epsilon(1e-14));
  auto half = [](double y) { return y < 0 ? 0.0 : 2.0 * normal_pdf(y, 2.0); };
  const double z = chain_normalizer(half, 10.0);
  for (double x : {0.0, 0.5, 1.3}) CHECK(half(x * x) / z == doctest::Approx(quartic_pdf(x)).epsilon(1e-8));
}

TEST_CASE("limit_for_regime") {
  const LimitLaw f = limit_for_regime(Regime::Finite, 1);
  CHECK(f.kind == LimitLaw::Kind::Gaussian);
  CHECK(f.variance == doctest::Approx(std::sqrt(2.0) + 1.0).epsilon(1e-10));
  CHECK(f.scale == "sqrt(n)");
  CHECK(f.b == 0.5);
  const LimitLaw i = limit_for_regime(Regime::Intermediate);
  CHECK(i.kind == LimitLaw::Kind::IntermediateGaussian);
  CHECK(i.variance == doctest::Approx(0.873580464736299).epsilon(1e-12));
  CHECK(i.scale == "r^1/3 sqrt(n)");
  const LimitLaw l = limit_for_regime(Regime::Long);
  CHECK(l.kind == LimitLaw::Kind::Quartic);
  CHECK(l.scale == "n^3/4");
  CHECK(l.b == 0.75);
  const LimitLaw t = limit_for_regime(Regime::Threshold, 2.0);
  CHECK(t.kind == LimitLaw::Kind::Threshold);
  CHECK(t.lambda == 2.0);
  for (const auto& law : {f, i, l, t}) CHECK(law.b == doctest::Approx(std::min(0.5 + law.a / 3.0, 0.75)));
  CHECK(limit_pdf(l, 0.3) == quartic_pdf(0.3));
  CHECK(limit_pdf(f, 0.0) == doctest::Approx(normal_pdf(0.0, std::sqrt(2.0) + 1.0)));
}

TEST_CASE("rectangle rule bound") {
  Eigen::VectorXd lin(11);
  for (int k = 0; k <= 10; ++k) lin(k) = k / 10.0;
  CHECK(rectangle_sum_bound(lin, 1.0, 10) == doctest::Approx(0.05));
  CHECK(std::abs(rectangle_sum(lin) - 0.5) == doctest::Approx(0.05).epsilon(1e-13));
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(11, 2.5);
  CHECK(std::abs(rectangle_sum(c) - 2.5) <= rectangle_sum_bound(c, 0.0, 10));
  Eigen::VectorXd cs(101);
  for (int k = 0; k <= 100; ++k) cs(k) = std::cos(2 * kPi * k / 100.0);
  CHECK(std::abs(rectangle_sum(cs)) <= rectangle_sum_bound(cs, 2 * kPi, 100));
}

TEST_CASE("inverse-square Lorentz sums") {
  CHECK(lorentz_sum(100.0) == doctest::Approx(0.152079632679489662).epsilon(1e-12));
  // closed form (pi sqrt(y) coth(pi sqrt(y)) - 1) / (2y)
  CHECK(lorentz_sum(1e4) == doctest::Approx((100.0 * kPi / std::tanh(100.0 * kPi) - 1.0) / 2e4).epsilon(1e-12));
  for (double y : {1e2, 1e4, 1e6}) {
    const double gap = kPi / (2 * std::sqrt(y)) - lorentz_sum(y);
    CHECK(gap >= 0.0);
    CHECK(gap <= 1.0 / y + (kPi / 4) / std::pow(y, 1.5));
  }
}

TEST_CASE("Z_lambda density against a histogram of draws") {
  ZLambdaConfig cfg;
  std::mt19937_64 rng(77);
  const long N = 1000000;
  const double lo = -8.0, width = 0.25;
  std::vector<long> counts(48, 0);
  for (long k = 0; k < N; ++k) {
    const long b = static_cast<long>(std::floor((zlambda_sample(cfg, rng) - lo) / width));
    if (b >= 0 && b < 48) ++counts[b];
  }
  double worst = 0.0;
  for (int b = 0; b < 48; ++b) {
    const double a = lo + width * b;
    const double p = integrate([](double x) { return zlambda_pdf(x, 1.0); }, a, a + width, 1e-10);
    worst = std::max(worst, std::abs(counts[b] / (N * width) - p / width));
  }
  CHECK(worst <= 0.01);
}
