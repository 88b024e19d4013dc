#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "oracles.hpp"
#include "socchain/charfn.hpp"
#include "socchain/density.hpp"
#include "socchain/errors.hpp"
#include "socchain/samplers.hpp"
#include "socchain/stats.hpp"

using namespace soc;

namespace {

Eigen::VectorXd random_spins(long n, Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (long i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("hamiltonian") {
  const ModelParams p{12, 3};
  CHECK(hamiltonian(Eigen::VectorXd::Ones(12), p) == doctest::Approx(-6.0));
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd x = random_spins(12, rng);
    CHECK(hamiltonian(x, p) == doctest::Approx(oracle::hamiltonian(x, 3)).epsilon(1e-13));
  }
  // mean field: every unordered pair once
  const ModelParams mf{11, 5};
  const Eigen::VectorXd x = random_spins(11, rng);
  const double S = x.sum(), Q = x.squaredNorm();
  CHECK(hamiltonian(x, mf) == doctest::Approx(-(S * S - Q) / 20.0).epsilon(1e-13));
}

TEST_CASE("delta_hamiltonian") {
  const ModelParams p{64, 5};
  Rng rng(3);
  SpinConfig c = SpinConfig::from(random_spins(64, rng), p);
  CHECK(delta_hamiltonian(c, p, 7, c.x(6)) == 0.0);
  CHECK_THROWS_AS(delta_hamiltonian(c, p, 0, 1.0), IndexError);
  CHECK_THROWS_AS(delta_hamiltonian(c, p, 65, 1.0), IndexError);
  std::uniform_int_distribution<long> site(0, 63);
  std::normal_distribution<double> g;
  double worst = 0.0, worst_cache = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const long i = site(rng);
    const double v = g(rng);
    Eigen::VectorXd y = c.x;
    y(i) = v;
    const double dh = delta_hamiltonian(c, p, i + 1, v);
    worst = std::max(worst, std::abs(dh - (hamiltonian(y, p) - hamiltonian(c.x, p))));
    // bilinear: slope in (v - x_i) is -nbr_i / (2r)
    CHECK(dh == doctest::Approx(-(v - c.x(i)) * c.nbr(i) / 10.0).epsilon(1e-10));
    c.update(p, i, v);
  }
  CHECK(worst <= 1e-10);
  SpinConfig fresh = SpinConfig::from(c.x, p);
  worst_cache = std::max({std::abs(fresh.S - c.S), std::abs(fresh.Q - c.Q), std::abs(fresh.H - c.H),
                          (fresh.nbr - c.nbr).cwiseAbs().maxCoeff()});
  CHECK(worst_cache <= 1e-9);
}

TEST_CASE("fourier basis diagonalizes the interaction") {
  for (long n : {7L, 16L, 64L, 512L}) {
    const Eigen::MatrixXd P = fourier_basis(n);
    CHECK((P * P.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((P.row(n - 1).array() - 1.0 / std::sqrt(double(n))).abs().maxCoeff() < 1e-15);
  }
  Rng rng(8);
  for (auto [n, r] : {std::pair{16L, 3L}, {33L, 16L}, {64L, 1L}}) {
    const Spectrum s = compute_spectrum({n, r});
    const Eigen::MatrixXd P = fourier_basis(n);
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd x = random_spins(n, rng);
      const Eigen::VectorXd y = P * x;
      CHECK(y(n - 1) == doctest::Approx(x.sum() / std::sqrt(double(n))).epsilon(1e-12));
      double quad = 0.0;
      for (long j = 1; j <= n; ++j) quad += s.alpha(j) * y(j - 1) * y(j - 1);
      CHECK(std::abs(hamiltonian(x, {n, r}) + 0.5 * quad) < 1e-9);
      const double two_term = -x.sum() * x.sum() / (2.0 * n) - 0.5 * (quad - y(n - 1) * y(n - 1));
      CHECK(std::abs(hamiltonian(x, {n, r}) - two_term) < 1e-9);
    }
  }
}

TEST_CASE("metropolis identity") {
  CHECK(metropolis_accept(0.0, 1.0) == 1.0);
  CHECK(metropolis_accept(1.0, 0.0) == doctest::Approx(std::exp(-1.0)));
  Rng rng(4);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const double la = 3 * g(rng), lb = 3 * g(rng);
    const double lhs = std::exp(la) * metropolis_accept(la, lb);
    const double rhs = std::exp(lb) * metropolis_accept(lb, la);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, lhs));
  }
  CHECK(log_target(-2.0, 8.0, 8) == doctest::Approx(2.0 - 4.0));
}

TEST_CASE("sample_aux moments") {
  const Spectrum s = compute_spectrum({32, 2});
  Rng rng(21);
  const long N = 200000;
  KahanSum<double> m1, m2;
  for (long k = 0; k < N; ++k) {
    const auto [A, ok] = sample_aux(s, rng);
    CHECK_FALSE(ok != (A < 32.0));
    m1 += A;
    m2 += A * A;
  }
  const double mean = s.betas.cwiseInverse().sum();
  const double var = 2.0 * s.betas.cwiseInverse().cwiseAbs2().sum();
  const double em = m1.value() / N, ev = m2.value() / N - em * em;
  CHECK(std::abs(em - mean) < 3.0 * std::sqrt(var / N));
  // fourth central moment of a chi-square mixture bounded by 12 var^2 + ...
  CHECK(std::abs(ev - var) < 3.0 * var * std::sqrt(15.0 / N));
}

TEST_CASE("tilted proposals reproduce plain rejection") {
  for (auto [n, r] : {std::pair{16L, 1L}, {64L, 3L}}) {
    const Spectrum s = compute_spectrum({n, r});
    Rng rng(2026);
    const long N = 1000000;
    KahanSum<double> acc, sum_x, sum_x2;
    for (long k = 0; k < N; ++k) {
      const auto [A, ok] = sample_aux(s, rng);
      if (!ok) continue;
      acc += 1.0;
      sum_x += n - A;
      sum_x2 += (n - A) * (n - A);
    }
    const double plain = sum_x.value() / acc.value();
    const double plain_se = std::sqrt((sum_x2.value() / acc.value() - plain * plain) / acc.value());
    const TiltPlan plan = default_tilt({n, r}, Regime::Finite);
    const SampleRun run = sample_many(s, plan, 200000, 77, SampleKind::Aux);
    const auto [tilted, tilted_se] = weighted_mean_se(run.samples, [](double v) { return v; });
    INFO("n=", n, " plain=", plain, "+-", plain_se, " tilted=", tilted, "+-", tilted_se);
    CHECK(std::abs(plain - tilted) < 3.0 * std::hypot(plain_se, tilted_se));
    const double p_plain = acc.value() / N;
    const double lp = log_tail_probability(s, plan);
    CHECK(std::abs(std::exp(lp) - p_plain) < 3.0 * std::sqrt(p_plain * (1 - p_plain) / N));
    CHECK(std::abs(run.log_acceptance - lp) < 0.02);
  }
}

TEST_CASE("zero tilt reduces to plain draws with unit weights") {
  const Spectrum s = compute_spectrum({16, 1});
  Rng a(9), b(9);
  for (int k = 0; k < 100; ++k) {
    const WeightedSample w = sample_aux_tilted(s, {}, a);
    const auto [A, ok] = sample_aux(s, b);
    (void)ok;
    CHECK(w.weight == 1.0);
    CHECK(w.value == doctest::Approx(A).epsilon(1e-14));
  }
}

TEST_CASE("finite range tilt recovers the acceptance rate") {
  const long n = 4096;
  const Spectrum s = compute_spectrum({n, 1});
  const SampleRun run = sample_many(s, default_tilt({n, 1}, Regime::Finite), 20000, 3, SampleKind::Aux);
  CHECK(static_cast<double>(run.samples.size()) / run.proposals >= 0.2);
  const SampleRun bare = sample_many(s, {}, 20000, 3, SampleKind::Aux);
  CHECK(bare.samples.empty());
}

TEST_CASE("sample_tn") {
  Rng rng(6);
  const long N = 200000, n = 50;
  KahanSum<double> m1, m2;
  for (long k = 0; k < N; ++k) {
    const double t = sample_tn(n, rng);
    CHECK(t > 0.0);
    m1 += t;
    m2 += t * t;
  }
  const double mean = m1.value() / N, var = m2.value() / N - mean * mean;
  CHECK(std::abs(mean - 1.0) < 3.0 * std::sqrt(2.0 / n / N));
  CHECK(std::abs(var - 2.0 / n) < 3.0 * (2.0 / n) * std::sqrt((2.0 + 12.0 / n) / N));
}

TEST_CASE("self-normalized and magnetization draws") {
  const long n = 64;
  const Spectrum s = compute_spectrum({n, 3});
  const AuxSampler aux(s, {0.1, 1.0});
  Rng a(1), sign(2), tn(3);
  std::vector<WeightedSample> sn, mg;
  std::vector<double> tvals, vals;
  for (int k = 0; k < 100000; ++k) {
    Rng tcopy = tn;
    if (auto w = sample_magnetization(aux, a, sign, tn)) {
      mg.push_back(*w);
      const double t = sample_tn(n, tcopy);
      tvals.push_back(t);
      vals.push_back(w->value / std::sqrt(t));
      CHECK(w->weight > 0.0);
    }
  }
  REQUIRE(mg.size() > 1000);
  const WeightedMoments m = weighted_moments(mg);
  CHECK(std::abs(m.mean) < 3.0 * m.mean_se);
  CHECK(std::abs(corr(tvals, vals)) < 3.0 / std::sqrt(double(tvals.size())));
  Rng a2(1), s2(2);
  for (int k = 0; k < 50000; ++k)
    if (auto w = sample_self_normalized(aux, a2, s2)) sn.push_back(*w);
  const WeightedMoments ms = weighted_moments(sn);
  CHECK(std::abs(ms.mean) < 3.0 * ms.mean_se);
}

TEST_CASE("tilted and untilted estimators agree on bounded functionals") {
  const std::function<double(double)> fs[] = {
      [](double v) { return std::tanh(v); }, [](double v) { return std::cos(v / 4); },
      [](double v) { return v > 2.0 ? 1.0 : 0.0; }, [](double v) { return 1.0 / (1.0 + v * v / 16); },
      [](double v) { return std::exp(-std::abs(v) / 8); }};
  for (auto [n, r] : {std::pair{32L, 1L}, {64L, 3L}}) {
    const Spectrum s = compute_spectrum({n, r});
    const SampleRun t = sample_many(s, {0.2, 1.0}, 200000, 10, SampleKind::SelfNormalized);
    const SampleRun u = sample_many(s, {}, 400000, 11, SampleKind::SelfNormalized);
    for (const auto& f : fs) {
      const auto [mt, st] = weighted_mean_se(t.samples, f);
      const auto [mu, su] = weighted_mean_se(u.samples, f);
      CHECK(std::abs(mt - mu) < 3.0 * std::hypot(st, su) + 1e-12);
    }
  }
}

TEST_CASE("sample_many is independent of the worker count") {
  const Spectrum s = compute_spectrum({64, 3});
  setenv("SOCCHAIN_THREADS", "1", 1);
  const SampleRun a = sample_many(s, {0.1, 1.0}, 3 * kBatchSize + 17, 123, SampleKind::Magnetization);
  setenv("SOCCHAIN_THREADS", "3", 1);
  const SampleRun b = sample_many(s, {0.1, 1.0}, 3 * kBatchSize + 17, 123, SampleKind::Magnetization);
  unsetenv("SOCCHAIN_THREADS");
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].value == b.samples[k].value);
    CHECK(a.samples[k].weight == b.samples[k].weight);
  }
  CHECK(a.log_acceptance == b.log_acceptance);
}

TEST_CASE("MCMC against the exact sampler") {
  const ModelParams p{16, 1};
  const Spectrum s = compute_spectrum(p);
  McmcOptions opt;
  opt.burn_in_sweeps = 20000;
  Rng rng(31);
  const McmcTrace tr = mcmc_run(p, 400000, opt, rng);
  CHECK(tr.acceptance > 0.2);
  CHECK(tr.acceptance < 0.5);
  std::vector<WeightedSample> chain;
  for (std::size_t k = 0; k < tr.S.size(); ++k) chain.push_back({tr.S[k] / std::sqrt(tr.T[k]), 1.0});
  const SampleRun exact = sample_many(s, default_tilt(p, Regime::Finite), 200000, 32, SampleKind::SelfNormalized);
  CHECK(ks_two_sample(weighted_ecdf(chain), weighted_ecdf(exact.samples)) < 0.03);
  const double ess = effective_sample_size(tr.T);
  double tm = 0.0;
  for (double t : tr.T) tm += t;
  tm /= static_cast<double>(tr.T.size());
  double tv = 0.0;
  for (double t : tr.T) tv += (t - tm) * (t - tm);
  tv /= static_cast<double>(tr.T.size());
  CHECK(std::abs(tm - 1.0) < 3.0 * std::sqrt(tv / ess));
}

TEST_CASE("MCMC temperature average at n = 256") {
  const ModelParams p{256, 1};
  McmcOptions opt;
  opt.burn_in_sweeps = 2000;
  Rng rng(41);
  const McmcTrace tr = mcmc_run(p, 20000, opt, rng);
  const double ess = effective_sample_size(tr.T);
  double tm = 0.0, tv = 0.0;
  for (double t : tr.T) tm += t;
  tm /= static_cast<double>(tr.T.size());
  for (double t : tr.T) tv += (t - tm) * (t - tm);
  tv /= static_cast<double>(tr.T.size());
  CHECK(std::abs(tm - 1.0) < 3.0 * std::sqrt(tv / ess));
}
