#include "socchain/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include "socchain/charfn.hpp"
#include "socchain/density.hpp"
#include "socchain/errors.hpp"
#include "socchain/limits.hpp"
#include "socchain/stats.hpp"

namespace soc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances pinned per check.
const std::map<std::string, double>& tolerance_table() {
  static const std::map<std::string, double> t = {
      {"c1.spectrum", 1.0},          {"c2.sigma1", 1e-8},
      {"c2.sigma1000", 0.02},        {"c2.residual", 1.0},
      {"c3.cf_oracle", 4.0},         {"c4.tail200", 3.0},
      {"c4.tail400", 0.05},          {"c4.contour", 1e-6},
      {"c5.long_ks", 0.02},          {"c6.finite_var", 0.05},
      {"c6.finite_aux_ks", 0.03},    {"c7.inter_aux_ks", 0.05},
      {"c7.inter_var", 0.07},        {"c8.threshold_aux_ks", 0.05},
      {"c8.z_mean", 3.0},            {"c8.z_var", 3.0},
      {"c8.cf_c3", 4.0},             {"c8.cf_c12_rejected", 1.0},
      {"c9.mcmc_ks", 0.03},          {"c9.mcmc_ess", 1.0},
      {"c9.tn_mean", 3.0},           {"c10.orthonormal", 1e-10},
      {"c10.mean_mode", 1.0},        {"c10.hamiltonian", 1.0},
      {"c10.two_term", 1.0},         {"c11.middle_sum", 1.0},
      {"c11.middle_inverse", 1.0},   {"c11.asymp_K", 2.0},
      {"c11.lorentz", 1.0},          {"c11.rectangle", 1.0},
      {"c12.exponent", 0.05},
  };
  return t;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

CheckResult make(int criterion, const std::string& name, double stat, long n = 0, long r = 0) {
  CheckResult c;
  c.criterion = criterion;
  c.name = name;
  c.stat = std::isnan(stat) ? kInf : stat;
  c.tol = tolerance_table().at(name);
  c.n = n;
  c.r = r;
  return c;
}

long budget(const VerifyConfig& cfg, double base, long floor_value = 1000) {
  return std::max(floor_value, static_cast<long>(std::llround(base * cfg.budget)));
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// Unconditional draws of n - A_n in fixed batches.
std::vector<double> draw_aux_values(const Spectrum& s, const TiltPlan& plan, long count, std::uint64_t seed) {
  const AuxSampler aux(s, plan);
  const long batches = (count + kBatchSize - 1) / kBatchSize;
  std::vector<double> out(count);
  parallel_for(batches, [&](long b) {
    BatchStreams st(seed, static_cast<std::uint64_t>(b));
    const long hi = std::min(count, (b + 1) * kBatchSize);
    for (long k = b * kBatchSize; k < hi; ++k) out[k] = static_cast<double>(s.n()) - aux.draw(st.a).A;
  });
  return out;
}

// |estimate - target| / standard error for a complex Monte Carlo mean of exp(i u X).
double cf_zscore(const std::vector<double>& x, double u, cplx target) {
  KahanSum<double> c, s, c2, s2;
  for (double v : x) {
    const double cv = std::cos(u * v), sv = std::sin(u * v);
    c += cv;
    s += sv;
    c2 += cv * cv;
    s2 += sv * sv;
  }
  const double N = static_cast<double>(x.size());
  const double mc = c.value() / N, ms = s.value() / N;
  const double var = (c2.value() / N - mc * mc) + (s2.value() / N - ms * ms);
  const double se = std::sqrt(var / N);
  return std::abs(cplx(mc, ms) - target) / se;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> criterion1(const VerifyConfig&) {
  Stopwatch sw;
  std::set<std::pair<long, long>> grid;
  for (long n : {5L, 7L, 8L, 13L, 16L, 31L, 33L, 64L, 100L, 101L, 128L, 255L, 256L, 257L, 512L, 1000L, 1001L,
                 1024L, 2048L, 4096L}) {
    for (long r : {1L, 2L, 3L, n / 8, n / 4, (n - 1) / 2}) {
      if (r >= 1 && 2 * r < n) grid.insert({n, r});
    }
  }
  double worst = 0.0;
  std::string where;
  auto note = [&](double ratio, const std::string& what, long n, long r) {
    if (ratio > worst || std::isnan(ratio)) {
      worst = std::isnan(ratio) ? kInf : ratio;
      where = what + " at n=" + std::to_string(n) + " r=" + std::to_string(r);
    }
  };
  for (auto [n, r] : grid) {
    const ModelParams p{n, r};
    const Spectrum s = compute_spectrum(p);
    const Spectrum f = compute_spectrum_fast(p);
    note(s.alpha(n) == 1.0 ? 0.0 : kInf, "alpha_n", n, r);
    note(std::abs(s.alphas.sum()) / 1e-10, "trace", n, r);
    for (long j = 1; j < n; ++j) {
      note(std::abs(s.alpha(j) - s.alpha(n - j)) / 1e-12, "symmetry", n, r);
      note((s.beta(j) > 0.0 && s.beta(j) <= 2.0) ? 0.0 : kInf, "beta range", n, r);
      note(std::abs(s.beta(j) - f.beta(j)) / 1e-12, "fast path", n, r);
      if (n <= 1024) note(std::abs(s.alpha(j) - alpha_closed_form(p, j)) / 1e-12, "closed form", n, r);
      if (2 * r == n - 1) note(std::abs(s.alpha(j) + 1.0 / (2.0 * r)) / 1e-12, "mean field", n, r);
    }
    for (long j = 1; j <= n / 2; ++j) {
      const double bound = std::min(1.0, static_cast<double>(n) / (2.0 * r * j));
      note(std::max(0.0, std::abs(s.alpha(j)) - bound) / 1e-12, "alpha bound", n, r);
    }
  }
  auto c = make(1, "c1.spectrum", worst);
  c.detail = std::to_string(grid.size()) + " (n,r) pairs; worst ratio " + fmt(worst) + " (" + where + ")";
  c.seconds = sw.seconds();
  return {c};
}

std::vector<CheckResult> criterion2(const VerifyConfig&) {
  Stopwatch sw;
  std::vector<CheckResult> out;
  const double s1 = sigma_r(1);
  auto a = make(2, "c2.sigma1", std::abs(s1 * s1 - (std::sqrt(2.0) + 1.0)), 0, 1);
  a.mean = s1 * s1;
  a.detail = "sigma_1^2 = " + format_double(s1 * s1);
  out.push_back(a);
  const double s1000 = sigma_r(1000);
  const double ratio = s1000 / std::cbrt(2000.0 / 3.0);
  auto b = make(2, "c2.sigma1000", std::abs(ratio - 1.0), 0, 1000);
  b.mean = ratio;
  b.detail = "sigma_1000 / (2000/3)^(1/3) = " + fmt(ratio) + "; sigma^2 / ((2/3)^(1/3) r^(2/3)) = " +
             fmt(s1000 * s1000 / (std::cbrt(2.0 / 3.0) * std::pow(1000.0, 2.0 / 3.0)));
  out.push_back(b);
  double worst = 0.0;
  for (long r : {1L, 2L, 5L, 10L}) {
    const double s = sigma_r(r);
    worst = std::max(worst, std::abs(big_F(1.0 / (s * s), r) - 1.0) / 1e-10);
  }
  auto c = make(2, "c2.residual", worst);
  c.detail = "max |F(1/sigma_r^2) - 1| / 1e-10 over r in {1,2,5,10}";
  out.push_back(c);
  for (auto& x : out) x.seconds = sw.seconds() / 3.0;
  return out;
}

std::vector<CheckResult> criterion3(const VerifyConfig& cfg) {
  Stopwatch sw;
  const long draws = budget(cfg, 1e6);
  double worst = 0.0;
  std::ostringstream d;
  int idx = 0;
  for (auto [n, r] : {std::pair<long, long>{8, 1}, {16, 3}, {32, 7}}) {
    const Spectrum s = compute_spectrum({n, r});
    const auto x = draw_aux_values(s, TiltPlan{}, draws, derive_seed(cfg.seed, 300 + idx++));
    for (double u : {0.3, 1.0, 3.0}) {
      const double z = cf_zscore(x, u, cf_aux(s, u));
      worst = std::max(worst, z);
      d << "(" << n << "," << r << ",u=" << u << ") z=" << fmt(z) << " ";
    }
  }
  auto c = make(3, "c3.cf_oracle", worst);
  c.detail = d.str() + "draws=" + std::to_string(draws);
  c.seconds = sw.seconds();
  return {c};
}

std::vector<CheckResult> criterion4(const VerifyConfig& cfg) {
  std::vector<CheckResult> out;
  {
    Stopwatch sw;
    const Spectrum s = compute_spectrum({200, 1});
    const TiltPlan plan = default_tilt({200, 1}, Regime::Finite);
    const double logp = log_tail_probability(s, plan);
    // Importance-sampling estimate: P = e^L E[v], v = exp(kappa (A - n)) 1{A < n}.
    const AuxSampler aux(s, plan);
    const double L = aux.log_normalizer() + aux.kappa() * 200.0;
    const long N = budget(cfg, 1e6);
    const long batches = (N + kBatchSize - 1) / kBatchSize;
    std::vector<double> sum(batches), sum2(batches);
    std::vector<long> acc(batches);
    parallel_for(batches, [&](long b) {
      BatchStreams st(derive_seed(cfg.seed, 400), static_cast<std::uint64_t>(b));
      const long count = std::min(kBatchSize, N - b * kBatchSize);
      for (long k = 0; k < count; ++k) {
        const AuxDraw dr = aux.draw(st.a);
        if (!dr.accepted) continue;
        const double v = std::exp(aux.kappa() * (dr.A - 200.0));
        sum[b] += v;
        sum2[b] += v * v;
        ++acc[b];
      }
    });
    KahanSum<double> s1, s2;
    long accepted = 0;
    for (long b = 0; b < batches; ++b) {
      s1 += sum[b];
      s2 += sum2[b];
      accepted += acc[b];
    }
    const double m = s1.value() / N;
    const double se = std::sqrt((s2.value() / N - m * m) / N);
    const double target = std::exp(logp - L);
    auto c = make(4, "c4.tail200", std::abs(target - m) / se, 200, 1);
    c.mean = logp;
    c.acc_rate = static_cast<double>(accepted) / static_cast<double>(N);
    c.detail = "log P quadrature " + fmt(logp) + ", log P sampled " + fmt(L + std::log(m)) + " (" +
               std::to_string(N) + " tilted proposals)";
    c.seconds = sw.seconds();
    out.push_back(c);
  }
  {
    Stopwatch sw;
    const Spectrum s = compute_spectrum({400, 150});
    const double p = tail_probability(s, TiltPlan{});
    auto c = make(4, "c4.tail400", std::abs(p - 0.5), 400, 150);
    c.mean = p;
    c.detail = "P(A_n < n) = " + fmt(p);
    c.seconds = sw.seconds();
    out.push_back(c);
  }
  {
    Stopwatch sw;
    double worst = 0.0;
    std::ostringstream d;
    for (long r : {1L, 20L}) {
      const Spectrum s = compute_spectrum({64, r});
      std::vector<double> lp;
      for (double u : {0.05, 0.2071, 0.35}) lp.push_back(log_tail_probability(s, {u, 1.0}));
      const auto [lo, hi] = std::minmax_element(lp.begin(), lp.end());
      // Relative spread of P across contours.
      const double spread = std::expm1(*hi - *lo);
      worst = std::max(worst, spread);
      d << "r=" << r << " log P=" << fmt(lp[0]) << " spread=" << fmt(spread) << " ";
    }
    auto c = make(4, "c4.contour", worst, 64, 0);
    c.detail = d.str();
    c.seconds = sw.seconds();
    out.push_back(c);
  }
  return out;
}

CheckResult sampled_ks(int criterion, const std::string& name, const Spectrum& s, const TiltPlan& plan,
                       long proposals, std::uint64_t seed, SampleKind kind, double scale,
                       const std::function<double(double)>& cdf) {
  Stopwatch sw;
  SampleRun run = sample_many(s, plan, proposals, seed, kind);
  if (run.samples.empty()) throw EmptyInput(name + ": no accepted proposals");
  for (auto& w : run.samples) w.value /= scale;
  const auto mom = weighted_moments(run.samples);
  auto c = make(criterion, name, ks_distance(weighted_ecdf(run.samples), cdf), s.n(), s.params.r);
  c.mean = mom.mean;
  c.var = mom.var;
  c.acc_rate = static_cast<double>(run.samples.size()) / static_cast<double>(proposals);
  c.detail = "proposals=" + std::to_string(proposals) + " accepted=" + std::to_string(run.samples.size()) +
             " ess=" + fmt(mom.ess) + " ks=" + fmt(c.stat);
  c.samples = std::move(run.samples);
  c.seconds = sw.seconds();
  return c;
}

std::function<double(double)> exp_cdf(double rate) {
  return [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
}

std::vector<CheckResult> criterion5(const VerifyConfig& cfg) {
  const ModelParams p{4096, 2047};
  const Spectrum s = compute_spectrum(p);
  const LimitLaw law = limit_for_regime(Regime::Long);
  return {sampled_ks(5, "c5.long_ks", s, default_tilt(p, Regime::Long), budget(cfg, 2e5),
                     derive_seed(cfg.seed, 500), SampleKind::Magnetization, limit_scale(law, p.n, p.r),
                     limit_cdf(law))};
}

std::vector<CheckResult> criterion6(const VerifyConfig& cfg) {
  const ModelParams p{4096, 1};
  const Spectrum s = compute_spectrum(p);
  const TiltPlan plan = default_tilt(p, Regime::Finite);
  const double sigma2 = std::pow(sigma_r(1), 2);
  auto mag = sampled_ks(6, "c6.finite_var", s, plan, budget(cfg, 2e5), derive_seed(cfg.seed, 600),
                        SampleKind::Magnetization, std::sqrt(4096.0), limit_cdf(limit_for_regime(Regime::Finite, 1)));
  const double ks = mag.stat;
  mag.stat = std::abs(mag.var / sigma2 - 1.0);
  mag.detail += " var=" + fmt(mag.var) + " target=" + fmt(sigma2) + " ks_vs_gaussian=" + fmt(ks);
  auto aux = sampled_ks(6, "c6.finite_aux_ks", s, plan, budget(cfg, 2e5), derive_seed(cfg.seed, 601),
                        SampleKind::Aux, 1.0, exp_cdf(1.0 / (2.0 * sigma2)));
  return {mag, aux};
}

std::vector<CheckResult> criterion7(const VerifyConfig& cfg) {
  const long n = 65536;
  const long r = static_cast<long>(std::floor(std::pow(static_cast<double>(n), 0.6)));
  const ModelParams p{n, r};
  const Spectrum s = compute_spectrum(p);
  const TiltPlan plan = default_tilt(p, Regime::Intermediate);
  const LimitLaw law = limit_for_regime(Regime::Intermediate);
  auto aux = sampled_ks(7, "c7.inter_aux_ks", s, plan, budget(cfg, 4e4), derive_seed(cfg.seed, 700),
                        SampleKind::Aux, plan.w, exp_cdf(intermediate_rate()));
  auto mag = sampled_ks(7, "c7.inter_var", s, plan, budget(cfg, 4e4), derive_seed(cfg.seed, 701),
                        SampleKind::Magnetization, limit_scale(law, n, r), limit_cdf(law));
  const double ks = mag.stat;
  mag.stat = std::abs(mag.var / law.variance - 1.0);
  mag.detail += " var=" + fmt(mag.var) + " target=" + fmt(law.variance) + " ks_vs_gaussian=" + fmt(ks);
  return {aux, mag};
}

std::vector<CheckResult> criterion8(const VerifyConfig& cfg) {
  std::vector<CheckResult> out;
  {
    Stopwatch sw;
    const ModelParams p{4096, 512};
    const Spectrum s = compute_spectrum(p);
    const long N = budget(cfg, 1e5);
    const auto x = draw_aux_values(s, TiltPlan{}, N, derive_seed(cfg.seed, 800));
    std::vector<WeightedSample> ws;
    ws.reserve(x.size());
    for (double v : x) ws.push_back({v / std::sqrt(4096.0), 1.0});
    const TabulatedCdf cdf([](double t) { return zlambda_pdf(t, 1.0); }, -16.0, 8.0, 1200);
    const auto mom = weighted_moments(ws);
    auto c = make(8, "c8.threshold_aux_ks", ks_distance(weighted_ecdf(ws), [&](double t) { return cdf(t); }), 4096,
                  512);
    c.mean = mom.mean;
    c.var = mom.var;
    c.acc_rate = 1.0;
    c.detail = "draws=" + std::to_string(N) + " sample mean " + fmt(mom.mean) + " vs limit mean -0.5";
    c.samples = std::move(ws);
    c.seconds = sw.seconds();
    out.push_back(std::move(c));
  }
  Stopwatch sw;
  const long N = budget(cfg, 1e6);
  const long batches = (N + kBatchSize - 1) / kBatchSize;
  std::vector<double> z(N);
  const ZLambdaConfig zc;
  parallel_for(batches, [&](long b) {
    BatchStreams st(derive_seed(cfg.seed, 801), static_cast<std::uint64_t>(b));
    const long hi = std::min(N, (b + 1) * kBatchSize);
    for (long k = b * kBatchSize; k < hi; ++k) z[k] = zlambda_sample(zc, st.a);
  });
  KahanSum<double> s1;
  for (double v : z) s1 += v;
  const double Nd = static_cast<double>(N);
  const double m = s1.value() / Nd;
  KahanSum<double> m2, m4;
  for (double v : z) {
    const double d = v - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2.value() / Nd;
  const double se_mean = std::sqrt(var / Nd);
  const double se_var = std::sqrt((m4.value() / Nd - var * var) / Nd);
  const double secs = sw.seconds();
  auto a = make(8, "c8.z_mean", std::abs(m + 0.5) / se_mean);
  a.mean = m;
  a.var = var;
  a.detail = "mean " + fmt(m) + " target -0.5, se " + fmt(se_mean);
  auto b = make(8, "c8.z_var", std::abs(var - 2.1) / se_var);
  b.mean = m;
  b.var = var;
  b.detail = "variance " + fmt(var) + " target 2.1, se " + fmt(se_var);
  const double z3 = cf_zscore(z, 1.0, zlambda_cf(1.0, 1.0, 3.0));
  const double z12 = cf_zscore(z, 1.0, zlambda_cf(1.0, 1.0, 12.0));
  auto c3 = make(8, "c8.cf_c3", z3);
  c3.detail = "constant 3: z = " + fmt(z3);
  auto c12 = make(8, "c8.cf_c12_rejected", 10.0 / z12);
  c12.detail = "constant 12: z = " + fmt(z12) + " (needs > 10)";
  for (auto* x : {&a, &b, &c3, &c12}) {
    x->seconds = secs / 4.0;
    out.push_back(*x);
  }
  return out;
}

std::vector<CheckResult> criterion9(const VerifyConfig& cfg) {
  Stopwatch sw;
  const ModelParams p{16, 1};
  const Spectrum s = compute_spectrum(p);
  SampleRun exact = sample_many(s, default_tilt(p, Regime::Finite), budget(cfg, 4e5), derive_seed(cfg.seed, 900),
                                SampleKind::Magnetization);
  McmcOptions opt;
  opt.burn_in_sweeps = budget(cfg, 1e5, 1000);
  Rng rng(derive_seed(cfg.seed, 901));
  const McmcTrace tr = mcmc_run(p, budget(cfg, 2.5e6, 2000), opt, rng);
  std::vector<WeightedSample> chain;
  chain.reserve(tr.S.size());
  for (double v : tr.S) chain.push_back({v, 1.0});
  const double ess_s = effective_sample_size(tr.S);
  const double ks = ks_two_sample(weighted_ecdf(exact.samples), weighted_ecdf(chain));
  const double secs = sw.seconds();
  auto a = make(9, "c9.mcmc_ks", ks, 16, 1);
  const auto mom = weighted_moments(chain);
  a.mean = mom.mean;
  a.var = mom.var;
  a.acc_rate = tr.acceptance;
  a.detail = "steps=" + std::to_string(tr.S.size()) + " ess(S)=" + fmt(ess_s) + " exact accepted=" +
             std::to_string(exact.samples.size()) + " proposal scale " + fmt(tr.proposal_scale);
  auto e = make(9, "c9.mcmc_ess", budget(cfg, 1e5, 100) / ess_s, 16, 1);
  e.detail = "required ESS / achieved ESS";
  const double ess_t = effective_sample_size(tr.T);
  KahanSum<double> tm;
  for (double t : tr.T) tm += t;
  const double mt = tm.value() / static_cast<double>(tr.T.size());
  KahanSum<double> tv;
  for (double t : tr.T) tv += (t - mt) * (t - mt);
  const double se = std::sqrt(tv.value() / static_cast<double>(tr.T.size()) / ess_t);
  auto t = make(9, "c9.tn_mean", std::abs(mt - 1.0) / se, 16, 1);
  t.mean = mt;
  t.detail = "T_n mean " + fmt(mt) + " se " + fmt(se) + " ess " + fmt(ess_t);
  for (auto* x : {&a, &e, &t}) x->seconds = secs / 3.0;
  a.samples = std::move(chain);
  return {a, e, t};
}

std::vector<CheckResult> criterion10(const VerifyConfig& cfg) {
  Stopwatch sw;
  double orth = 0.0, mode = 0.0, ham = 0.0, two = 0.0;
  Rng rng(derive_seed(cfg.seed, 1000));
  std::normal_distribution<double> normal;
  for (long n : {8L, 64L, 512L}) {
    const Eigen::MatrixXd P = fourier_basis(n);
    orth = std::max(orth, (P.transpose() * P - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
    for (long r : {1L, 3L, (n - 1) / 2}) {
      const ModelParams p{n, r};
      const Spectrum s = compute_spectrum(p);
      for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd x(n);
        for (long i = 0; i < n; ++i) x(i) = normal(rng);
        const Eigen::VectorXd y = P * x;
        const double S = x.sum();
        const double H = hamiltonian(x, p);
        mode = std::max(mode, std::abs(y(n - 1) - S / std::sqrt(static_cast<double>(n))) / 1e-12);
        const double spectral = -0.5 * (s.alphas.array() * y.array().square()).sum();
        ham = std::max(ham, std::abs(H - spectral) / 1e-9);
        const double rest = -0.5 * (s.alphas.head(n - 1).array() * y.head(n - 1).array().square()).sum();
        two = std::max(two, std::abs(H - (-S * S / (2.0 * n) + rest)) / 1e-9);
      }
    }
  }
  const double secs = sw.seconds() / 4.0;
  std::vector<CheckResult> out{make(10, "c10.orthonormal", orth), make(10, "c10.mean_mode", mode),
                               make(10, "c10.hamiltonian", ham), make(10, "c10.two_term", two)};
  out[0].detail = "max |P^T P - I| over n in {8,64,512}";
  out[1].detail = "max |y_n - S/sqrt(n)| / 1e-12";
  out[2].detail = "max |H + 1/2 sum alpha_j y_j^2| / 1e-9";
  out[3].detail = "max |H + S^2/(2n) + 1/2 sum_{j<n} alpha_j y_j^2| / 1e-9";
  for (auto& c : out) c.seconds = secs;
  return out;
}

std::vector<CheckResult> criterion11(const VerifyConfig&) {
  Stopwatch sw;
  std::vector<CheckResult> out;
  double sum_ratio = 0.0, inv_ratio = 0.0;
  long beta_flags = 0, beta_checked = 0;
  for (int k = 6; k <= 16; ++k) {
    const long n = 1L << k;
    std::set<long> rs{1, 2, static_cast<long>(std::sqrt(static_cast<double>(n))), n / 8, n / 2 - 1};
    for (long r : rs) {
      if (r < 1 || 2 * r >= n) continue;
      const Spectrum s = compute_spectrum_fast({n, r});
      const double abs_sum = s.alphas.cwiseAbs().sum();
      const double nd = static_cast<double>(n);
      sum_ratio = std::max(sum_ratio, abs_sum / (2.0 * nd * std::log(nd) / r));
      const long lo = n / r + 1, hi = n - n / r - 1;
      double inv = 0.0;
      for (long j = lo; j <= hi; ++j) inv += std::abs(1.0 / s.beta(j) - 1.0);
      inv_ratio = std::max(inv_ratio, inv / (2.0 * abs_sum));
      if (r >= 32) {
        for (long j = 1; j <= n / (2 * r + 1); ++j) {
          ++beta_checked;
          if (s.beta(j) < static_cast<double>(r) * r * j * j / (nd * nd)) ++beta_flags;
        }
      }
    }
  }
  auto a = make(11, "c11.middle_sum", sum_ratio);
  a.detail = "max sum|alpha_j| / (2 n ln n / r); lower bound beta_j >= r^2 j^2/n^2 flagged at " +
             std::to_string(beta_flags) + " of " + std::to_string(beta_checked) + " points with r >= 32";
  out.push_back(a);
  auto b = make(11, "c11.middle_inverse", inv_ratio);
  b.detail = "max middle sum |1/beta_j - 1| / (2 sum |alpha_j|)";
  out.push_back(b);

  double kmin = kInf, kmax = 0.0;
  std::ostringstream d;
  for (int k = 10; k <= 16; ++k) {
    const long n = 1L << k;
    const long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
    const Spectrum s = compute_spectrum_fast({n, r});
    double K = 0.0;
    for (long j = 1; j <= n / 2; ++j) {
      const double jd = static_cast<double>(j), nd = static_cast<double>(n);
      K = std::max(K, spectrum_residual(s, j) / (1.0 / (r * jd * jd) + static_cast<double>(r) * r / (nd * nd)));
    }
    kmin = std::min(kmin, K);
    kmax = std::max(kmax, K);
    d << "K(2^" << k << ")=" << fmt(K) << " ";
  }
  auto c = make(11, "c11.asymp_K", kmax / kmin);
  c.detail = d.str() + "with r = floor(sqrt(n))";
  out.push_back(c);

  double lor = 0.0;
  for (double y : {1e2, 1e4, 1e6}) {
    const double gap = kPi / (2.0 * std::sqrt(y)) - lorentz_sum(y);
    const double bound = 1.0 / y + (kPi / 4.0) / std::pow(y, 1.5);
    lor = std::max(lor, gap < 0.0 ? kInf : gap / bound);
  }
  auto l = make(11, "c11.lorentz", lor);
  l.detail = "max gap / bound over y in {1e2, 1e4, 1e6}";
  out.push_back(l);

  double rect = 0.0;
  {
    Eigen::VectorXd g(11);
    for (int k = 0; k <= 10; ++k) g(k) = k / 10.0;
    const double actual = std::abs(rectangle_sum(g) - 0.5);
    rect = std::max(rect, std::abs(actual - rectangle_sum_bound(g, 1.0, 10)) / 1e-15);
    const Eigen::VectorXd c1 = Eigen::VectorXd::Constant(11, 3.0);
    rect = std::max(rect, std::abs(rectangle_sum(c1) - 3.0) > rectangle_sum_bound(c1, 0.0, 10) + 1e-15 ? kInf : 0.0);
    Eigen::VectorXd cs(101);
    for (int k = 0; k <= 100; ++k) cs(k) = std::cos(2.0 * kPi * k / 100.0);
    const double err = std::abs(rectangle_sum(cs));
    rect = std::max(rect, err > rectangle_sum_bound(cs, 2.0 * kPi, 100) ? kInf : 0.0);
  }
  auto rr = make(11, "c11.rectangle", rect);
  rr.detail = "linear case |error - K/(2n)| / 1e-15; constant and cosine cases within bound";
  out.push_back(rr);
  for (auto& x : out) x.seconds = sw.seconds() / static_cast<double>(out.size());
  return out;
}

std::vector<CheckResult> criterion12(const VerifyConfig& cfg) {
  Stopwatch sw;
  double worst = 0.0;
  std::ostringstream d;
  std::vector<WeightedSample> none;
  int cell = 0;
  for (double a : {0.55, 0.75, 0.9}) {
    std::vector<double> lx, ly;
    for (int k = 10; k <= 16; ++k) {
      const long n = 1L << k;
      long r = static_cast<long>(std::floor(std::pow(static_cast<double>(n), a)));
      r = std::min(r, (n - 1) / 2);
      const ModelParams p{n, r};
      const Spectrum s = compute_spectrum_fast(p);
      const TiltPlan plan = a < 0.75 ? default_tilt(p, Regime::Intermediate) : TiltPlan{};
      SampleRun run = sample_many(s, plan, budget(cfg, 2e4, 200), derive_seed(cfg.seed, 1200 + cell++),
                                  SampleKind::Magnetization);
      if (run.samples.empty()) throw EmptyInput("c12: no accepted proposals");
      const auto mom = weighted_moments(run.samples);
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(0.5 * std::log(mom.var));
    }
    const double bhat = ols_slope(lx, ly);
    const double b = std::min(0.5 + a / 3.0, 0.75);
    worst = std::max(worst, std::abs(bhat - b));
    d << "a=" << a << " b_hat=" << fmt(bhat) << " b=" << fmt(b) << " ";
  }
  auto c = make(12, "c12.exponent", worst);
  c.detail = d.str();
  c.seconds = sw.seconds();
  return {c};
}

}  // namespace

VerifyConfig VerifyConfig::from_map(const ConfigMap& m) {
  VerifyConfig c;
  if (auto it = m.find("seed"); it != m.end()) c.seed = std::stoull(it->second);
  if (auto it = m.find("budget"); it != m.end()) c.budget = std::stod(it->second);
  if (auto it = m.find("record_timing"); it != m.end()) c.record_timing = it->second == "true" || it->second == "1";
  if (!(c.budget > 0.0)) throw DomainError("budget must be positive");
  return c;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "algebra") return {1, 2, 10, 11};
  if (suite == "cf") return {3, 4};
  if (suite == "regimes") return {5, 6, 7, 8, 9, 12};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  throw DomainError("unknown suite '" + suite + "' (expected algebra, cf, regimes or all)");
}

std::vector<CheckResult> run_criterion(int k, const VerifyConfig& cfg) {
  switch (k) {
    case 1: return criterion1(cfg);
    case 2: return criterion2(cfg);
    case 3: return criterion3(cfg);
    case 4: return criterion4(cfg);
    case 5: return criterion5(cfg);
    case 6: return criterion6(cfg);
    case 7: return criterion7(cfg);
    case 8: return criterion8(cfg);
    case 9: return criterion9(cfg);
    case 10: return criterion10(cfg);
    case 11: return criterion11(cfg);
    case 12: return criterion12(cfg);
    default: throw DomainError("no criterion " + std::to_string(k));
  }
}

std::map<std::string, double> check_tolerances() { return tolerance_table(); }

Report to_report(const std::vector<CheckResult>& checks, const VerifyConfig& cfg) {
  Report rep;
  for (const auto& c : checks) {
    ReportRow row;
    row.n = c.n;
    row.r = c.r;
    row.regime = c.name;
    row.ks = c.stat;
    row.mean = c.mean;
    row.var = c.var;
    row.acc_rate = c.acc_rate;
    row.seconds = cfg.record_timing ? c.seconds : 0.0;
    row.seed = cfg.seed;
    if (c.name.ends_with(".error"))
      row.verdict = "error: " + c.detail;
    else
      row.verdict = c.pass() ? "pass" : "fail";
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyConfig& cfg, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<CheckResult> all;
  for (int k : suite_criteria(suite)) {
    try {
      auto part = run_criterion(k, cfg);
      for (auto& c : part) all.push_back(std::move(c));
    } catch (const std::exception& e) {
      CheckResult c;
      c.criterion = k;
      c.name = "c" + std::to_string(k) + ".error";
      c.stat = kInf;
      c.tol = 0.0;
      c.detail = e.what();
      all.push_back(c);
    }
  }
  const Report rep = to_report(all, cfg);
  write_text(dir + "/report.csv", emit_report(rep, "csv"));
  write_text(dir + "/report.json", emit_report(rep, "json"));
  for (const auto& c : all) {
    if (c.samples.empty()) continue;
    std::ostringstream s;
    s << "value,weight\n";
    for (const auto& w : c.samples) s << format_double(w.value) << ',' << format_double(w.weight) << '\n';
    write_text(dir + "/samples_" + c.name + ".csv", s.str());
  }
  if (cfg.record_timing) {
    std::ostringstream t;
    t << "check,seconds\n";
    for (const auto& c : all) t << c.name << ',' << format_double(c.seconds) << '\n';
    write_text(dir + "/timing.csv", t.str());
  }
  return all;
}

}  // namespace soc
