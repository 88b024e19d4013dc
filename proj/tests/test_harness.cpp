#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdlib>

#include "socchain/errors.hpp"
#include "socchain/harness.hpp"
#include "socchain/stats.hpp"

using namespace soc;

namespace {

void check_same(const Report& a, const Report& b) {
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const auto &x = a.rows[k], &y = b.rows[k];
    CHECK(x.n == y.n);
    CHECK(x.r == y.r);
    CHECK(x.regime == y.regime);
    CHECK(std::bit_cast<std::uint64_t>(x.ks) == std::bit_cast<std::uint64_t>(y.ks));
    CHECK(x.mean == y.mean);
    CHECK(x.var == y.var);
    CHECK(x.acc_rate == y.acc_rate);
    CHECK(x.seconds == y.seconds);
    CHECK(x.seed == y.seed);
    CHECK(x.verdict == y.verdict);
  }
}

Report sample_report() {
  Report rep;
  rep.rows.push_back({4096, 2047, "long", 0.0123456789012345, -1e-3, 1.0000001, 0.5, 0.0, 42, "pass"});
  rep.rows.push_back({64, 1, "finite", 0.25, 3.5e-17, 2.4, 1.0 / 3.0, 1.25, 18446744073709551615ull, "fail"});
  rep.rows.push_back({16, 1, "finite", std::nan(""), 0.0, 0.0, 0.0, 0.0, 7, "error: samples must be positive, got 0"});
  return rep;
}

}  // namespace

TEST_CASE("weighted ECDF") {
  const auto one = weighted_ecdf({{2.0, 5.0}});
  CHECK(one(1.999) == 0.0);
  CHECK(one(2.0) == 1.0);
  const auto two = weighted_ecdf({{0.0, 1.0}, {1.0, 3.0}});
  CHECK(two(0.0) == doctest::Approx(0.25));
  CHECK(two(0.5) == doctest::Approx(0.25));
  CHECK(two(1.0) == 1.0);
  std::vector<WeightedSample> eq;
  for (double v : {3.0, 1.0, 2.0, 2.0}) eq.push_back({v, 1.0});
  const auto e = weighted_ecdf(eq);
  CHECK(e(1.0) == doctest::Approx(0.25));
  CHECK(e(2.0) == doctest::Approx(0.75));
  CHECK(e.jumps() == 3);
  CHECK_THROWS_AS(weighted_ecdf({}), EmptyInput);
  CHECK_THROWS_AS(weighted_ecdf({{1.0, 0.0}}), DomainError);
}

TEST_CASE("KS distances") {
  auto unif = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_distance(weighted_ecdf({{0.5, 1.0}}), unif) == doctest::Approx(0.5));
  const auto a = weighted_ecdf({{0.1, 1.0}, {0.7, 2.0}});
  CHECK(ks_two_sample(a, a) == 0.0);
  CHECK(ks_two_sample(a, weighted_ecdf({{0.1, 2.0}, {0.7, 4.0}})) == 0.0);
  CHECK(ks_two_sample(a, weighted_ecdf({{0.7, 1.0}})) == doctest::Approx(1.0 / 3.0));
  Rng rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<WeightedSample> s;
  for (int k = 0; k < 100000; ++k) s.push_back({u(rng), 1.0});
  // expected size ~ 0.87 / sqrt(N)
  CHECK(ks_distance(weighted_ecdf(s), unif) < 1.63 / std::sqrt(1e5));
}

TEST_CASE("weighted moments") {
  const auto m = weighted_moments({{1.0, 1.0}, {3.0, 1.0}});
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.var == doctest::Approx(1.0));
  CHECK(m.ess == doctest::Approx(2.0));
  const auto w = weighted_moments({{0.0, 1.0}, {4.0, 3.0}});
  CHECK(w.mean == doctest::Approx(3.0));
  CHECK(w.ess == doctest::Approx(16.0 / 10.0));
  CHECK_THROWS_AS(weighted_moments({}), EmptyInput);
}

TEST_CASE("effective sample size of an AR(1) series") {
  Rng rng(2);
  std::normal_distribution<double> g;
  const double rho = 0.8;
  std::vector<double> x(200000);
  double v = 0.0;
  for (auto& e : x) e = v = rho * v + std::sqrt(1 - rho * rho) * g(rng);
  const double want = x.size() * (1 - rho) / (1 + rho);
  CHECK(effective_sample_size(x) == doctest::Approx(want).epsilon(0.1));
  std::vector<double> iid(50000);
  for (auto& e : iid) e = g(rng);
  CHECK(effective_sample_size(iid) == doctest::Approx(50000.0).epsilon(0.1));
}

TEST_CASE("OLS slope") {
  CHECK(ols_slope({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(2.0));
  CHECK_THROWS(ols_slope({1.0}, {2.0}));
}

TEST_CASE("config parsing") {
  const ConfigMap m = parse_config("# comment\nregime = finite\n n=64,128 # trailing\nr=const:1\nsamples=5000\n"
                                   "seed=9\ntol.finite=0.2\n");
  CHECK(m.at("regime") == "finite");
  CHECK(m.at("n") == "64,128");
  const ExperimentConfig c = ExperimentConfig::from_map(m);
  CHECK(c.regime == Regime::Finite);
  CHECK(c.n_list == std::vector<long>{64, 128});
  CHECK(c.samples == 5000);
  CHECK(c.seed == 9);
  CHECK(c.tolerances.at("finite") == 0.2);
  CHECK(c.tolerances.at("ks") == 0.05);
  CHECK_FALSE(c.record_timing);
  CHECK_THROWS_AS(parse_config("novalue\n"), DomainError);
  CHECK_THROWS_AS(ExperimentConfig::from_map({{"regime", "sideways"}}), UnknownRegime);
  CHECK_THROWS_AS(load_config("/nonexistent/socchain.cfg"), IOError);
}

TEST_CASE("r rules") {
  CHECK(resolve_r("half", 4096) == 2047);
  CHECK(resolve_r("half", 101) == 50);
  CHECK(resolve_r("const:3", 64) == 3);
  CHECK(resolve_r("pow:1:0.75", 4096) == 512);
  CHECK(resolve_r("pow:1:0.6", 65536) == 776);
  CHECK_THROWS_AS(resolve_r("const:32", 64), RangeError);
  CHECK_THROWS_AS(resolve_r("log", 64), DomainError);
}

TEST_CASE("verdicts are pure functions of the row") {
  ReportRow row{64, 1, "finite", 0.04, 0, 0, 0, 0, 1, ""};
  CHECK(recompute_verdict(row, {{"ks", 0.05}}) == "pass");
  CHECK(recompute_verdict(row, {{"ks", 0.05}, {"finite", 0.03}}) == "fail");
  row.ks = std::nan("");
  CHECK(recompute_verdict(row, {{"ks", 0.05}}) == "fail");
  row.verdict = "error: boom";
  CHECK(recompute_verdict(row, {{"ks", 0.05}}) == "error: boom");
}

TEST_CASE("report serialization") {
  CHECK(emit_report({}, "csv") == "n,r,regime,ks,mean,var,acc_rate,seconds,seed,verdict\n");
  const Report rep = sample_report();
  for (const char* fmt : {"csv", "json"}) {
    const std::string text = emit_report(rep, fmt);
    check_same(parse_report(text, fmt), rep);
    CHECK(emit_report(parse_report(text, fmt), fmt) == text);
  }
  CHECK_THROWS(emit_report(rep, "xml"));
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("limit scales and CDFs") {
  const LimitLaw l = limit_for_regime(Regime::Long);
  CHECK(limit_scale(l, 4096, 2047) == doctest::Approx(512.0));
  const LimitLaw i = limit_for_regime(Regime::Intermediate);
  CHECK(limit_scale(i, 65536, 776) == doctest::Approx(std::cbrt(776.0) * 256.0));
  const auto cdf = limit_cdf(limit_for_regime(Regime::Finite, 1));
  CHECK(cdf(0.0) == doctest::Approx(0.5));
  const auto tc = limit_cdf(limit_for_regime(Regime::Threshold, 1.0));
  CHECK(tc(0.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(tc(-10.0) == 0.0);
  CHECK(tc(10.0) == 1.0);
}

TEST_CASE("experiments in the long and finite ranges") {
  ExperimentConfig c;
  c.regime = Regime::Long;
  c.n_list = {4096};
  c.r_rule = "half";
  c.samples = 200000;
  c.seed = 42;
  c.tolerances = {{"ks", 0.02}};
  const Report a = run_experiment(c);
  REQUIRE(a.rows.size() == 1);
  CHECK(a.rows[0].verdict == "pass");
  CHECK(a.rows[0].seconds == 0.0);

  ExperimentConfig f = c;
  f.regime = Regime::Finite;
  f.r_rule = "const:1";
  const Report b = run_experiment(f);
  CHECK(std::abs(b.rows[0].var / (std::sqrt(2.0) + 1.0) - 1.0) < 0.05);
}

TEST_CASE("experiment errors are recorded per row") {
  ExperimentConfig c;
  c.regime = Regime::Long;
  c.n_list = {64, 128};
  c.samples = 0;
  const Report rep = run_experiment(c);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) CHECK(row.verdict.rfind("error: ", 0) == 0);
  CHECK(emit_report(rep, "csv").find("samples must be positive") != std::string::npos);
}

TEST_CASE("experiment reports are reproducible across worker counts") {
  ExperimentConfig c;
  c.regime = Regime::Threshold;
  c.n_list = {256, 1024};
  c.r_rule = "pow:1:0.75";
  c.samples = 3 * kBatchSize + 5;
  c.seed = 17;
  c.tolerances = {{"ks", 1.0}};
  setenv("SOCCHAIN_THREADS", "1", 1);
  const std::string one = emit_report(run_experiment(c), "csv");
  setenv("SOCCHAIN_THREADS", "4", 1);
  const std::string four = emit_report(run_experiment(c), "csv");
  unsetenv("SOCCHAIN_THREADS");
  CHECK(one == four);
}
