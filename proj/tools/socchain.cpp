#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "socchain/charfn.hpp"
#include "socchain/density.hpp"
#include "socchain/errors.hpp"
#include "socchain/harness.hpp"
#include "socchain/limits.hpp"
#include "socchain/model.hpp"
#include "socchain/samplers.hpp"
#include "socchain/verify.hpp"

using namespace soc;

namespace {

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw DomainError("grid must look like a:b:k");
  const double a = std::stod(parts[0]), b = std::stod(parts[1]);
  const long k = std::stol(parts[2]);
  if (k < 1) throw DomainError("grid needs at least one point");
  std::vector<double> xs;
  for (long i = 0; i < k; ++i) xs.push_back(k == 1 ? a : a + (b - a) * static_cast<double>(i) / (k - 1));
  return xs;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian spin chain with self-adjusted temperature: spectra, densities, samplers, checks"};
  app.require_subcommand(1);

  long n = 0, r = 0;
  std::string out;

  auto* spec = app.add_subcommand("spectrum", "write j,alpha,beta");
  spec->add_option("--n", n)->required();
  spec->add_option("--r", r)->required();
  spec->add_option("--out", out)->required();
  bool fast = false;
  spec->add_flag("--fast", fast, "use the O(n) closed-form build");

  double u_min = -1.0, u_max = 1.0;
  long points = 101;
  auto* cf = app.add_subcommand("charfn", "write u,re_phi,im_phi,re_cf,im_cf");
  cf->add_option("--n", n)->required();
  cf->add_option("--r", r)->required();
  cf->add_option("--u-min", u_min);
  cf->add_option("--u-max", u_max);
  cf->add_option("--points", points);
  cf->add_option("--out", out)->required();

  std::string regime = "finite", grid;
  auto* dens = app.add_subcommand("density", "write x,density,normalized for (n - A_n)/w");
  dens->add_option("--n", n)->required();
  dens->add_option("--r", r)->required();
  dens->add_option("--regime", regime);
  dens->add_option("--grid", grid)->required();
  dens->add_option("--out", out)->required();

  double lambda = 1.0;
  auto* lim = app.add_subcommand("limits", "write x,pdf of a limit law");
  lim->add_option("--regime", regime)->required();
  lim->add_option("--lambda", lambda);
  lim->add_option("--r", r);
  lim->add_option("--grid", grid)->required();
  lim->add_option("--out", out)->required();

  std::string method = "tilted";
  long samples = 10000;
  std::uint64_t seed = 1;
  auto* smp = app.add_subcommand("sample", "write value,weight draws of S_n");
  smp->add_option("--n", n)->required();
  smp->add_option("--r", r)->required();
  smp->add_option("--method", method)->check(CLI::IsMember({"exact", "tilted", "mcmc"}));
  smp->add_option("--regime", regime, "selects the tilt for --method tilted");
  smp->add_option("--samples", samples);
  smp->add_option("--seed", seed);
  smp->add_option("--out", out)->required();

  std::string suite = "all", config;
  double budget = 0.0;
  bool timing = false;
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("--suite", suite)->check(CLI::IsMember({"algebra", "cf", "regimes", "all"}));
  ver->add_option("--config", config);
  ver->add_option("--seed", seed)->required();
  ver->add_option("--budget", budget, "Monte Carlo budget multiplier");
  ver->add_flag("--record-timing", timing);
  ver->add_option("--out", out)->required();

  auto* exp = app.add_subcommand("experiment", "run a regime experiment from a config file");
  exp->add_option("--config", config)->required();
  exp->add_option("--out", out)->required();
  exp->add_flag("--record-timing", timing);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spec) {
      const ModelParams p = validate_params(n, r);
      const Spectrum s = fast ? compute_spectrum_fast(p) : compute_spectrum(p);
      std::ostringstream o;
      o << "j,alpha,beta\n";
      for (long j = 1; j <= n; ++j) o << j << ',' << g17(s.alpha(j)) << ',' << g17(j < n ? s.beta(j) : 0.0) << '\n';
      write_text(out, o.str());
    } else if (*cf) {
      const Spectrum s = compute_spectrum(validate_params(n, r));
      std::ostringstream o;
      o << "u,re_phi,im_phi,re_cf,im_cf\n";
      for (double u : parse_grid(g17(u_min) + ":" + g17(u_max) + ":" + std::to_string(points))) {
        const cplx ph = phi_n(s, cplx(u, 0.0));
        const cplx c = std::exp(ph);
        o << g17(u) << ',' << g17(ph.real()) << ',' << g17(ph.imag()) << ',' << g17(c.real()) << ','
          << g17(c.imag()) << '\n';
      }
      write_text(out, o.str());
    } else if (*dens) {
      const ModelParams p = validate_params(n, r);
      const Spectrum s = compute_spectrum(p);
      const TiltPlan plan = default_tilt(p, parse_regime(regime));
      const DensityGrid d = conditional_density_grid(s, plan, parse_grid(grid));
      std::ostringstream o;
      o << "x,density,normalized\n";
      for (std::size_t i = 0; i < d.x.size(); ++i)
        o << g17(d.x[i]) << ',' << g17(d.density[i]) << ',' << g17(d.normalized[i]) << '\n';
      write_text(out, o.str());
      if (d.clamped > 0) std::cerr << d.clamped << " negative values clamped to zero\n";
    } else if (*lim) {
      const Regime g = parse_regime(regime);
      const LimitLaw law = limit_for_regime(g, g == Regime::Finite ? static_cast<double>(std::max(1L, r)) : lambda);
      std::ostringstream o;
      o << "x,pdf\n";
      for (double x : parse_grid(grid)) o << g17(x) << ',' << g17(limit_pdf(law, x)) << '\n';
      write_text(out, o.str());
    } else if (*smp) {
      const ModelParams p = validate_params(n, r);
      std::ostringstream o;
      o << "value,weight\n";
      if (method == "mcmc") {
        Rng rng(seed);
        const McmcTrace tr = mcmc_run(p, samples, McmcOptions{}, rng);
        for (double v : tr.S) o << g17(v) << ",1\n";
      } else {
        const Spectrum s = compute_spectrum(p);
        const TiltPlan plan = method == "exact" ? TiltPlan{} : default_tilt(p, parse_regime(regime));
        const SampleRun run = sample_many(s, plan, samples, seed, SampleKind::Magnetization);
        for (const auto& w : run.samples) o << g17(w.value) << ',' << g17(w.weight) << '\n';
        std::cerr << run.samples.size() << " of " << samples << " proposals accepted\n";
      }
      write_text(out, o.str());
    } else if (*ver) {
      VerifyConfig vc;
      if (!config.empty()) vc = VerifyConfig::from_map(load_config(config));
      vc.seed = seed;
      if (budget > 0.0) vc.budget = budget;
      if (timing) vc.record_timing = true;
      const auto checks = run_suite(suite, vc, out);
      bool ok = true;
      for (const auto& c : checks) {
        std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << "  stat=" << c.stat << " tol=" << c.tol << "  "
                  << c.detail << '\n';
        ok = ok && c.pass();
      }
      return ok ? 0 : 1;
    } else if (*exp) {
      ExperimentConfig ec = ExperimentConfig::from_map(load_config(config));
      if (timing) ec.record_timing = true;
      const Report rep = run_experiment(ec);
      write_text(out, emit_report(rep, out.ends_with(".json") ? "json" : "csv"));
      for (const auto& row : rep.rows)
        if (row.verdict != "pass") return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
