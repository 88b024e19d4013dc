#include "socchain/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "socchain/errors.hpp"
#include "socchain/numerics.hpp"

namespace soc {

AuxSampler::AuxSampler(const Spectrum& s, const TiltPlan& plan) : n_(s.n()) {
  validate_plan(plan);
  kappa_ = plan.kappa();
  KahanSum<double> ln;
  for (long j = 1; 2 * j < n_; ++j) {
    const double b = s.beta(j), c = b + 2.0 * kappa_;
    pair_scale_.push_back(2.0 / c);
    ln += std::log(b / c);  // two factors of 1/2 log(b/c)
  }
  if (n_ % 2 == 0) {
    const double b = s.beta(n_ / 2), c = b + 2.0 * kappa_;
    middle_scale_ = 1.0 / c;
    ln += 0.5 * std::log(b / c);
  }
  log_norm_ = ln.value();
}

AuxDraw AuxSampler::draw(Rng& rng) const {
  std::exponential_distribution<double> expo(1.0);
  double A = 0.0;
  // Z_j^2 + Z_{n-j}^2 is 2 Exp(1) / c_j.
  for (double sc : pair_scale_) A += sc * expo(rng);
  if (middle_scale_ > 0.0) {
    std::normal_distribution<double> normal;
    const double z = normal(rng);
    A += middle_scale_ * z * z;
  }
  return {A, log_norm_ + kappa_ * A, A < static_cast<double>(n_)};
}

std::pair<double, bool> sample_aux(const Spectrum& s, Rng& rng) {
  const AuxDraw d = AuxSampler(s).draw(rng);
  return {d.A, d.accepted};
}

WeightedSample sample_aux_tilted(const Spectrum& s, const TiltPlan& plan, Rng& rng) {
  const AuxSampler aux(s, plan);
  const AuxDraw d = aux.draw(rng);
  return {d.A, std::exp(aux.kappa() * (d.A - static_cast<double>(s.n())))};
}

double sample_tn(long n, Rng& rng) {
  if (n < 1) throw RangeError("sample_tn: n must be at least 1");
  // A sum of n squared standard normals is Gamma(n/2, 2).
  std::gamma_distribution<double> chi2(0.5 * static_cast<double>(n), 2.0);
  return chi2(rng) / static_cast<double>(n);
}

std::optional<WeightedSample> sample_self_normalized(const AuxSampler& aux, Rng& rng, Rng& sign_rng) {
  const AuxDraw d = aux.draw(rng);
  const bool plus = (sign_rng() >> 63) != 0;
  if (!d.accepted) return std::nullopt;
  const double n = static_cast<double>(aux.n());
  const double m = std::sqrt(n * (n - d.A));
  if (!(m > 0.0)) return std::nullopt;
  return WeightedSample{plus ? m : -m, std::exp(aux.kappa() * (d.A - n)) / m};
}

std::optional<WeightedSample> sample_magnetization(const AuxSampler& aux, Rng& rng, Rng& sign_rng, Rng& tn_rng) {
  auto ws = sample_self_normalized(aux, rng, sign_rng);
  const double t = sample_tn(aux.n(), tn_rng);
  if (ws) ws->value *= std::sqrt(t);
  return ws;
}

BatchStreams::BatchStreams(std::uint64_t master, std::uint64_t batch)
    : a(derive_seed(master, batch, 1)), sign(derive_seed(master, batch, 2)), tn(derive_seed(master, batch, 3)) {}

int worker_count() {
  if (const char* env = std::getenv("SOCCHAIN_THREADS")) {
    try {
      const int k = std::stoi(env);
      if (k >= 1) return k;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(long count, const std::function<void(long)>& body) {
  const int workers = static_cast<int>(std::min<long>(worker_count(), count));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SampleRun sample_many(const Spectrum& s, const TiltPlan& plan, long proposals, std::uint64_t seed, SampleKind kind) {
  if (proposals < 1) throw EmptyInput("sample_many: need at least one proposal");
  const AuxSampler aux(s, plan);
  const double n = static_cast<double>(s.n());
  const long batches = (proposals + kBatchSize - 1) / kBatchSize;
  std::vector<std::vector<WeightedSample>> out(batches);
  std::vector<double> tilt_mass(batches, 0.0);
  parallel_for(batches, [&](long b) {
    BatchStreams st(seed, static_cast<std::uint64_t>(b));
    const long count = std::min(kBatchSize, proposals - b * kBatchSize);
    KahanSum<double> mass;
    for (long k = 0; k < count; ++k) {
      const AuxDraw d = aux.draw(st.a);
      if (kind == SampleKind::Aux) {
        if (!d.accepted) continue;
        const double w = std::exp(aux.kappa() * (d.A - n));
        mass += w;
        out[b].push_back({n - d.A, w});
        continue;
      }
      const bool plus = (st.sign() >> 63) != 0;
      const double t = kind == SampleKind::Magnetization ? sample_tn(s.n(), st.tn) : 1.0;
      if (!d.accepted) continue;
      const double w = std::exp(aux.kappa() * (d.A - n));
      mass += w;
      const double m = std::sqrt(n * (n - d.A));
      if (!(m > 0.0)) continue;
      out[b].push_back({(plus ? m : -m) * std::sqrt(t), w / m});
    }
    tilt_mass[b] = mass.value();
  });
  SampleRun run;
  run.proposals = proposals;
  KahanSum<double> mass;
  for (long b = 0; b < batches; ++b) {
    run.samples.insert(run.samples.end(), out[b].begin(), out[b].end());
    mass += tilt_mass[b];
  }
  run.log_acceptance = aux.log_normalizer() + aux.kappa() * n + std::log(mass.value() / static_cast<double>(proposals));
  return run;
}

Eigen::MatrixXd fourier_basis(long n) {
  if (n < 3) throw RangeError("fourier_basis: n must be at least 3");
  Eigen::MatrixXd P(n, n);
  const double nd = static_cast<double>(n);
  const double c = std::sqrt(2.0 / nd);
  for (long k = 0; k < n; ++k) {
    for (long j = 1; 2 * j < n; ++j) {
      // Exact reduction of j k modulo n keeps the angle small.
      const double ang = 2.0 * kPi * static_cast<double>((j * k) % n) / nd;
      P(j - 1, k) = c * std::cos(ang);
      P(n - j - 1, k) = c * std::sin(ang);
    }
    if (n % 2 == 0) P(n / 2 - 1, k) = (k % 2 == 0 ? 1.0 : -1.0) / std::sqrt(nd);
    P(n - 1, k) = 1.0 / std::sqrt(nd);
  }
  return P;
}

double hamiltonian(const Eigen::VectorXd& x, const ModelParams& p) {
  const long n = x.size();
  KahanSum<double> acc;
  for (long i = 0; i < n; ++i) {
    double row = 0.0;
    for (long d = 1; d <= p.r; ++d) row += x((i + d) % n);
    acc += x(i) * row;
  }
  return -acc.value() / (2.0 * static_cast<double>(p.r));
}

double hamiltonian(const SpinConfig& c, const ModelParams& p) { return hamiltonian(c.x, p); }

SpinConfig SpinConfig::from(const Eigen::VectorXd& x, const ModelParams& p) {
  SpinConfig c;
  c.x = x;
  c.refresh(p);
  return c;
}

void SpinConfig::refresh(const ModelParams& p) {
  const long n = x.size();
  nbr.setZero(n);
  for (long i = 0; i < n; ++i)
    for (long d = 1; d <= p.r; ++d) nbr(i) += x((i + d) % n) + x((i - d % n + n) % n);
  S = x.sum();
  Q = x.squaredNorm();
  H = -x.dot(nbr) / (4.0 * static_cast<double>(p.r));
}

void SpinConfig::update(const ModelParams& p, long i, double v) {
  const long n = x.size();
  const double dx = v - x(i);
  H += -dx * nbr(i) / (2.0 * static_cast<double>(p.r));
  S += dx;
  Q += v * v - x(i) * x(i);
  for (long d = 1; d <= p.r; ++d) {
    nbr((i + d) % n) += dx;
    nbr((i - d % n + n) % n) += dx;
  }
  x(i) = v;
}

double delta_hamiltonian(const SpinConfig& c, const ModelParams& p, long i, double v) {
  if (i < 1 || i > c.x.size()) throw IndexError("delta_hamiltonian: site index out of range");
  return -(v - c.x(i - 1)) * c.nbr(i - 1) / (2.0 * static_cast<double>(p.r));
}

double log_target(double H, double Q, long n) {
  if (!(Q > 0.0)) return -std::numeric_limits<double>::infinity();
  return -H * static_cast<double>(n) / Q - 0.5 * Q;
}

double metropolis_accept(double log_a, double log_b) {
  const double d = log_b - log_a;
  return d >= 0.0 ? 1.0 : std::exp(d);
}

McmcTrace mcmc_run(const ModelParams& p0, long steps, const McmcOptions& opt, Rng& rng) {
  const ModelParams p = validate_params(p0.n, p0.r);
  if (steps < 1) throw RangeError("mcmc_run: steps must be at least 1");
  if (!(opt.proposal_scale > 0.0)) throw DomainError("mcmc_run: proposal scale must be positive");
  const long n = p.n;
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  std::uniform_int_distribution<long> site(0, n - 1);

  Eigen::VectorXd x0(n);
  for (long i = 0; i < n; ++i) x0(i) = normal(rng);
  SpinConfig c = SpinConfig::from(x0, p);
  double scale = opt.proposal_scale;
  long accepted = 0, proposed = 0;

  auto sweep = [&] {
    for (long k = 0; k < n; ++k) {
      const long i = site(rng);
      const double v = c.x(i) + scale * normal(rng);
      const double dH = -(v - c.x(i)) * c.nbr(i) / (2.0 * static_cast<double>(p.r));
      const double Qn = c.Q + v * v - c.x(i) * c.x(i);
      const double la = log_target(c.H, c.Q, n), lb = log_target(c.H + dH, Qn, n);
      ++proposed;
      if (unif(rng) < metropolis_accept(la, lb)) {
        c.update(p, i, v);
        ++accepted;
      }
    }
  };

  double factor = 2.0;
  int last_dir = 0;
  for (long b = 0; b < opt.burn_in_sweeps; ++b) {
    sweep();
    if ((b + 1) % opt.refresh_every == 0) c.refresh(p);
    if (opt.adapt && (b + 1) % 100 == 0) {
      const double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
      int dir = rate < 0.25 ? -1 : (rate > 0.45 ? 1 : 0);
      if (dir != 0) {
        if (last_dir != 0 && dir != last_dir) factor = std::sqrt(factor);
        scale = dir > 0 ? scale * factor : scale / factor;
        last_dir = dir;
      }
      accepted = proposed = 0;
    }
  }
  c.refresh(p);
  accepted = proposed = 0;

  McmcTrace tr;
  tr.S.reserve(steps);
  tr.T.reserve(steps);
  tr.H.reserve(steps);
  long sweeps = 0;
  for (long s = 0; s < steps; ++s) {
    for (long t = 0; t < std::max(1L, opt.thin); ++t) {
      sweep();
      if (++sweeps % opt.refresh_every == 0) c.refresh(p);
    }
    tr.S.push_back(c.S);
    tr.T.push_back(c.Q / static_cast<double>(n));
    tr.H.push_back(c.H);
  }
  tr.acceptance = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  tr.proposal_scale = scale;
  return tr;
}

}  // namespace soc
