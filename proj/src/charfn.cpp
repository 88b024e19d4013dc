#include "socchain/charfn.hpp"

#include <cmath>
#include <sstream>

#include "socchain/errors.hpp"
#include "socchain/numerics.hpp"

namespace soc {

cplx principal_log(cplx z) {
  const double x = z.real(), y = z.imag();
  if (y == 0.0 && x <= 0.0) {
    std::ostringstream msg;
    msg << "principal_log: argument " << x << " lies on the branch cut";
    throw BranchError(msg.str());
  }
  const double m = std::hypot(x, y);
  return {std::log(m), 2.0 * std::atan(y / (x + m))};
}

cplx principal_log1p(cplx w) {
  const double a = w.real(), b = w.imag();
  const double x = 1.0 + a;
  if (b == 0.0 && x <= 0.0) throw BranchError("principal_log1p: argument on the branch cut");
  const double m = std::hypot(x, b);
  return {0.5 * std::log1p(2.0 * a + a * a + b * b), 2.0 * std::atan(b / (x + m))};
}

bool in_domain(const Spectrum& s, cplx u) { return 2.0 * u.imag() < s.min_beta(); }

namespace {

void require_domain(const Spectrum& s, cplx u) {
  if (!in_domain(s, u)) {
    std::ostringstream msg;
    msg << "u = " << u << " lies outside the domain 2 Im u < " << s.min_beta();
    throw DomainError(msg.str());
  }
}

// Sums f(beta_j) over j = 1..n-1 using beta_j = beta_{n-j}.
template <typename F>
cplx symmetric_sum(const Spectrum& s, F&& f) {
  const long n = s.n();
  KahanSum<cplx> acc;
  for (long j = 1; 2 * j < n; ++j) acc += 2.0 * f(s.betas(j - 1));
  if (n % 2 == 0) acc += f(s.betas(n / 2 - 1));
  return acc.value();
}

}  // namespace

cplx phi_sum(const Spectrum& s, cplx u) {
  require_domain(s, u);
  const cplx iu2(-2.0 * u.imag(), 2.0 * u.real());
  return -0.5 * symmetric_sum(s, [&](double b) { return principal_log1p(iu2 / b); });
}

cplx phi_n(const Spectrum& s, cplx u) {
  return cplx(0.0, 1.0) * u * static_cast<double>(s.n()) + phi_sum(s, u);
}

cplx phi_deriv(const Spectrum& s, cplx u, int order) {
  if (order < 1 || order > 3) throw OrderError("phi_deriv: order must be 1, 2 or 3");
  require_domain(s, u);
  const cplx I(0.0, 1.0);
  const cplx two_iu = 2.0 * I * u;
  switch (order) {
    case 1:
      return I * static_cast<double>(s.n()) -
             I * symmetric_sum(s, [&](double b) { return 1.0 / (b + two_iu); });
    case 2:
      return -2.0 * symmetric_sum(s, [&](double b) {
        const cplx q = 1.0 / (b + two_iu);
        return q * q;
      });
    default:
      return 8.0 * I * symmetric_sum(s, [&](double b) {
        const cplx q = 1.0 / (b + two_iu);
        return q * q * q;
      });
  }
}

cplx cf_aux(const Spectrum& s, double u) { return std::exp(phi_n(s, cplx(u, 0.0))); }

double cf_modulus(const Spectrum& s, double u) {
  const cplx lg = symmetric_sum(s, [&](double b) { return cplx(std::log1p(4.0 * u * u / (b * b)), 0.0); });
  return std::exp(-0.25 * lg.real());
}

}  // namespace soc
