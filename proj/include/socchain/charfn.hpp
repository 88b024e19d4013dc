#pragma once

#include <complex>

#include "socchain/model.hpp"

namespace soc {

using cplx = std::complex<double>;

struct PhasePoint {
  cplx u;
  cplx value;
};

/// 1/2 ln(x^2+y^2) + 2i atan(y / (x + |z|)). Throws BranchError on (-inf, 0].
cplx principal_log(cplx z);

/// principal_log(1 + w), accurate for small |w|.
cplx principal_log1p(cplx w);

/// True when 2 Im(u) < min beta_j.
bool in_domain(const Spectrum& s, cplx u);

/// Log-characteristic function of n - A_n.
cplx phi_n(const Spectrum& s, cplx u);

/// phi_n(u) - i u n, i.e. the sum part alone; useful when u n is large.
cplx phi_sum(const Spectrum& s, cplx u);

/// Analytic derivative of phi_n of order 1, 2 or 3.
cplx phi_deriv(const Spectrum& s, cplx u, int order);

/// exp(phi_n(u)) for real u.
cplx cf_aux(const Spectrum& s, double u);

/// |cf_aux(u)| computed as prod (1 + 4u^2/beta_j^2)^(-1/4).
double cf_modulus(const Spectrum& s, double u);

}  // namespace soc
