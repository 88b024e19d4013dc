#pragma once

// Slow, independent reference implementations used only by the tests.

#include <cmath>
#include <vector>

namespace oracle {

inline constexpr long double kPiL = 3.141592653589793238462643383279502884L;

// alpha_j by literal cosine summation in long double.
inline double alpha(long n, long r, long j) {
  long double s = 0;
  for (long m = 1; m <= r; ++m) s += std::cos(2.0L * kPiL * j * m / n);
  return static_cast<double>(s / r);
}

inline std::vector<double> alphas(long n, long r) {
  std::vector<double> a(n);
  for (long j = 1; j <= n; ++j) a[j - 1] = alpha(n, r, j);
  return a;
}

// H by the double loop with periodic indexing.
template <typename Vec>
double hamiltonian(const Vec& x, long r) {
  const long n = static_cast<long>(x.size());
  long double h = 0;
  for (long i = 0; i < n; ++i)
    for (long d = 1; d <= r; ++d) h += static_cast<long double>(x[i]) * x[(i + d) % n];
  return static_cast<double>(-h / (2.0L * r));
}

}  // namespace oracle
