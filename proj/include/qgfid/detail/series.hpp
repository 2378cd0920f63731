#pragma once

// Scalar-generic kernels shared by the public qseries entry points. The same
// loop is instantiated for std::complex<double>, double and __float128.

#include <cmath>
#include <complex>

#include "qgfid/errors.hpp"

namespace qgfid::detail {

inline double magnitude(double x) { return std::fabs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }
#if defined(__SIZEOF_FLOAT128__)
inline __float128 magnitude(__float128 x) { return x < 0 ? -x : x; }
#endif

template <typename Scalar>
struct SeriesSum {
  Scalar value{};
  int terms = 0;
};

// Σ_{k≥0} (-1)^k q^{k(k+1)/2} w^{2k+1}, stopped at the first term whose
// magnitude is ≤ abs_tol. The ratio of consecutive terms, q^{k+1}|w|^2, is
// decreasing in k, so a small term after the first is never followed by a
// larger one.
template <typename Scalar, typename Real>
SeriesSum<Scalar> g_series(Scalar w, Real q, Real abs_tol, int max_terms) {
  const Scalar w2 = w * w;
  Scalar power = w;  // w^{2k+1}
  Real coeff = 1;    // q^{k(k+1)/2}
  Real q_step = q;   // q^{k+1}
  Scalar sum{};
  for (int k = 0; k < max_terms; ++k) {
    const Scalar term = (k % 2 == 0 ? coeff : -coeff) * power;
    sum += term;
    if (magnitude(term) <= abs_tol) return {sum, k + 1};
    coeff *= q_step;
    q_step *= q;
    power *= w2;
  }
  throw NonConvergence("g_q series: term budget exhausted before reaching abs_tol");
}

}  // namespace qgfid::detail
