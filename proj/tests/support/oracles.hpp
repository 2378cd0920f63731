#pragma once

// Reference computations used by the tests. They take deliberately different
// routes from the library (naive sums with std::pow, quadratic roots,
// periodic trapezoid rule) so agreement is evidence, not tautology.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// Σ_{k<terms} (-1)^k q^{k(k+1)/2} w^{2k+1}, each term from scratch.
inline cplx g_naive(cplx w, double q, int terms = 200) {
  cplx sum = 0.0;
  for (int k = 0; k < terms; ++k) {
    const double coeff = std::pow(q, 0.5 * k * (k + 1));
    if (coeff == 0.0 && k > 0) break;
    sum += (k % 2 ? -1.0 : 1.0) * coeff * std::pow(w, 2 * k + 1);
  }
  return sum;
}

// Σ |terms| of the same series: the scale of rounding error for any summation order.
inline double g_abs_sum(cplx w, double q, int terms = 200) {
  double sum = 0.0;
  for (int k = 0; k < terms; ++k) sum += std::pow(q, 0.5 * k * (k + 1)) * std::pow(std::abs(w), 2 * k + 1);
  return sum;
}

inline cplx central_difference(const std::function<cplx(cplx)>& f, cplx w, double h) {
  return (f(w + h) - f(w - h)) / (2.0 * h);
}

// Root of G² - zG + 1 = 0 with |G| < 1, i.e. the semicircle Cauchy transform
// off [-2, 2], without reference to any branch cut convention.
inline cplx semicircle_cauchy_root(cplx z) {
  const cplx disc = std::sqrt(z * z - 4.0);
  const cplx a = 0.5 * (z - disc);
  const cplx b = 0.5 * (z + disc);
  return std::abs(a) < std::abs(b) ? a : b;
}

inline double semicircle_density(double x) { return std::sqrt(std::max(0.0, 4.0 - x * x)) / (2.0 * kPi); }

// Π_{k<n} (1 - a q^k) by direct multiplication.
inline cplx pochhammer_naive(cplx a, double q, int n) {
  cplx p = 1.0;
  for (int k = 0; k < n; ++k) p *= 1.0 - a * std::pow(q, k);
  return p;
}

// ∫_{-2}^{2} f(x) dx by the trapezoid rule in θ (x = 2cos θ). The integrand
// 2 sin θ f(2 cos θ), extended evenly, is periodic; for f analytic near the
// support the rule converges geometrically.
inline cplx trapezoid_on_support(const std::function<cplx(double)>& f, int panels) {
  cplx sum = 0.0;
  const double h = kPi / panels;
  for (int j = 1; j < panels; ++j) {
    const double theta = j * h;
    sum += 2.0 * std::sin(theta) * f(2.0 * std::cos(theta));
  }
  return sum * h;
}

// Points of C⁺ with moduli spread over several decades.
inline cplx random_upper(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-6.0, 6.0), logim(-2.0, 1.0);
  return {re(rng), std::pow(10.0, logim(rng))};
}

// Reference values from 50-digit mpmath evaluations of the defining series.
namespace frozen {
inline constexpr double g_half_at_i_imag = 1.6416325606551539;  // g_{1/2}(i) / i
inline constexpr double cauchy_half_at_1_plus_i_re = 0.36328349371290229;
inline constexpr double cauchy_half_at_1_plus_i_im = -0.54470091338585377;
inline constexpr double density_half_at_0 = 0.52254787353774686;
inline constexpr double density_half_at_1 = 0.23690767880590316;
inline constexpr double density_half_at_1_7 = 0.026583714140751697;
}  // namespace frozen

}  // namespace oracle
