#pragma once

#include <complex>
#include <vector>

#include "qgfid/errors.hpp"

namespace qgfid {

using cplx = std::complex<double>;

/// Upper end of the q range accepted by the numerics. The series degenerate
/// as q → 1, so the library stops short of it.
inline constexpr double kQMax = 0.999;

/// Deformation parameter q ∈ [0, kQMax].
class QParam {
 public:
  explicit QParam(double q);

  double value() const noexcept { return q_; }
  QParam squared() const { return QParam(q_ * q_); }

 private:
  double q_;
};

/// Truncation policy shared by every infinite series and product.
struct SeriesControl {
  double abs_tol = 1e-14;
  int max_terms = 512;
};

/// U_k(x) by the recurrence U_{k+1} = 2x U_k - U_{k-1}.
template <typename T>
T chebyshev_u(int k, T x) {
  if (k < 0) throw DomainError("chebyshev_u: negative degree");
  T prev = T(1);
  if (k == 0) return prev;
  T cur = T(2) * x;
  for (int n = 1; n < k; ++n) {
    T next = T(2) * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// H_n(x|q) from x H_n = H_{n+1} + [n]_q H_{n-1}, H_0 = 1, H_1 = x.
double q_hermite(int n, double x, QParam q);

// ---------------------------------------------------------------------------
// The entire function g_q(w) = Σ (-1)^k q^{k(k+1)/2} w^{2k+1}.
// ---------------------------------------------------------------------------

cplx g_q(cplx w, QParam q, const SeriesControl& ctrl = {});
cplx g_q_prime(cplx w, QParam q, const SeriesControl& ctrl = {});
cplx g_q_second(cplx w, QParam q, const SeriesControl& ctrl = {});

/// Value, first and second w-derivatives and the q-derivative of g_q from a
/// single pass over the series. `terms` is the number of series terms used.
struct GqJet {
  cplx value;
  cplx first;
  cplx second;
  cplx dq;
  int terms = 0;
};

GqJet g_q_jet(cplx w, QParam q, const SeriesControl& ctrl = {});

// ---------------------------------------------------------------------------
// q-Pochhammer symbols.
// ---------------------------------------------------------------------------

/// (a; q)_n = Π_{k=0}^{n-1} (1 - a q^k).
cplx q_pochhammer(cplx a, double q, int n);

/// (a; q)_∞, truncated once |a q^k| ≤ abs_tol.
cplx q_pochhammer_inf(cplx a, QParam q, const SeriesControl& ctrl = {});

// ---------------------------------------------------------------------------
// Theta function Θ(w) = -i q^{1/4} (g_{q²}(w) - g_{q²}(1/w))
//                     = -i q G w Π_{n≥1} (1 - q^{2n-2} w^{-2}) (1 - q^{2n} w^2).
//
// The nome convention is explicit: Θ at parameter q is built from g at q².
// Zeros are exactly ±q^{n-1} and ±q^{-n}, n ≥ 1.
// ---------------------------------------------------------------------------

enum class ThetaForm { Series, Product };

/// The product form's constant G, fitted from the series/product ratio at
/// w = i, and the largest series/product gap seen on the check rings.
struct ThetaCalibration {
  double q = 0.0;
  cplx constant_G;
  double max_discrepancy = 0.0;
  int check_points = 0;
};

ThetaCalibration calibrate_theta(QParam q, const SeriesControl& ctrl = {});

/// Throws DomainError for w = 0 (essential singularity) or q = 0.
cplx theta_big(cplx w, QParam q, ThetaForm form, const SeriesControl& ctrl = {});
cplx theta_big_product(cplx w, QParam q, const ThetaCalibration& calibration,
                       const SeriesControl& ctrl = {});
cplx theta_big_prime(cplx w, QParam q, const SeriesControl& ctrl = {});

/// |Θ(sign · q^exponent)| with the abscissa and the series carried in
/// 113-bit floating point. Near ±q^{-n} the slope of Θ grows like
/// q^{-n^2}, so rounding the abscissa to double alone would dominate the
/// answer; extended precision keeps the evaluation at the exact lattice point.
double theta_lattice_residual(QParam q, int exponent, int sign,
                              const SeriesControl& ctrl = {});

/// Zeros of Θ in the annulus r_min ≤ |w| ≤ r_max, found by Newton iteration
/// from a polar seed grid and de-duplicated. Sorted by (real, imag).
std::vector<cplx> locate_theta_zeros(QParam q, double r_min, double r_max,
                                     const SeriesControl& ctrl = {});

}  // namespace qgfid
