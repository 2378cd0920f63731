#include "qgfid/qseries.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qgfid/detail/series.hpp"

namespace qgfid {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_positive_q(QParam q, const char* op) {
  if (q.value() <= 0.0) throw DomainError(std::string(op) + ": requires q > 0");
}

void require_nonzero(cplx w, const char* op) {
  if (w == cplx(0.0, 0.0)) {
    throw DomainError(std::string(op) +
                      ": w = 0 is an essential singularity (accumulation point of zeros)");
  }
}

// -i q w (w^{-2}; q^2)_∞ (q^2 w^2; q^2)_∞, i.e. the product form without G.
cplx theta_product_shape(cplx w, QParam q, const SeriesControl& ctrl) {
  const QParam q2 = q.squared();
  const cplx w2 = w * w;
  return -kI * q.value() * w * q_pochhammer_inf(1.0 / w2, q2, ctrl) *
         q_pochhammer_inf(q2.value() * w2, q2, ctrl);
}

}  // namespace

QParam::QParam(double q) : q_(q) {
  if (!(q >= 0.0 && q <= kQMax)) {
    throw DomainError("q = " + std::to_string(q) + " outside the valid range [0, " +
                      std::to_string(kQMax) + "]");
  }
}

double q_hermite(int n, double x, QParam q) {
  if (n < 0) throw DomainError("q_hermite: negative degree");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = x;
  double q_int = 1.0;  // [m]_q = 1 + q + ... + q^{m-1}
  for (int m = 1; m < n; ++m) {
    const double next = x * cur - q_int * prev;
    prev = cur;
    cur = next;
    q_int = 1.0 + q.value() * q_int;
  }
  return cur;
}

cplx g_q(cplx w, QParam q, const SeriesControl& ctrl) {
  return detail::g_series<cplx, double>(w, q.value(), ctrl.abs_tol, ctrl.max_terms).value;
}

cplx g_q_prime(cplx w, QParam q, const SeriesControl& ctrl) { return g_q_jet(w, q, ctrl).first; }

cplx g_q_second(cplx w, QParam q, const SeriesControl& ctrl) {
  return g_q_jet(w, q, ctrl).second;
}

GqJet g_q_jet(cplx w, QParam qp, const SeriesControl& ctrl) {
  const double q = qp.value();
  const cplx w2 = w * w;
  cplx p_even = 1.0;      // w^{2k}
  cplx p_odd_prev = 0.0;  // w^{2k-1}
  double coeff = 1.0;     // q^{k(k+1)/2}
  double coeff_m1 = 0.0;  // q^{k(k+1)/2 - 1}, meaningful for k ≥ 1
  double q_step = q;      // q^{k+1}
  GqJet jet{};
  for (int k = 0; k < ctrl.max_terms; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double n = 2.0 * k + 1.0;
    const cplx p_odd = p_even * w;
    const cplx tv = sign * coeff * p_odd;
    const cplx t1 = sign * coeff * n * p_even;
    const cplx t2 = k > 0 ? sign * coeff * n * (n - 1.0) * p_odd_prev : cplx{};
    const cplx tq = k > 0 ? sign * (0.5 * k * (k + 1)) * coeff_m1 * p_odd : cplx{};
    jet.value += tv;
    jet.first += t1;
    jet.second += t2;
    jet.dq += tq;
    const double largest =
        std::max({std::abs(tv), std::abs(t1), std::abs(t2), std::abs(tq)});
    if (largest <= ctrl.abs_tol) {
      jet.terms = k + 1;
      return jet;
    }
    coeff_m1 = (k == 0) ? 1.0 : coeff_m1 * q_step;
    coeff *= q_step;
    q_step *= q;
    p_odd_prev = p_odd;
    p_even *= w2;
  }
  throw NonConvergence("g_q jet: term budget exhausted before reaching abs_tol");
}

cplx q_pochhammer(cplx a, double q, int n) {
  if (n < 0) throw DomainError("q_pochhammer: negative length");
  cplx prod = 1.0;
  cplx factor = a;
  for (int k = 0; k < n; ++k) {
    prod *= 1.0 - factor;
    factor *= q;
  }
  return prod;
}

cplx q_pochhammer_inf(cplx a, QParam q, const SeriesControl& ctrl) {
  cplx prod = 1.0;
  cplx factor = a;
  for (int k = 0; k < ctrl.max_terms; ++k) {
    if (std::abs(factor) <= ctrl.abs_tol) return prod;
    prod *= 1.0 - factor;
    if (prod == cplx(0.0, 0.0)) return prod;
    factor *= q.value();
  }
  throw NonConvergence("q_pochhammer: term budget exhausted before factors reached 1");
}

ThetaCalibration calibrate_theta(QParam q, const SeriesControl& ctrl) {
  require_positive_q(q, "calibrate_theta");
  ThetaCalibration cal;
  cal.q = q.value();
  cal.constant_G = theta_big(kI, q, ThetaForm::Series, ctrl) / theta_product_shape(kI, q, ctrl);

  constexpr int kRingPoints = 64;
  for (const double radius : {1.3, 1.0 / 1.3}) {
    for (int j = 0; j < kRingPoints; ++j) {
      const double angle = 2.0 * std::numbers::pi * (j + 0.5) / kRingPoints;
      const cplx w = std::polar(radius, angle);
      const cplx series = theta_big(w, q, ThetaForm::Series, ctrl);
      const cplx product = cal.constant_G * theta_product_shape(w, q, ctrl);
      cal.max_discrepancy = std::max(cal.max_discrepancy, std::abs(series - product));
      ++cal.check_points;
    }
  }
  if (cal.max_discrepancy > 1e-10) {
    throw NumericFailure("calibrate_theta: series and product forms disagree by " +
                         std::to_string(cal.max_discrepancy));
  }
  return cal;
}

cplx theta_big(cplx w, QParam q, ThetaForm form, const SeriesControl& ctrl) {
  require_nonzero(w, "theta_big");
  require_positive_q(q, "theta_big");
  if (form == ThetaForm::Product) return theta_big_product(w, q, calibrate_theta(q, ctrl), ctrl);
  const QParam q2 = q.squared();
  return -kI * std::pow(q.value(), 0.25) * (g_q(w, q2, ctrl) - g_q(1.0 / w, q2, ctrl));
}

cplx theta_big_product(cplx w, QParam q, const ThetaCalibration& calibration,
                       const SeriesControl& ctrl) {
  require_nonzero(w, "theta_big");
  require_positive_q(q, "theta_big");
  return calibration.constant_G * theta_product_shape(w, q, ctrl);
}

cplx theta_big_prime(cplx w, QParam q, const SeriesControl& ctrl) {
  require_nonzero(w, "theta_big_prime");
  require_positive_q(q, "theta_big_prime");
  const QParam q2 = q.squared();
  const cplx inv = 1.0 / w;
  return -kI * std::pow(q.value(), 0.25) *
         (g_q_prime(w, q2, ctrl) + g_q_prime(inv, q2, ctrl) * inv * inv);
}

double theta_lattice_residual(QParam q, int exponent, int sign, const SeriesControl& ctrl) {
  require_positive_q(q, "theta_lattice_residual");
  if (sign != 1 && sign != -1) throw DomainError("theta_lattice_residual: sign must be ±1");
#if defined(__SIZEOF_FLOAT128__)
  using ext = __float128;
  const ext tol = 1e-30;
#else
  using ext = long double;
  const ext tol = 1e-24L;
#endif
  const ext qe = q.value();
  ext x = 1;
  for (int n = 0; n < std::abs(exponent); ++n) x *= qe;
  if (exponent < 0) x = 1 / x;
  x *= sign;
  const ext q2 = qe * qe;
  const ext diff = detail::g_series<ext, ext>(x, q2, tol, ctrl.max_terms).value -
                   detail::g_series<ext, ext>(1 / x, q2, tol, ctrl.max_terms).value;
  return std::pow(q.value(), 0.25) * std::fabs(static_cast<double>(diff));
}

std::vector<cplx> locate_theta_zeros(QParam q, double r_min, double r_max,
                                     const SeriesControl& ctrl) {
  require_positive_q(q, "locate_theta_zeros");
  if (!(r_min > 0.0 && r_max > r_min)) throw DomainError("locate_theta_zeros: bad annulus");
  constexpr int kRadii = 12;
  constexpr int kAngles = 48;
  constexpr double kSlack = 1e-9;
  std::vector<cplx> zeros;
  for (int i = 0; i < kRadii; ++i) {
    const double r = r_min * std::pow(r_max / r_min, (i + 0.5) / kRadii);
    for (int j = 0; j < kAngles; ++j) {
      cplx w = std::polar(r, 2.0 * std::numbers::pi * (j + 0.25) / kAngles);
      bool converged = false;
      for (int it = 0; it < 80; ++it) {
        const cplx d = theta_big_prime(w, q, ctrl);
        if (std::abs(d) < 1e-300) break;
        const cplx step = theta_big(w, q, ThetaForm::Series, ctrl) / d;
        w -= step;
        if (!(std::abs(w) > 0.1 * r_min && std::abs(w) < 10.0 * r_max)) break;
        if (std::abs(step) <= 1e-14 * std::abs(w)) {
          converged = true;
          break;
        }
      }
      if (!converged) continue;
      const double m = std::abs(w);
      if (m < r_min * (1.0 - kSlack) || m > r_max * (1.0 + kSlack)) continue;
      const bool seen = std::any_of(zeros.begin(), zeros.end(), [&](cplx z) {
        return std::abs(z - w) <= 1e-8 * std::max(1.0, m);
      });
      if (!seen) zeros.push_back(w);
    }
  }
  std::sort(zeros.begin(), zeros.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return zeros;
}

}  // namespace qgfid
