#include "qgfid/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <type_traits>

namespace qgfid {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClampFloor = -1e-12;

void require_support(double x, const char* op) {
  if (!(std::fabs(x) <= 2.0)) {
    throw DomainError(std::string(op) + ": x = " + std::to_string(x) + " outside [-2, 2]");
  }
}

// Π_{n≥1} |1 - q^n e^{2iθ}|² = Π (1 - 2 q^n cos 2θ + q^{2n}); also reports
// how many factors were used.
double theta_modulus_product(double cos_two_theta, QParam q, const SeriesControl& ctrl,
                             int* factors) {
  double prod = 1.0;
  double qn = q.value();
  for (int n = 1; n <= ctrl.max_terms; ++n) {
    if (qn <= ctrl.abs_tol) {
      *factors = n - 1;
      return prod;
    }
    prod *= 1.0 - 2.0 * qn * cos_two_theta + qn * qn;
    qn *= q.value();
  }
  throw NonConvergence("theta density: product did not converge");
}

struct RawTheta {
  double value = 0.0;
  bool converges = true;
};

RawTheta theta_density_raw(double x, QParam q, ThetaDensityReading reading,
                           const SeriesControl& ctrl) {
  const double cos_theta = 0.5 * x;
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  int factors = 0;
  const double shape =
      theta_modulus_product(2.0 * cos_theta * cos_theta - 1.0, q, ctrl, &factors);

  RawTheta out;
  double constant = 1.0;
  if (reading == ThetaDensityReading::OneMinusQPower) {
    constant = q_pochhammer_inf(q.value(), q, ctrl).real();
  } else {
    // Π (1 - q)^n: the factors drift away from 1, so the infinite product
    // only exists for q = 0. Truncate where the x-dependent factor stopped.
    const double base = 1.0 - q.value();
    double factor = base;
    for (int n = 1; n <= factors; ++n) {
      constant *= factor;
      factor *= base;
    }
    out.converges = q.value() == 0.0;
  }
  out.value = sin_theta / kPi * constant * shape;
  return out;
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  cplx value;
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel kronrod15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const cplx fc = f(center);
  cplx kronrod = fc * kWgk[7];
  cplx gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const cplx pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

const char* to_string(ThetaDensityReading reading) {
  return reading == ThetaDensityReading::OneMinusQPower ? "one_minus_q_pow_n"
                                                        : "one_minus_q_to_the_n";
}

double q_gaussian_density_unclamped(double x, QParam q, const SeriesControl& ctrl) {
  require_support(x, "q_gaussian_density");
  const double y = 0.5 * x;
  // U_{2k-2}(y) advanced two degrees per term.
  double u_prev = 0.0;    // U_{2k-3}
  double u_even = 1.0;    // U_{2k-2}
  double coeff = 1.0;     // q^{k(k-1)/2}
  double q_step = q.value();
  double sum = 0.0;
  int k = 1;
  for (; k <= ctrl.max_terms; ++k) {
    if (k > 1) {
      const double u_odd = 2.0 * y * u_even - u_prev;
      const double u_next = 2.0 * y * u_odd - u_even;
      u_prev = u_odd;
      u_even = u_next;
    }
    sum += (k % 2 == 1 ? coeff : -coeff) * u_even;
    if (coeff * (2.0 * k - 1.0) <= ctrl.abs_tol) break;
    coeff *= q_step;
    q_step *= q.value();
  }
  if (k > ctrl.max_terms) throw NonConvergence("q_gaussian_density: series did not converge");
  return std::sqrt(std::max(0.0, 4.0 - x * x)) / (2.0 * kPi) * sum;
}

double q_gaussian_density(double x, QParam q, const SeriesControl& ctrl) {
  const double f = q_gaussian_density_unclamped(x, q, ctrl);
  if (f >= 0.0) return f;
  if (f >= kClampFloor) return 0.0;
  throw NumericFailure("q_gaussian_density: value " + std::to_string(f) + " at x = " +
                       std::to_string(x) + " is negative beyond roundoff");
}

ThetaDensityCalibration calibrate_theta_density(QParam q, const SeriesControl& ctrl) {
  ThetaDensityCalibration cal;
  cal.q = q.value();
  constexpr std::array<double, 9> kCheck = {-1.8, -1.2, -0.7, -0.3, 0.0, 0.4, 0.9, 1.3, 1.9};
  for (const double x : kCheck) {
    const double reference = q_gaussian_density_unclamped(x, q, ctrl);
    const RawTheta power = theta_density_raw(x, q, ThetaDensityReading::OneMinusQPower, ctrl);
    const RawTheta literal =
        theta_density_raw(x, q, ThetaDensityReading::OneMinusQToThePower, ctrl);
    cal.raw_gap_power = std::max(cal.raw_gap_power, std::fabs(reference - power.value));
    cal.raw_gap_literal = std::max(cal.raw_gap_literal, std::fabs(reference - literal.value));
    cal.literal_product_converges = literal.converges;
  }
  const bool literal_wins =
      cal.literal_product_converges && cal.raw_gap_literal < cal.raw_gap_power;
  cal.reading = literal_wins ? ThetaDensityReading::OneMinusQToThePower
                             : ThetaDensityReading::OneMinusQPower;
  const double at_zero = theta_density_raw(0.0, q, cal.reading, ctrl).value;
  cal.normalization = q_gaussian_density_unclamped(0.0, q, ctrl) / at_zero;
  return cal;
}

double q_gaussian_density_theta(double x, QParam q, const ThetaDensityCalibration& calibration,
                                const SeriesControl& ctrl) {
  require_support(x, "q_gaussian_density_theta");
  return calibration.normalization * theta_density_raw(x, q, calibration.reading, ctrl).value;
}

double q_gaussian_density_theta(double x, QParam q, const SeriesControl& ctrl) {
  require_support(x, "q_gaussian_density_theta");
  return q_gaussian_density_theta(x, q, calibrate_theta_density(q, ctrl), ctrl);
}

double q_gaussian_density(double x, QParam q, DensityForm form, const SeriesControl& ctrl) {
  return form == DensityForm::ChebyshevSeries ? q_gaussian_density(x, q, ctrl)
                                              : q_gaussian_density_theta(x, q, ctrl);
}

QuadratureResult integrate_on_support(const std::function<cplx(double)>& f, double quad_tol,
                                      int max_intervals) {
  // x = 2 cos θ, dx = -2 sin θ dθ; the orientation flip cancels the sign.
  const auto integrand = [&f](double theta) { return 2.0 * std::sin(theta) * f(2.0 * std::cos(theta)); };

  std::priority_queue<Panel> panels;
  panels.push(kronrod15(integrand, 0.0, kPi));
  cplx total = panels.top().value;
  double error = panels.top().error;
  int count = 1;
  while (error > quad_tol) {
    if (count >= max_intervals) {
      throw QuadFailure("integrate_on_support: error estimate " + std::to_string(error) +
                        " above tolerance after " + std::to_string(count) + " intervals");
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = kronrod15(integrand, worst.a, mid);
    const Panel right = kronrod15(integrand, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Recompute from the panels: the running sums drift over many updates.
  cplx sum{};
  double err = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {sum, err, count};
}

QuadratureResult integrate_density(QParam q, const DensityWeight& weight, double quad_tol,
                                   const SeriesControl& ctrl) {
  if (const auto* kernel = std::get_if<CauchyKernel>(&weight)) {
    if (kernel->z.imag() == 0.0 && std::fabs(kernel->z.real()) <= 2.0) {
      throw DomainError("integrate_density: Cauchy kernel pole on the support");
    }
  }
  if (const auto* mono = std::get_if<MonomialWeight>(&weight); mono && mono->power < 0) {
    throw DomainError("integrate_density: negative monomial power");
  }
  const auto kernel_at = [&weight](double x) -> cplx {
    return std::visit(
        [x](const auto& w) -> cplx {
          using W = std::decay_t<decltype(w)>;
          if constexpr (std::is_same_v<W, IdentityWeight>) {
            return 1.0;
          } else if constexpr (std::is_same_v<W, MonomialWeight>) {
            return std::pow(x, w.power);
          } else {
            return 1.0 / (w.z - x);
          }
        },
        weight);
  };
  return integrate_on_support(
      [&](double x) { return q_gaussian_density(x, q, ctrl) * kernel_at(x); }, quad_tol);
}

JacobiOperator JacobiOperator::build(QParam q, int truncation) {
  if (truncation < 1) throw DomainError("JacobiOperator: truncation must be positive");
  JacobiOperator op;
  op.truncation = truncation;
  op.offdiag.reserve(truncation);
  double qn = q.value();
  for (int n = 1; n <= truncation; ++n) {
    op.offdiag.push_back(std::sqrt(1.0 - qn));
    qn *= q.value();
  }
  return op;
}

std::vector<double> jacobi_moments(int k_max, QParam q, int truncation) {
  if (k_max < 0 || k_max % 2 != 0) throw DomainError("jacobi_moments: k_max must be even and ≥ 0");
  if (truncation < k_max / 2 + 1) {
    throw DomainError("jacobi_moments: truncation must be at least k_max/2 + 1");
  }
  const JacobiOperator op = JacobiOperator::build(q, truncation);
  const auto& b = op.offdiag;
  const int dim = truncation + 1;
  std::vector<double> v(dim, 0.0), next(dim, 0.0);
  v[0] = 1.0;
  std::vector<double> moments{1.0};
  for (int k = 1; k <= k_max; ++k) {
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      if (i > 0) acc += b[i - 1] * v[i - 1];
      if (i + 1 < dim) acc += b[i] * v[i + 1];
      next[i] = acc;
    }
    v.swap(next);
    moments.push_back(v[0]);
  }
  return moments;
}

}  // namespace qgfid
