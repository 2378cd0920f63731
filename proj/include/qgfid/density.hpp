#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "qgfid/qseries.hpp"

namespace qgfid {

// The q-Gaussian law normalized to the support [-2, 2]; its variance is 1 - q.

enum class DensityForm { ChebyshevSeries, ThetaProduct };

/// (1/2π) √(4-x²) Σ_{k≥1} (-1)^{k-1} q^{k(k-1)/2} U_{2k-2}(x/2), |x| ≤ 2.
/// Negative roundoff down to -1e-12 is clamped to 0; anything below that
/// throws NumericFailure.
double q_gaussian_density(double x, QParam q, const SeriesControl& ctrl = {});

/// The same series without the clamp.
double q_gaussian_density_unclamped(double x, QParam q, const SeriesControl& ctrl = {});

/// Two readings of the x-independent factor in the theta-product density
/// (1/π) sin θ Π_{n≥1} c_n |1 - q^n e^{2iθ}|², cos θ = x/2:
/// c_n = 1 - q^n, or c_n = (1 - q)^n taken literally.
enum class ThetaDensityReading { OneMinusQPower, OneMinusQToThePower };

const char* to_string(ThetaDensityReading reading);

/// Outcome of choosing a reading against the Chebyshev series. Gaps are the
/// largest |f_cheb - f_raw| over the check abscissae before normalization;
/// `normalization` rescales the chosen reading to match f_cheb at x = 0.
struct ThetaDensityCalibration {
  double q = 0.0;
  ThetaDensityReading reading = ThetaDensityReading::OneMinusQPower;
  double normalization = 1.0;
  double raw_gap_power = 0.0;       // reading 1 - q^n
  double raw_gap_literal = 0.0;     // reading (1 - q)^n
  bool literal_product_converges = false;
};

ThetaDensityCalibration calibrate_theta_density(QParam q, const SeriesControl& ctrl = {});

double q_gaussian_density_theta(double x, QParam q, const SeriesControl& ctrl = {});
double q_gaussian_density_theta(double x, QParam q, const ThetaDensityCalibration& calibration,
                                const SeriesControl& ctrl = {});

double q_gaussian_density(double x, QParam q, DensityForm form, const SeriesControl& ctrl = {});

// ---------------------------------------------------------------------------
// Quadrature over the support.
// ---------------------------------------------------------------------------

struct IdentityWeight {};
struct MonomialWeight {
  int power = 0;
};
/// 1/(z - x); z must lie off [-2, 2].
struct CauchyKernel {
  cplx z;
};
using DensityWeight = std::variant<IdentityWeight, MonomialWeight, CauchyKernel>;

struct QuadratureResult {
  cplx value;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// ∫_{-2}^{2} f(x) dx via x = 2 cos θ and globally adaptive 7/15-point
/// Gauss–Kronrod on θ ∈ [0, π]. Throws QuadFailure when `max_intervals`
/// subintervals cannot bring the error estimate under `quad_tol`.
QuadratureResult integrate_on_support(const std::function<cplx(double)>& f, double quad_tol,
                                      int max_intervals = 4000);

/// ∫ f_q(x) · weight(x) dx over [-2, 2] (Chebyshev form of f_q).
QuadratureResult integrate_density(QParam q, const DensityWeight& weight, double quad_tol,
                                   const SeriesControl& ctrl = {});

// ---------------------------------------------------------------------------
// Moments from the rescaled q-Hermite recurrence.
// ---------------------------------------------------------------------------

/// Truncated Jacobi operator with zero diagonal and off-diagonal b_n = √(1 - q^n).
struct JacobiOperator {
  int truncation = 0;
  std::vector<double> offdiag;  // b_1 ... b_N

  static JacobiOperator build(QParam q, int truncation);
};

/// m_0 ... m_{k_max} with m_k = (e_0, J^k e_0). k_max must be even and the
/// truncation at least k_max/2 + 1.
std::vector<double> jacobi_moments(int k_max, QParam q, int truncation);

}  // namespace qgfid
