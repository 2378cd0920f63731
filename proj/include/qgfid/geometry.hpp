#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qgfid/qseries.hpp"

namespace qgfid {

/// Zeros of g_q' on (0, search_bound], ascending. The first one is d_q, where
/// the real axis stops being a preimage branch of [0, ∞). Throws NoneFound
/// when no sign change is seen (always the case at q = 0).
std::vector<double> real_critical_points(QParam q, double search_bound,
                                         const SeriesControl& ctrl = {});

/// Discretization of the branch γ_q of g_q^{-1}([0, ∞)) that starts at 0,
/// runs along [0, d_q] and then turns into the fourth quadrant.
struct PathTrace {
  enum class Stop { ReachedTMax, Escaped };

  double q = 0.0;
  double trace_tol = 0.0;
  std::vector<double> parameters;  // t_j, increasing
  std::vector<cplx> points;        // γ(t_j)
  std::vector<double> residuals;   // |g_q(γ(t_j)) - t_j|
  std::vector<cplx> critical_points;  // critical points met on the curve, in order
  Stop stop = Stop::ReachedTMax;

  std::size_t size() const { return points.size(); }
  double max_residual() const;

  /// Header `t,re,im,residual`, one row per sample.
  void write_csv(std::ostream& out) const;
};

struct TraceOptions {
  double escape_radius = 1e3;
  // Critical points are looked for when |g_q'| falls under this, or when a
  // Newton estimate puts one within two steps of the current point.
  double critical_threshold = 1e-8;
  // Target chord length relative to max(|γ|, 0.1).
  double relative_step = 4e-3;
  int max_points = 500000;
};

/// Predictor-corrector continuation of g_q(γ(t)) = t from γ(0) = 0. At a
/// critical point with n local branches the outgoing branch is the one with
/// the smallest positive clockwise turn from the incoming tangent. If t_max
/// does not exceed g_q(d_q) the trace is the real segment up to g_q^{-1}(t_max).
/// Throws StallError when step control cannot keep residuals ≤ trace_tol.
PathTrace trace_gamma(QParam q, double t_max, double trace_tol = 1e-9,
                      const TraceOptions& options = {}, const SeriesControl& ctrl = {});

/// Closed, simple, counterclockwise polyline. The first vertex is repeated
/// at the end.
class Contour {
 public:
  /// Validates closure, simplicity (pairwise segment test) and orientation;
  /// throws DomainError otherwise.
  static Contour from_vertices(std::vector<cplx> closed_vertices);
  static Contour circle(cplx center, double radius, int segments);

  const std::vector<cplx>& vertices() const { return vertices_; }
  double signed_area() const;

 private:
  explicit Contour(std::vector<cplx> v) : vertices_(std::move(v)) {}
  std::vector<cplx> vertices_;
};

/// Number of zeros of g_q - target inside the contour, by the argument
/// principle. Edges are bisected until every argument increment is below
/// π/2. Throws OnContourZero if |g_q - target| < 1e-8 at any sample and
/// NumericFailure if the accumulated turn is not an integer to 1e-6.
int count_zeros_contour(QParam q, const Contour& contour, cplx target,
                        const SeriesControl& ctrl = {});

/// Approximation of the domain X_q: γ_q, its reflection -conj(γ_q) and a
/// closing arc through -i|γ_end|. Targets of modulus below target_radius are
/// inside the image of the boundary.
struct XqRegion {
  Contour boundary;
  double target_radius = 0.0;
  double arc_min_modulus = 0.0;  // min |g_q| on the closing arc
  double t_end = 0.0;
};

XqRegion build_xq_region(QParam q, const PathTrace& trace, const SeriesControl& ctrl = {});

struct InjectivityViolation {
  cplx target;
  int count = 0;
};

struct InjectivityReport {
  double q = 0.0;
  int samples = 0;
  double target_radius = 0.0;
  std::vector<InjectivityViolation> violations;  // targets whose count differs from 1

  bool holds() const { return violations.empty(); }
};

/// For `samples` pseudo-random targets v ∈ C⁻ with |v| < region.target_radius,
/// checks that g_q - v has exactly one zero inside the region boundary.
InjectivityReport injectivity_witness(QParam q, const XqRegion& region, int samples,
                                      std::uint64_t seed = 20240601,
                                      const SeriesControl& ctrl = {});

}  // namespace qgfid
