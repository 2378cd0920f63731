#pragma once

#include "qgfid/qseries.hpp"

namespace qgfid {

/// Which determination of the semicircle Cauchy transform to use.
///
/// UpperPrincipal is (z - s(z))/2 with s(z) = √(z-2)·√(z+2) (principal
/// roots), the genuine Cauchy transform on C \ [-2, 2]; on the real axis the
/// sign of a zero imaginary part selects the side of the cut.
/// ContinuedThroughCut is (z + s(z))/2 on the closed lower half-plane: the
/// continuation of the C⁺ values through (-2, 2), growing like z at -i∞.
enum class Branch { UpperPrincipal, ContinuedThroughCut };

struct InversionPolicy {
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
  int continuation_steps = 64;
};

cplx semicircle_cauchy(cplx z, Branch branch);

/// w + 1/w. Maps the open lower half-disc onto C⁺ and C⁻ outside the closed
/// unit disc onto C⁻.
cplx semicircle_cauchy_inverse(cplx w);

/// G_{f_q} = g_q ∘ G_s on the requested branch.
cplx q_gaussian_cauchy(cplx z, QParam q, Branch branch, const SeriesControl& ctrl = {});

/// F = 1 / G_{f_q} on C⁺.
cplx f_transform(cplx z, QParam q, const SeriesControl& ctrl = {});

struct InversionResult {
  cplx u;
  double residual = 0.0;  // |g_q(u) - target|
  int continuation_steps = 0;
  int newton_iterations = 0;
  int series_terms_max = 0;
};

/// Inverse of g_q on C⁻, i.e. the branch Φ_q fixing 0, continued from
/// Φ_0 = identity by a predictor-corrector homotopy in q. Throws
/// NonConvergence when Newton stalls and BranchEscape when the iterate can
/// only be kept in C⁻ with steps below the resolution floor.
InversionResult invert_g_detailed(cplx target, QParam q, const InversionPolicy& policy = {},
                                  const SeriesControl& ctrl = {});

cplx invert_g(cplx target, QParam q, const InversionPolicy& policy = {},
              const SeriesControl& ctrl = {});

/// F⁻¹(z) = u + 1/u with u = invert_g(1/z); z ∈ C⁺.
cplx f_transform_inverse(cplx z, QParam q, const InversionPolicy& policy = {},
                         const SeriesControl& ctrl = {});

/// φ(z) = F⁻¹(z) - z; z ∈ C⁺.
cplx voiculescu_phi(cplx z, QParam q, const InversionPolicy& policy = {},
                    const SeriesControl& ctrl = {});

/// As voiculescu_phi, also reporting the inversion diagnostics.
struct PhiResult {
  cplx phi;
  InversionResult inversion;
};
PhiResult voiculescu_phi_detailed(cplx z, QParam q, const InversionPolicy& policy = {},
                                  const SeriesControl& ctrl = {});

}  // namespace qgfid
