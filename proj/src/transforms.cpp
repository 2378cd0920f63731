#include "qgfid/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qgfid {

namespace {

constexpr double kDerivativeFloor = 1e-14;

// √(z-2)·√(z+2) with principal roots: analytic off [-2, 2], ~ z at infinity.
cplx cut_root(cplx z) { return std::sqrt(z - 2.0) * std::sqrt(z + 2.0); }

struct NewtonOutcome {
  cplx u;
  bool converged = false;
  int iterations = 0;
  int terms = 0;
};

// Corrector used inside the homotopy: converge on the step size rather than
// the residual, the final polish enforces newton_tol.
NewtonOutcome correct(cplx guess, cplx target, QParam q, const SeriesControl& ctrl) {
  NewtonOutcome out{guess};
  for (int it = 0; it < 8; ++it) {
    const GqJet jet = g_q_jet(out.u, q, ctrl);
    out.terms = std::max(out.terms, jet.terms);
    ++out.iterations;
    if (std::abs(jet.first) < kDerivativeFloor) return out;
    const cplx step = (jet.value - target) / jet.first;
    out.u -= step;
    if (!std::isfinite(out.u.real()) || !std::isfinite(out.u.imag())) return out;
    if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(out.u))) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace

cplx semicircle_cauchy(cplx z, Branch branch) {
  if (branch == Branch::UpperPrincipal) {
    // (z - s)/2 written as 2/(z + s): |G_s| < 1 keeps |z + s| > 2, so this
    // form never cancels, unlike z - s at large |z|.
    return 2.0 / (z + cut_root(z));
  }
  if (z.imag() > 0.0) {
    throw DomainError("semicircle_cauchy: ContinuedThroughCut is defined on the closed lower half-plane");
  }
  if (z.imag() == 0.0) z = cplx(z.real(), -0.0);  // approach the cut from below
  return 0.5 * (z + cut_root(z));
}

cplx semicircle_cauchy_inverse(cplx w) {
  if (w == cplx(0.0, 0.0)) throw DomainError("semicircle_cauchy_inverse: w = 0");
  return w + 1.0 / w;
}

cplx q_gaussian_cauchy(cplx z, QParam q, Branch branch, const SeriesControl& ctrl) {
  return g_q(semicircle_cauchy(z, branch), q, ctrl);
}

cplx f_transform(cplx z, QParam q, const SeriesControl& ctrl) {
  return 1.0 / q_gaussian_cauchy(z, q, Branch::UpperPrincipal, ctrl);
}

InversionResult invert_g_detailed(cplx target, QParam q, const InversionPolicy& policy,
                                  const SeriesControl& ctrl) {
  if (!(target.imag() < 0.0)) throw DomainError("invert_g: target must lie in C⁻");
  if (policy.continuation_steps < 1 || policy.newton_max_iter < 1) {
    throw DomainError("invert_g: policy needs at least one step and one iteration");
  }
  InversionResult res{target};
  const double q_final = q.value();

  const double h_initial = q_final / policy.continuation_steps;
  const double h_floor = h_initial * 0x1p-30;
  double h = h_initial;
  double q_now = 0.0;
  cplx u = target;  // exact at q = 0
  while (q_now < q_final) {
    h = std::min(h, q_final - q_now);
    const double q_next = (q_final - q_now - h <= 1e-15 * q_final) ? q_final : q_now + h;
    const GqJet here = g_q_jet(u, QParam(q_now), ctrl);
    res.series_terms_max = std::max(res.series_terms_max, here.terms);
    if (std::abs(here.first) < kDerivativeFloor) {
      throw NonConvergence("invert_g: g_q' vanished along the homotopy path");
    }
    // Euler predictor on g_{q(s)}(u(s)) = target: du/dq = -∂_q g / g'.
    const cplx predicted = u - (q_next - q_now) * here.dq / here.first;
    const NewtonOutcome c = correct(predicted, target, QParam(q_next), ctrl);
    res.newton_iterations += c.iterations;
    res.series_terms_max = std::max(res.series_terms_max, c.terms);

    const bool stayed_below = c.u.imag() < 0.0;
    const double drift = std::abs(c.u - predicted);
    const double slack = 0.25 * std::abs(predicted - u) + 1e-8 * std::max(1.0, std::abs(u));
    if (c.converged && stayed_below && drift <= slack) {
      u = c.u;
      q_now = q_next;
      ++res.continuation_steps;
      h = std::min(1.5 * h, 4.0 * h_initial);
      continue;
    }
    h *= 0.5;
    if (h < h_floor) {
      if (c.converged && !stayed_below) {
        throw BranchEscape("invert_g: continuation crosses into C⁺ at q = " +
                           std::to_string(q_now));
      }
      throw NonConvergence("invert_g: continuation step underflow at q = " +
                           std::to_string(q_now));
    }
  }

  for (int it = 0;; ++it) {
    const GqJet jet = g_q_jet(u, q, ctrl);
    res.series_terms_max = std::max(res.series_terms_max, jet.terms);
    res.residual = std::abs(jet.value - target);
    if (res.residual <= policy.newton_tol) break;
    if (it >= policy.newton_max_iter) {
      throw NonConvergence("invert_g: Newton polish did not reach newton_tol");
    }
    if (std::abs(jet.first) < kDerivativeFloor) {
      throw NonConvergence("invert_g: g_q' below derivative floor during polish");
    }
    u -= (jet.value - target) / jet.first;
    ++res.newton_iterations;
  }
  if (!(u.imag() < 0.0)) throw BranchEscape("invert_g: polished root left C⁻");
  res.u = u;
  return res;
}

cplx invert_g(cplx target, QParam q, const InversionPolicy& policy, const SeriesControl& ctrl) {
  return invert_g_detailed(target, q, policy, ctrl).u;
}

PhiResult voiculescu_phi_detailed(cplx z, QParam q, const InversionPolicy& policy,
                                  const SeriesControl& ctrl) {
  if (!(z.imag() > 0.0)) throw DomainError("voiculescu_phi: z must lie in C⁺");
  PhiResult out;
  out.inversion = invert_g_detailed(1.0 / z, q, policy, ctrl);
  out.phi = semicircle_cauchy_inverse(out.inversion.u) - z;
  return out;
}

cplx voiculescu_phi(cplx z, QParam q, const InversionPolicy& policy, const SeriesControl& ctrl) {
  return voiculescu_phi_detailed(z, q, policy, ctrl).phi;
}

cplx f_transform_inverse(cplx z, QParam q, const InversionPolicy& policy,
                         const SeriesControl& ctrl) {
  if (!(z.imag() > 0.0)) throw DomainError("f_transform_inverse: z must lie in C⁺");
  return semicircle_cauchy_inverse(invert_g(1.0 / z, q, policy, ctrl));
}

}  // namespace qgfid
