#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qgfid/density.hpp"
#include "qgfid/transforms.hpp"
#include "support/oracles.hpp"

using namespace qgfid;
using oracle::cplx;

namespace {

const cplx kI(0.0, 1.0);
const double kGolden = (1.0 - std::sqrt(5.0)) / 2.0;

}  // namespace

TEST(SemicircleCauchy, ClosedFormValues) {
  EXPECT_NEAR(std::abs(semicircle_cauchy(2.0, Branch::UpperPrincipal) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(semicircle_cauchy(kI, Branch::UpperPrincipal) - kGolden * kI), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(semicircle_cauchy(cplx(0.0, 0.0), Branch::UpperPrincipal) + kI), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(semicircle_cauchy(cplx(0.0, 1e-9), Branch::UpperPrincipal) + kI), 0.0, 1e-9);
}

TEST(SemicircleCauchy, MatchesQuadraticRootOffTheCut) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int n = 0; n < 1000; ++n) {
    const cplx z(u(rng), u(rng));
    if (std::fabs(z.imag()) < 1e-3) continue;
    const cplx ref = oracle::semicircle_cauchy_root(z);
    EXPECT_LE(std::abs(semicircle_cauchy(z, Branch::UpperPrincipal) - ref), 1e-13) << z;
  }
}

TEST(SemicircleCauchy, ContinuationThroughCutMatchesTrackedRoot) {
  // Follow a root of G² - zG + 1 continuously along z = i → -i, crossing
  // (-2, 2) at 0, starting from the upper-branch value at i.
  cplx g = semicircle_cauchy(kI, Branch::UpperPrincipal);
  const int steps = 20000;
  for (int j = 1; j <= steps; ++j) {
    const cplx z = kI * (1.0 - 2.0 * j / steps);
    const cplx disc = std::sqrt(z * z - 4.0);
    const cplx a = 0.5 * (z - disc), b = 0.5 * (z + disc);
    g = std::abs(a - g) < std::abs(b - g) ? a : b;
    if (z.imag() > 0.0) {
      EXPECT_LE(std::abs(g - semicircle_cauchy(z, Branch::UpperPrincipal)), 1e-12);
    } else if (z.imag() < 0.0) {
      EXPECT_LE(std::abs(g - semicircle_cauchy(z, Branch::ContinuedThroughCut)), 1e-12);
    }
  }
}

TEST(SemicircleCauchy, ContinuedBranchGrowsLikeZ) {
  const cplx z(0.0, -1e6);
  const cplx g = semicircle_cauchy(z, Branch::ContinuedThroughCut);
  EXPECT_NEAR(std::abs(g / z - 1.0), 0.0, 1e-6);
  EXPECT_THROW(semicircle_cauchy(kI, Branch::ContinuedThroughCut), DomainError);
  // On the real axis it is the limit from below.
  const cplx below = semicircle_cauchy(cplx(0.5, -1e-12), Branch::ContinuedThroughCut);
  EXPECT_LE(std::abs(semicircle_cauchy(0.5, Branch::ContinuedThroughCut) - below), 1e-9);
}

TEST(SemicircleCauchyInverse, ValuesAndRoundTrip) {
  EXPECT_NEAR(std::abs(semicircle_cauchy_inverse(-kI)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(semicircle_cauchy_inverse(kGolden * kI) - kI), 0.0, 1e-15);
  EXPECT_THROW(semicircle_cauchy_inverse(0.0), DomainError);
  std::mt19937_64 rng(9);
  for (int n = 0; n < 100; ++n) {
    const cplx z = oracle::random_upper(rng);
    EXPECT_LE(std::abs(semicircle_cauchy_inverse(semicircle_cauchy(z, Branch::UpperPrincipal)) - z), 1e-12);
  }
}

TEST(SemicircleCauchyInverse, HalfPlaneMapping) {
  EXPECT_GT(semicircle_cauchy_inverse(std::polar(0.5, -1.0)).imag(), 0.0);
  EXPECT_LT(semicircle_cauchy_inverse(std::polar(1.5, -1.0)).imag(), 0.0);
}

TEST(QGaussianCauchy, SemicircleAtZero) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 50; ++n) {
    const cplx z = oracle::random_upper(rng);
    EXPECT_EQ(q_gaussian_cauchy(z, QParam(0.0), Branch::UpperPrincipal),
              semicircle_cauchy(z, Branch::UpperPrincipal));
  }
}

TEST(QGaussianCauchy, ProbabilityNormalization) {
  for (double q : {0.0, 0.5, 0.9}) {
    const cplx z(0.0, 1e6);
    EXPECT_NEAR(std::abs(z * q_gaussian_cauchy(z, QParam(q), Branch::UpperPrincipal) - 1.0), 0.0, 1e-6);
  }
}

TEST(QGaussianCauchy, ReferenceValueAndQuadrature) {
  const QParam q(0.5);
  const cplx z(1.0, 1.0);
  const cplx g = q_gaussian_cauchy(z, q, Branch::UpperPrincipal);
  EXPECT_NEAR(g.real(), oracle::frozen::cauchy_half_at_1_plus_i_re, 1e-14);
  EXPECT_NEAR(g.imag(), oracle::frozen::cauchy_half_at_1_plus_i_im, 1e-14);
  const cplx quad = oracle::trapezoid_on_support(
      [&](double x) { return q_gaussian_density(x, q) / (z - x); }, 2000);
  EXPECT_LE(std::abs(g - quad), 1e-8);
}

TEST(QGaussianCauchy, ConjugateSymmetry) {
  std::mt19937_64 rng(2);
  for (double q : {0.2, 0.7}) {
    for (int n = 0; n < 200; ++n) {
      const cplx z = oracle::random_upper(rng);
      const cplx up = q_gaussian_cauchy(z, QParam(q), Branch::UpperPrincipal);
      const cplx down = q_gaussian_cauchy(std::conj(z), QParam(q), Branch::UpperPrincipal);
      EXPECT_LE(std::abs(down - std::conj(up)), 1e-13);
    }
  }
}

TEST(FTransform, RaisesImaginaryPart) {
  std::mt19937_64 rng(4);
  for (double q : {0.0, 0.25, 0.5, 0.75, 0.9}) {
    for (int n = 0; n < 2000; ++n) {
      const cplx z = oracle::random_upper(rng);
      EXPECT_GT(f_transform(z, QParam(q)).imag(), z.imag()) << "q=" << q << " z=" << z;
    }
  }
}

TEST(InvertG, IdentityAtZero) {
  const cplx t(0.3, -0.7);
  EXPECT_EQ(invert_g(t, QParam(0.0)), t);
}

TEST(InvertG, RoundTrip) {
  const QParam q(0.5);
  std::mt19937_64 rng(6);
  for (int n = 0; n < 100; ++n) {
    const cplx t = std::conj(oracle::random_upper(rng));
    const InversionResult r = invert_g_detailed(t, q);
    EXPECT_LE(std::abs(g_q(r.u, q) - t), 1e-12);
    EXPECT_LT(r.u.imag(), 0.0);
    EXPECT_LE(r.residual, 1e-12);
  }
}

TEST(InvertG, RecoversInteriorPoint) {
  const QParam q(0.5);
  const cplx u(0.0, -0.5);
  EXPECT_LE(std::abs(invert_g(g_q(u, q), q) - u), 1e-10);
}

TEST(InvertG, PicksTheBranchThroughTheOrigin) {
  // Near 0 the inverse is a perturbation of the identity.
  const QParam q(0.8);
  const cplx t(1e-3, -2e-3);
  EXPECT_LE(std::abs(invert_g(t, q) - t), 1e-8);
}

TEST(InvertG, Errors) {
  EXPECT_THROW(invert_g(cplx(0.2, 0.1), QParam(0.5)), DomainError);
  EXPECT_THROW(invert_g(cplx(0.2, 0.0), QParam(0.5)), DomainError);
  InversionPolicy impossible;
  impossible.newton_tol = 1e-30;
  EXPECT_THROW(invert_g(cplx(3.0, -1.0), QParam(0.5), impossible), NonConvergence);
  InversionPolicy empty;
  empty.continuation_steps = 0;
  EXPECT_THROW(invert_g(cplx(3.0, -1.0), QParam(0.5), empty), DomainError);
}

TEST(VoiculescuPhi, SemicircleIsOneOverZ) {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 100; ++n) {
    const cplx z = oracle::random_upper(rng);
    EXPECT_LE(std::abs(voiculescu_phi(z, QParam(0.0)) - 1.0 / z), 1e-10);
  }
}

TEST(VoiculescuPhi, LargeArgumentSeesVariance) {
  const double qv = 0.5;
  const cplx z(0.0, 1e3);
  const cplx scaled = voiculescu_phi(z, QParam(qv)) * z / (1.0 - qv);
  EXPECT_LE(std::abs(scaled - 1.0), 1e-3);
}

TEST(VoiculescuPhi, NonPositiveImaginaryPartNearAxis) {
  EXPECT_LE(voiculescu_phi(cplx(0.1, 0.01), QParam(0.7)).imag(), 1e-9);
  EXPECT_THROW(voiculescu_phi(cplx(0.1, -0.01), QParam(0.7)), DomainError);
}

TEST(VoiculescuPhi, EqualsInverseMinusIdentity) {
  const QParam q(0.4);
  const cplx z(-1.3, 0.2);
  const PhiResult r = voiculescu_phi_detailed(z, q);
  EXPECT_LE(std::abs(r.phi - (f_transform_inverse(z, q) - z)), 1e-14);
  EXPECT_GT(r.inversion.continuation_steps, 0);
}

TEST(FTransform, InverseRoundTrip) {
  std::mt19937_64 rng(10);
  for (double q : {0.1, 0.5, 0.9}) {
    for (int n = 0; n < 200; ++n) {
      const cplx z = oracle::random_upper(rng);
      const cplx back = f_transform_inverse(f_transform(z, QParam(q)), QParam(q));
      EXPECT_LE(std::abs(back - z), 1e-10) << "q=" << q << " z=" << z;
    }
  }
}
