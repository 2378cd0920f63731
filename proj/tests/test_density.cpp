#include <gtest/gtest.h>

#include <cmath>

#include "qgfid/density.hpp"
#include "qgfid/transforms.hpp"
#include "support/oracles.hpp"

using namespace qgfid;
using oracle::cplx;

TEST(Density, SemicircleAtZero) {
  EXPECT_NEAR(q_gaussian_density(0.0, QParam(0.0)), 1.0 / oracle::kPi, 1e-16);
  double worst = 0.0;
  for (int j = 0; j <= 10000; ++j) {
    const double x = -2.0 + 4.0 * j / 10000.0;
    worst = std::max(worst, std::fabs(q_gaussian_density(x, QParam(0.0)) - oracle::semicircle_density(x)));
  }
  EXPECT_LE(worst, 1e-14);
}

TEST(Density, VanishesAtEndpoints) {
  for (double q : {0.0, 0.3, 0.9}) {
    EXPECT_EQ(q_gaussian_density(2.0, QParam(q)), 0.0);
    EXPECT_EQ(q_gaussian_density(-2.0, QParam(q)), 0.0);
    EXPECT_EQ(q_gaussian_density_theta(2.0, QParam(q)), 0.0);
    EXPECT_NEAR(q_gaussian_density_theta(-2.0, QParam(q)), 0.0, 1e-15);
  }
}

TEST(Density, ReferenceValues) {
  const QParam q(0.5);
  EXPECT_NEAR(q_gaussian_density(0.0, q), oracle::frozen::density_half_at_0, 1e-14);
  EXPECT_NEAR(q_gaussian_density(1.0, q), oracle::frozen::density_half_at_1, 1e-14);
  EXPECT_NEAR(q_gaussian_density(1.7, q), oracle::frozen::density_half_at_1_7, 1e-14);
}

TEST(Density, OutsideSupportThrows) {
  EXPECT_THROW(q_gaussian_density(2.0001, QParam(0.5)), DomainError);
  EXPECT_THROW(q_gaussian_density_theta(-2.5, QParam(0.5)), DomainError);
}

TEST(Density, EvenAndNonNegative) {
  for (double q : {0.0, 0.1, 0.5, 0.9, 0.99}) {
    for (int j = 0; j <= 10000; ++j) {
      const double x = -2.0 + 4.0 * j / 10000.0;
      const double f = q_gaussian_density_unclamped(x, QParam(q));
      EXPECT_GE(f, -1e-12);
      EXPECT_NEAR(f, q_gaussian_density_unclamped(-x, QParam(q)), 1e-14);
    }
  }
}

TEST(ThetaDensity, SelectsPowerReadingAndAgrees) {
  const QParam q(0.3);
  const ThetaDensityCalibration cal = calibrate_theta_density(q);
  EXPECT_EQ(cal.reading, ThetaDensityReading::OneMinusQPower);
  EXPECT_FALSE(cal.literal_product_converges);
  EXPECT_LT(cal.raw_gap_power, 1e-12);
  EXPECT_GT(cal.raw_gap_literal, 1e-3);
  EXPECT_NEAR(cal.normalization, 1.0, 1e-12);
  double worst = 0.0;
  for (int j = 0; j <= 100; ++j) {
    const double x = -2.0 + 4.0 * j / 100.0;
    worst = std::max(worst, std::fabs(q_gaussian_density_theta(x, q, cal) - q_gaussian_density(x, q)));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(ThetaDensity, AgreesAtOneHalf) {
  EXPECT_NEAR(q_gaussian_density_theta(1.0, QParam(0.5)), q_gaussian_density(1.0, QParam(0.5)), 1e-10);
  EXPECT_NEAR(q_gaussian_density_theta(0.0, QParam(0.0)), 1.0 / oracle::kPi, 1e-15);
  EXPECT_NEAR(q_gaussian_density(0.7, QParam(0.6), DensityForm::ThetaProduct),
              q_gaussian_density(0.7, QParam(0.6), DensityForm::ChebyshevSeries), 1e-10);
}

TEST(Quadrature, Normalization) {
  for (int j = 0; j <= 9; ++j) {
    const QuadratureResult r = integrate_density(QParam(0.1 * j), IdentityWeight{}, 1e-12);
    EXPECT_NEAR(r.value.real(), 1.0, 1e-10) << "q=" << 0.1 * j;
    EXPECT_EQ(r.value.imag(), 0.0);
  }
}

TEST(Quadrature, SemicircleCauchyAtI) {
  const QuadratureResult r = integrate_density(QParam(0.0), CauchyKernel{cplx(0.0, 1.0)}, 1e-12);
  EXPECT_LE(std::abs(r.value - cplx(0.0, (1.0 - std::sqrt(5.0)) / 2.0)), 1e-10);
}

TEST(Quadrature, SecondMoment) {
  const QuadratureResult r = integrate_density(QParam(0.5), MonomialWeight{2}, 1e-12);
  EXPECT_NEAR(r.value.real(), 0.5, 1e-8);
}

TEST(Quadrature, AgreesWithPeriodicTrapezoid) {
  const auto f = [](double x) { return cplx(std::exp(x) * std::sqrt(4.0 - x * x)); };
  const QuadratureResult r = integrate_on_support(f, 1e-13);
  EXPECT_LE(std::abs(r.value - oracle::trapezoid_on_support(f, 4000)), 1e-12);
  EXPECT_LE(r.error_estimate, 1e-13);
}

TEST(Quadrature, FailureAndDomainChecks) {
  EXPECT_THROW(integrate_on_support([](double x) { return cplx(std::sin(1e4 * x)); }, 1e-15, 4), QuadFailure);
  EXPECT_THROW(integrate_density(QParam(0.5), CauchyKernel{cplx(1.0, 0.0)}, 1e-10), DomainError);
  EXPECT_THROW(integrate_density(QParam(0.5), MonomialWeight{-1}, 1e-10), DomainError);
}

TEST(Quadrature, TermByTermCauchyIdentity) {
  // (1/2π) ∫ U_{2k-2}(x/2) √(4-x²) / (z-x) dx = G_s(z)^{2k-1}.
  const cplx z(1.0, 1.0);
  const cplx gs = semicircle_cauchy(z, Branch::UpperPrincipal);
  for (int k = 1; k <= 5; ++k) {
    const QuadratureResult r = integrate_on_support(
        [&](double x) {
          return chebyshev_u(2 * k - 2, 0.5 * x) * std::sqrt(std::max(0.0, 4.0 - x * x)) /
                 (2.0 * oracle::kPi) / (z - x);
        },
        1e-13);
    EXPECT_LE(std::abs(r.value - std::pow(gs, 2 * k - 1)), 1e-9) << "k=" << k;
  }
}

TEST(Jacobi, HandValues) {
  const auto m = jacobi_moments(4, QParam(0.5), 3);
  ASSERT_EQ(m.size(), 5u);
  EXPECT_DOUBLE_EQ(m[0], 1.0);
  EXPECT_EQ(m[1], 0.0);
  EXPECT_NEAR(m[2], 0.5, 1e-15);
  EXPECT_EQ(m[3], 0.0);
  EXPECT_NEAR(m[4], 0.625, 1e-15);
}

TEST(Jacobi, SemicircleCatalanNumbers) {
  const auto m = jacobi_moments(10, QParam(0.0), 6);
  const double catalan[] = {1, 1, 2, 5, 14, 42};
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(m[2 * k], catalan[k], 1e-12);
}

TEST(Jacobi, OperatorEntries) {
  const JacobiOperator op = JacobiOperator::build(QParam(0.5), 20);
  ASSERT_EQ(op.offdiag.size(), 20u);
  for (std::size_t n = 1; n < op.offdiag.size(); ++n) {
    EXPECT_GT(op.offdiag[n], op.offdiag[n - 1]);
    EXPECT_LE(op.offdiag[n], 1.0);
  }
}

TEST(Jacobi, Preconditions) {
  EXPECT_THROW(jacobi_moments(3, QParam(0.5), 10), DomainError);
  EXPECT_THROW(jacobi_moments(10, QParam(0.5), 5), DomainError);
}

TEST(Jacobi, MatchesQuadratureMoments) {
  for (double q : {0.0, 0.25, 0.5, 0.75, 0.9}) {
    const auto m = jacobi_moments(10, QParam(q), 6);
    for (int k = 0; k <= 10; ++k) {
      const QuadratureResult r = integrate_density(QParam(q), MonomialWeight{k}, 1e-12);
      EXPECT_NEAR(r.value.real(), m[k], 1e-7) << "q=" << q << " k=" << k;
    }
  }
}
