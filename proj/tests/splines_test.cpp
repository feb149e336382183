#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kanids/rng.hpp"
#include "kanids/splines.hpp"
#include "oracles.hpp"

using namespace kanids;

TEST(BuildGrid, DegreeZeroIsCorePartition) {
  const auto g = build_grid(0, 2, 0.0, 1.0);
  EXPECT_EQ(g.knots, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(g.basis_count(), 2u);
}

TEST(BuildGrid, PaperConfiguration) {
  const auto g = build_grid(5, 7, -1.0, 1.0);
  EXPECT_EQ(g.knots.size(), 18u);
  EXPECT_EQ(g.basis_count(), 12u);
  for (std::size_t i = 1; i < g.knots.size(); ++i) EXPECT_NEAR(g.knots[i] - g.knots[i - 1], 2.0 / 7.0, 1e-15);
}

TEST(BuildGrid, LinearExtensionByHand) {
  const auto g = build_grid(1, 1, 0.0, 1.0);
  EXPECT_EQ(g.knots, (std::vector<double>{-1.0, 0.0, 1.0, 2.0}));
  EXPECT_EQ(g.basis_count(), 2u);
}

TEST(BuildGrid, RejectsBadArguments) {
  for (auto f : {+[] { build_grid(2, 0, 0, 1); }, +[] { build_grid(2, 3, 1, 1); }, +[] { build_grid(-1, 3, 0, 1); },
                 +[] { build_grid(2, 3, 2, 1); }}) {
    try {
      f();
      FAIL() << "expected invalid-argument";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
  }
}

TEST(BasisValues, DegreeZeroIndicator) {
  const auto g = build_grid(0, 2, 0.0, 1.0);
  EXPECT_EQ(basis_values(g, 0.25), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(basis_values(g, 1.0), (std::vector<double>{0.0, 1.0}));
}

TEST(BasisValues, QuadraticMidpointMatchesHandRecursion) {
  const auto g = build_grid(2, 3, 0.0, 3.0);
  const auto b = basis_values(g, 1.5);
  const auto expected = oracle::basis(oracle::uniform_knots(2, 3, 0.0, 3.0), 2, 3, 1.5);
  const std::vector<double> frozen{0.0, 0.125, 0.75, 0.125, 0.0};
  ASSERT_EQ(b.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(expected[i], frozen[i], 1e-15);
    EXPECT_NEAR(b[i], frozen[i], 1e-15);
  }
}

TEST(BasisValues, PaperGridPartitionOfUnity) {
  const auto g = build_grid(5, 7, -1.0, 1.0);
  const auto b = basis_values(g, 0.3);
  EXPECT_EQ(b.size(), 12u);
  EXPECT_NEAR(std::accumulate(b.begin(), b.end(), 0.0), 1.0, 1e-12);
}

TEST(BasisValues, MatchesRecursiveOracleEverywhere) {
  Rng rng(17);
  for (int k = 0; k <= 6; ++k)
    for (int G : {1, 3, 7, 16}) {
      const auto g = build_grid(k, G, -1.0, 1.0);
      const auto knots = oracle::uniform_knots(k, G, -1.0, 1.0);
      for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        const auto got = basis_values(g, x);
        const auto want = oracle::basis(knots, k, G, x);
        for (std::size_t j = 0; j < got.size(); ++j) ASSERT_NEAR(got[j], want[j], 1e-12) << k << " " << G << " " << x;
      }
    }
}

TEST(BasisValues, DomainTolerance) {
  const auto g = build_grid(3, 4, -1.0, 1.0);
  EXPECT_NO_THROW(basis_values(g, 1.0 + 5e-10));
  EXPECT_EQ(basis_values(g, 1.0 + 5e-10), basis_values(g, 1.0));
  try {
    basis_values(g, 1.0 + 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainViolation);
  }
  EXPECT_THROW(basis_derivatives(g, -1.1), Error);
  EXPECT_THROW(basis_values(g, std::nan("")), Error);
}

TEST(BasisDerivatives, DegreeZeroIsZero) {
  const auto g = build_grid(0, 4, 0.0, 1.0);
  for (double x : {0.1, 0.3, 0.77}) {
    const auto d = basis_derivatives(g, x);
    for (double v : d) EXPECT_EQ(v, 0.0);
  }
}

TEST(BasisDerivatives, SumToZero) {
  for (int k = 1; k <= 6; ++k) {
    const auto g = build_grid(k, 7, -1.0, 1.0);
    for (double x : {-0.93, -0.2, 0.01, 0.5, 0.99}) {
      const auto d = basis_derivatives(g, x);
      EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 0.0, 1e-10);
    }
  }
}

TEST(BasisDerivatives, QuadraticMidpointFiniteDifference) {
  const auto g = build_grid(2, 3, 0.0, 3.0);
  const double h = 1e-5;
  const auto d = basis_derivatives(g, 1.5);
  const auto up = basis_values(g, 1.5 + h);
  const auto down = basis_values(g, 1.5 - h);
  for (std::size_t j = 0; j < d.size(); ++j) EXPECT_NEAR(d[j], (up[j] - down[j]) / (2 * h), 1e-6);
  // Hand values at the midpoint of the central span: [0, -0.5, 0, 0.5, 0].
  EXPECT_NEAR(d[1], -0.5, 1e-12);
  EXPECT_NEAR(d[2], 0.0, 1e-12);
  EXPECT_NEAR(d[3], 0.5, 1e-12);
}

TEST(SplineEval, ConstantAndZeroCoefficients) {
  const auto g = build_grid(5, 7, -1.0, 1.0);
  const std::vector<double> c(12, 2.5), z(12, 0.0);
  for (double x : {-1.0, -0.4, 0.0, 0.61, 1.0}) {
    EXPECT_NEAR(spline_eval(g, c, x), 2.5, 1e-12);
    EXPECT_EQ(spline_eval(g, z, x), 0.0);
  }
}

TEST(SplineEval, SingleCoefficientPicksBasis) {
  const auto g = build_grid(2, 3, 0.0, 3.0);
  EXPECT_NEAR(spline_eval(g, std::vector<double>{0, 1, 0, 0, 0}, 1.5), 0.125, 1e-15);
}

TEST(SplineEval, LengthMismatch) {
  const auto g = build_grid(2, 3, 0.0, 3.0);
  try {
    spline_eval(g, std::vector<double>(4, 1.0), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}

// Properties -----------------------------------------------------------------

TEST(SplineProperties, PartitionOfUnityNonNegativityLocalSupport) {
  Rng rng(3);
  for (int k = 0; k <= 6; ++k)
    for (int G = 1; G <= 16; ++G) {
      const auto g = build_grid(k, G, -1.0, 1.0);
      for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        const auto b = basis_values(g, x);
        double sum = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
          ASSERT_GE(b[j], 0.0);
          // Basis j lives on [t_j, t_{j+k+1}].
          if (x < g.knots[j] || x > g.knots[j + k + 1]) ASSERT_EQ(b[j], 0.0);
          sum += b[j];
        }
        ASSERT_LT(std::abs(sum - 1.0), 1e-9);
      }
    }
}

TEST(SplineProperties, DerivativeMatchesFiniteDifferenceAwayFromKnots) {
  Rng rng(5);
  const double h = 1e-5;
  for (int k = 1; k <= 6; ++k)
    for (int G : {2, 5, 7, 12}) {
      const auto g = build_grid(k, G, -1.0, 1.0);
      for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(-0.99, 0.99);
        const bool near_knot = std::any_of(g.knots.begin(), g.knots.end(),
                                           [&](double t) { return std::abs(x - t) < 1e-3; });
        if (near_knot) continue;
        const auto d = basis_derivatives(g, x);
        const auto up = basis_values(g, x + h);
        const auto down = basis_values(g, x - h);
        for (std::size_t j = 0; j < d.size(); ++j) ASSERT_LT(std::abs(d[j] - (up[j] - down[j]) / (2 * h)), 1e-5);
      }
    }
}

TEST(SplineProperties, LinearInCoefficients) {
  Rng rng(9);
  const auto g = build_grid(5, 7, -1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c1(12), c2(12), mix(12);
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    for (std::size_t j = 0; j < 12; ++j) {
      c1[j] = rng.normal();
      c2[j] = rng.normal();
      mix[j] = a * c1[j] + b * c2[j];
    }
    const double x = rng.uniform(-1, 1);
    EXPECT_NEAR(spline_eval(g, mix, x), a * spline_eval(g, c1, x) + b * spline_eval(g, c2, x), 1e-12);
  }
}
