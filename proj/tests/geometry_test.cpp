#include <gtest/gtest.h>

#include <cmath>

#include "horoopt/geometry.hpp"
#include "horoopt/losses.hpp"
#include "horoopt/spd.hpp"
#include "support/test_support.hpp"

namespace horoopt {
namespace {

using testing::busemann_closed_form;
using testing::EuclideanSpace;
using testing::random_orthogonal;
using testing::random_spd;
using testing::random_tangent;

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

TEST(Busemann, VanishesAtBase) {
  testing::Rng rng(1);
  const SpdManifold m(3);
  const SpdPoint p = random_spd(3, rng);
  const TangentVec v = random_tangent(p, rng, 1.0);
  EXPECT_NEAR(busemann(m, p, v, p, 1e-8).value, 0.0, 1e-8);
}

TEST(Busemann, PointsOnTheRay) {
  testing::Rng rng(2);
  const SpdManifold m(3);
  const SpdPoint p = random_spd(3, rng);
  const TangentVec v = random_tangent(p, rng, 1.0);
  for (double s : {0.5, 2.0, 5.0}) {
    const SpdPoint x = spd_exp(p, (-s) * v);
    EXPECT_NEAR(busemann(m, p, v, x, 1e-8).value, -s, 1e-7);
  }
}

TEST(Busemann, CommutingFamilyIsLinear) {
  // Log coordinates flatten the commuting family: the ray is exp(-t v / |v|),
  // so B = <v, log x> for p = I.
  const SpdManifold m(2);
  const TangentVec v(diag2(-1.0, 0.0));
  for (double c : {-1.5, 0.3, 2.0}) {
    const SpdPoint x(diag2(std::exp(c), 1.0));
    EXPECT_NEAR(busemann(m, SpdPoint::identity(2), v, x, 1e-9).value, -c, 1e-8);
  }
  const TangentVec w(diag2(0.6, -0.8));
  const SpdPoint x(diag2(std::exp(1.0), std::exp(2.0)));
  EXPECT_NEAR(busemann(m, SpdPoint::identity(2), w, x, 1e-9).value, 0.6 * 1.0 - 0.8 * 2.0, 1e-8);
}

TEST(Busemann, Euclidean) {
  const EuclideanSpace m(2);
  Vector v(2), x(2);
  v << 3.0, 4.0;
  x << 1.0, -2.0;
  // Flat case: B_{p,v}(x) = <v, x - p>.
  EXPECT_NEAR(busemann(m, Vector::Zero(2), v, x, 1e-7).value, 3.0 - 8.0, 1e-6);
}

TEST(Busemann, MatchesClosedForm) {
  testing::Rng rng(3);
  for (int n : {2, 3, 4}) {
    const SpdManifold m(static_cast<std::size_t>(n));
    for (int k = 0; k < 200; ++k) {
      const SpdPoint p = random_spd(n, rng);
      const SpdPoint x = random_spd(n, rng);
      const TangentVec v = random_tangent(p, rng, 1.5);
      const BusemannEval e = busemann(m, p, v, x, 1e-7);
      const double exact = busemann_closed_form(p, v, x);
      EXPECT_NEAR(e.value, exact, 1e-5) << "n=" << n;
      EXPECT_LE(e.convergence_gap, 1e-7);
      // b(t) decreases to its limit.
      EXPECT_GE(e.value, exact - 1e-9);
    }
  }
}

TEST(Busemann, MatchesClosedFormWithRepeatedDirections) {
  testing::Rng rng(4);
  const SpdManifold m(4);
  const Matrix q = random_orthogonal(4, rng);
  Vector h(4);
  h << 1.0, 1.0, -0.5, -0.5;
  const TangentVec v(symmetrize(q * h.asDiagonal() * q.transpose()));
  for (int k = 0; k < 10; ++k) {
    const SpdPoint x = random_spd(4, rng);
    EXPECT_NEAR(busemann(m, SpdPoint::identity(4), v, x, 1e-7).value,
                busemann_closed_form(SpdPoint::identity(4), v, x), 1e-5);
  }
}

TEST(Busemann, ScalesWithTheDirection) {
  testing::Rng rng(5);
  const SpdManifold m(3);
  for (int k = 0; k < 10; ++k) {
    const SpdPoint p = random_spd(3, rng);
    const SpdPoint x = random_spd(3, rng);
    const TangentVec v = random_tangent(p, rng, 1.0);
    const double base = busemann(m, p, v, x, 1e-8).value;
    for (double c : {0.5, 2.0, 7.0}) {
      EXPECT_NEAR(busemann(m, p, c * v, x, 1e-8).value, c * base, 1e-6 * c);
    }
  }
}

TEST(Busemann, IsOneLipschitzForUnitDirections) {
  testing::Rng rng(6);
  const SpdManifold m(3);
  for (int k = 0; k < 50; ++k) {
    const SpdPoint p = random_spd(3, rng);
    const TangentVec v = random_tangent(p, rng, 1.0);
    const SpdPoint x = random_spd(3, rng);
    const SpdPoint y = random_spd(3, rng);
    const double bx = busemann(m, p, v, x, 1e-7).value;
    const double by = busemann(m, p, v, y, 1e-7).value;
    EXPECT_LE(std::abs(bx - by), m.dist(x, y) + 2e-7);
  }
}

TEST(Busemann, IsGeodesicallyConvex) {
  testing::Rng rng(7);
  const SpdManifold m(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const SpdPoint p = random_spd(3, rng);
    const TangentVec v = random_tangent(p, rng, 1.0);
    const SpdPoint x = random_spd(3, rng);
    const SpdPoint y = random_spd(3, rng);
    const double s = unif(rng);
    const double mid = busemann(m, p, v, spd_geodesic(x, y, s), 1e-7).value;
    const double bx = busemann(m, p, v, x, 1e-7).value;
    const double by = busemann(m, p, v, y, 1e-7).value;
    EXPECT_LE(mid, (1 - s) * bx + s * by + 2e-7);
  }
}

TEST(Busemann, RejectsBadInput) {
  const SpdManifold m(2);
  const SpdPoint id = SpdPoint::identity(2);
  EXPECT_THROW(busemann(m, id, TangentVec::zero(2), id, 1e-6), InvalidArgument);
  EXPECT_THROW(busemann(m, id, TangentVec(diag2(1, 0)), id, 0.0), InvalidArgument);
  EXPECT_THROW(busemann(m, id, TangentVec(diag2(1, 0)), SpdPoint(diag2(2, 3)), 1e-30,
                        BusemannOptions{2}),
               ConvergenceError);
}

TEST(HConvexity, ZeroAtCoincidentPoints) {
  testing::Rng rng(8);
  const SpdManifold m(3);
  const SpdPoint y = random_spd(3, rng);
  const LossTerm tyler = LossTerm::tyler(testing::random_gaussian(3, 1, rng));
  EXPECT_NEAR(check_h_convexity(m, tyler, y, y, 1e-8).margin, 0.0, 1e-8);
}

TEST(HConvexity, TylerAndFrechetMarginsAreNonnegative) {
  testing::Rng rng(9);
  const double tol = 1e-4;
  for (int n : {2, 3, 4}) {
    const SpdManifold m(static_cast<std::size_t>(n));
    for (int k = 0; k < 100; ++k) {
      const SpdPoint y = random_spd(n, rng);
      const SpdPoint x = random_spd(n, rng);
      const LossTerm tyler = LossTerm::tyler(testing::random_gaussian(n, 1, rng));
      const CertificateMargin c = check_h_convexity(m, tyler, y, x, tol);
      ASSERT_GE(c.margin, -(tol + 1e-6));
      const LossTerm fre = LossTerm::frechet(random_spd(n, rng));
      ASSERT_GE(check_h_convexity(m, fre, y, x, tol).margin, -(tol + 1e-6));
    }
  }
}

TEST(StrongHConvexity, Examples) {
  testing::Rng rng(10);
  const SpdManifold m(4);
  const SpdPoint y = random_spd(4, rng);
  const SpdPoint sample = random_spd(4, rng);
  const LossTerm f = LossTerm::frechet(sample);
  EXPECT_NEAR(check_strong_h_convexity(m, f, 1.0, y, y).margin, 0.0, 1e-8);
  EXPECT_NEAR(check_strong_h_convexity(m, f, 1.0, y, sample).margin, 0.0, 1e-8);
  EXPECT_NEAR(check_strong_h_convexity(m, f, 2.5, y, y).margin, 0.0, 1e-8);
  EXPECT_THROW(check_strong_h_convexity(m, f, 0.0, y, y), InvalidArgument);
}

TEST(StrongHConvexity, FrechetIsOneStronglyHConvex) {
  testing::Rng rng(11);
  const SpdManifold m(4);
  for (int k = 0; k < 1000; ++k) {
    const SpdPoint y = random_spd(4, rng);
    const SpdPoint x = random_spd(4, rng);
    const LossTerm f = LossTerm::frechet(random_spd(4, rng));
    ASSERT_GE(check_strong_h_convexity(m, f, 1.0, y, x).margin, -1e-8);
  }
}

TEST(Stewart, DegenerateCases) {
  testing::Rng rng(12);
  const SpdManifold m(3);
  const SpdPoint a = random_spd(3, rng);
  const SpdPoint b = random_spd(3, rng);
  const SpdPoint c = random_spd(3, rng);
  EXPECT_NEAR(check_stewart(m, a, b, b, 0.5).margin, 0.0, 1e-9);
  const CertificateMargin s0 = check_stewart(m, a, b, c, 0.0);
  EXPECT_NEAR(s0.margin, 0.0, 1e-9 * std::pow(s0.scale, 3));
}

TEST(Stewart, EqualityOnAFlatThreeFourFiveTriangle) {
  // Log coordinates of a, b, c: (0,0), (3,0), (0,4).
  const SpdManifold m(2);
  const SpdPoint a = SpdPoint::identity(2);
  const SpdPoint b(diag2(std::exp(3.0), 1.0));
  const SpdPoint c(diag2(1.0, std::exp(4.0)));
  for (double s : {0.25, 0.5, 0.9}) {
    const CertificateMargin r = check_stewart(m, a, b, c, s);
    EXPECT_NEAR(r.term("|bc|"), 5.0, 1e-12);
    EXPECT_NEAR(r.margin, 0.0, 1e-9);
  }
}

TEST(Stewart, HoldsOnRandomTriangles) {
  testing::Rng rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n : {2, 4, 8}) {
    const SpdManifold m(static_cast<std::size_t>(n));
    for (int k = 0; k < 500; ++k) {
      const CertificateMargin r = check_stewart(m, random_spd(n, rng), random_spd(n, rng),
                                                random_spd(n, rng), unif(rng));
      ASSERT_GE(r.margin, -1e-9 * std::pow(r.scale, 3));
    }
  }
}

TEST(Stewart, EuclideanEquality) {
  testing::Rng rng(14);
  const EuclideanSpace m(3);
  for (int k = 0; k < 100; ++k) {
    const Vector a = testing::random_gaussian(3, 1, rng);
    const Vector b = testing::random_gaussian(3, 1, rng);
    const Vector c = testing::random_gaussian(3, 1, rng);
    const CertificateMargin r = check_stewart(m, a, b, c, 0.3);
    EXPECT_NEAR(r.margin, 0.0, 1e-9 * std::pow(std::max(1.0, r.scale), 3));
  }
}

TEST(CosineLaw, Examples) {
  testing::Rng rng(15);
  const SpdManifold m(4);
  const SpdPoint a = random_spd(4, rng);
  const SpdPoint b = random_spd(4, rng);
  EXPECT_NEAR(check_cosine_law(m, a, a, b).margin, 0.0, 1e-9);
  // Commuting triple: flat, equality.
  const Matrix q = random_orthogonal(3, rng);
  Vector la(3), lp(3), lb(3);
  la << 0.5, -1.0, 2.0;
  lp << 1.0, 0.0, -0.5;
  lb << -1.0, 1.5, 0.3;
  const SpdManifold m3(3);
  const CertificateMargin r = check_cosine_law(m3, testing::spd_in_basis(q, la),
                                               testing::spd_in_basis(q, lp),
                                               testing::spd_in_basis(q, lb));
  EXPECT_NEAR(r.margin, 0.0, 1e-9);
}

TEST(CosineLaw, HoldsOnRandomTriangles) {
  testing::Rng rng(16);
  const SpdManifold m(4);
  for (int k = 0; k < 2000; ++k) {
    const CertificateMargin r =
        check_cosine_law(m, random_spd(4, rng), random_spd(4, rng), random_spd(4, rng));
    ASSERT_GE(r.margin, -1e-9 * r.scale * r.scale);
  }
}

TEST(BusemannDescent, Examples) {
  testing::Rng rng(17);
  const SpdManifold m(4);
  const SpdPoint x = random_spd(4, rng);
  const TangentVec w = random_tangent(x, rng, 0.8);
  EXPECT_NEAR(check_busemann_descent(m, x, w, x, 1e-8).margin, 0.0, 1e-7);
  EXPECT_NEAR(check_busemann_descent(m, x, w, spd_exp(x, -w), 1e-8).margin, 0.0, 1e-7);
}

TEST(BusemannDescent, HoldsOnRandomInstances) {
  testing::Rng rng(18);
  const SpdManifold m(4);
  const double tol = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const SpdPoint x = random_spd(4, rng);
    const TangentVec w = random_tangent(x, rng, 1.0);
    const SpdPoint y = random_spd(4, rng);
    ASSERT_GE(check_busemann_descent(m, x, w, y, tol).margin, -tol);
  }
}

}  // namespace
}  // namespace horoopt
