#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "horoopt/matrix_io.hpp"
#include "horoopt/spd.hpp"
#include "support/test_support.hpp"

namespace horoopt {
namespace {

using testing::random_gaussian;
using testing::random_invertible;
using testing::random_spd;
using testing::random_symmetric;
using testing::random_tangent;
using testing::rel_err;

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

TEST(SymEig, Identity) {
  const SymEig e = sym_eig(Matrix::Identity(3, 3));
  EXPECT_TRUE(e.values.isApprox(Vector::Ones(3)));
}

TEST(SymEig, DiagonalIsSortedDescending) {
  const SymEig e = sym_eig(diag2(1.0, 4.0));
  EXPECT_DOUBLE_EQ(e.values(0), 4.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
  EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(0, 1)), 1.0, 1e-15);
}

TEST(SymEig, TwoByTwoByHand) {
  // det([[2-l, 1], [1, 2-l]]) = (l - 3)(l - 1).
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const SymEig e = sym_eig(a);
  EXPECT_NEAR(e.values(0), 3.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), r, 1e-14);
  EXPECT_NEAR(e.vectors(0, 0) * e.vectors(1, 0), 0.5, 1e-14);
  EXPECT_NEAR(e.vectors(0, 1) * e.vectors(1, 1), -0.5, 1e-14);
}

TEST(SymEig, ReconstructsRandomMatrices) {
  testing::Rng rng(7);
  for (int n : {2, 5, 16}) {
    const Matrix a = random_symmetric(n, rng).matrix();
    const SymEig e = sym_eig(a);
    const Matrix q = e.vectors;
    EXPECT_LE((q * q.transpose() - Matrix::Identity(n, n)).norm(), 1e-10 * n);
    EXPECT_LE((q * e.values.asDiagonal() * q.transpose() - a).norm(), 1e-9 * a.norm());
    for (int i = 1; i < n; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
  }
}

TEST(SymEig, RejectsNonFinite) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = a(1, 0) = std::nan("");
  EXPECT_THROW(sym_eig(a), NonFiniteValue);
}

TEST(MatrixFn, Examples) {
  EXPECT_LE(matrix_fn(Matrix::Identity(3, 3), MatrixFunction::log()).norm(), 1e-15);
  EXPECT_TRUE(matrix_fn(diag2(4, 9), MatrixFunction::sqrt()).isApprox(diag2(2, 3), 1e-15));
  EXPECT_TRUE(matrix_fn(diag2(4, 9), MatrixFunction::inv_sqrt()).isApprox(diag2(0.5, 1.0 / 3), 1e-15));
  EXPECT_TRUE(matrix_fn(diag2(4, 9), MatrixFunction::power(1.5)).isApprox(diag2(8, 27), 1e-14));
}

TEST(MatrixFn, ExpLogRoundTrip) {
  testing::Rng rng(11);
  for (int n : {2, 4, 8, 16}) {
    for (int k = 0; k < 20; ++k) {
      const SpdPoint a = random_spd(n, rng, 2.0);
      const Matrix back =
          matrix_fn(matrix_fn(a, MatrixFunction::log()), MatrixFunction::exp());
      EXPECT_LE(rel_err(back, a.matrix()), 1e-9);
    }
  }
}

TEST(MatrixFn, FloorViolationIsAnError) {
  EXPECT_THROW(matrix_fn(diag2(1.0, 0.0), MatrixFunction::log()), EigenvalueFloorViolation);
  EXPECT_THROW(matrix_fn(diag2(1.0, 1e-13), MatrixFunction::sqrt()), EigenvalueFloorViolation);
  EXPECT_THROW(matrix_fn(diag2(1.0, -1.0), MatrixFunction::power(0.5)), EigenvalueFloorViolation);
  // exp accepts any symmetric matrix.
  EXPECT_NO_THROW(matrix_fn(diag2(1.0, -1.0), MatrixFunction::exp()));
}

TEST(SpdPoint, ValidatesInput) {
  EXPECT_THROW(SpdPoint(Matrix::Zero(2, 3)), DimensionMismatch);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_THROW(SpdPoint{asym}, InvalidArgument);
  EXPECT_THROW(SpdPoint(diag2(1.0, -1.0)), EigenvalueFloorViolation);
  EXPECT_THROW(SpdPoint(diag2(1.0, 1e-13)), EigenvalueFloorViolation);
  Matrix inf = Matrix::Identity(2, 2);
  inf(0, 0) = INFINITY;
  EXPECT_THROW(SpdPoint{inf}, NonFiniteValue);
  EXPECT_NO_THROW(SpdPoint(diag2(1.0, 1e-11)));
}

TEST(SpdInner, Examples) {
  const SpdPoint id = SpdPoint::identity(2);
  const TangentVec i2(Matrix::Identity(2, 2));
  EXPECT_NEAR(spd_inner(id, i2, i2), 2.0, 1e-15);
  EXPECT_EQ(spd_inner(id, TangentVec::zero(2), i2), 0.0);
  EXPECT_NEAR(spd_inner(SpdPoint(diag2(2, 2)), i2, i2), 0.5, 1e-15);

  testing::Rng rng(3);
  const TangentVec u = random_symmetric(4, rng);
  const TangentVec v = random_symmetric(4, rng);
  EXPECT_NEAR(spd_inner(SpdPoint::identity(4), u, u), u.matrix().squaredNorm(), 1e-12);
  const SpdPoint x = random_spd(4, rng);
  EXPECT_NEAR(spd_inner(x, u, v), spd_inner(x, v, u), 1e-12);
  // Trace formula evaluated directly.
  const Matrix xi = x.matrix().inverse();
  EXPECT_NEAR(spd_inner(x, u, v), (xi * u.matrix() * xi * v.matrix()).trace(), 1e-10);
}

TEST(SpdInner, DimensionMismatch) {
  EXPECT_THROW(spd_inner(SpdPoint::identity(2), TangentVec::zero(3), TangentVec::zero(2)),
               DimensionMismatch);
}

TEST(SpdExp, Examples) {
  testing::Rng rng(5);
  const SpdPoint x = random_spd(3, rng);
  EXPECT_LE(rel_err(spd_exp(x, TangentVec::zero(3)).matrix(), x.matrix()), 1e-14);
  const SpdPoint e = spd_exp(SpdPoint::identity(2), TangentVec(diag2(0.3, -1.2)));
  EXPECT_TRUE(e.matrix().isApprox(diag2(std::exp(0.3), std::exp(-1.2)), 1e-14));
}

TEST(SpdExp, DistanceEqualsTangentNorm) {
  testing::Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    const SpdPoint x = random_spd(4, rng);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const TangentVec u = random_tangent(x, rng, unif(rng));
    EXPECT_NEAR(spd_dist(x, spd_exp(x, u)), spd_norm(x, u), 1e-10);
  }
}

TEST(SpdExp, OverflowIsReported) {
  EXPECT_THROW(spd_exp(SpdPoint::identity(2), TangentVec(diag2(800.0, 0.0))), NonFiniteValue);
}

TEST(SpdLog, Examples) {
  testing::Rng rng(8);
  const SpdPoint x = random_spd(3, rng);
  EXPECT_LE(spd_log(x, x).matrix().norm(), 1e-13);
  const double e2 = std::exp(2.0);
  EXPECT_TRUE(spd_log(SpdPoint::identity(2), SpdPoint(diag2(e2, e2))).matrix().isApprox(diag2(2, 2), 1e-14));
}

TEST(SpdLog, RoundTrips) {
  testing::Rng rng(9);
  for (int n : {2, 4, 8, 16}) {
    for (int k = 0; k < 25; ++k) {
      const SpdPoint x = random_spd(n, rng);
      const SpdPoint y = random_spd(n, rng);
      EXPECT_LE(rel_err(spd_exp(x, spd_log(x, y)).matrix(), y.matrix()), 1e-8);
      const TangentVec u = random_tangent(x, rng, 1.5);
      EXPECT_LE(rel_err(spd_log(x, spd_exp(x, u)).matrix(), u.matrix()), 1e-8);
    }
  }
}

TEST(SpdDist, Examples) {
  testing::Rng rng(10);
  const SpdPoint x = random_spd(4, rng);
  EXPECT_NEAR(spd_dist(x, x), 0.0, 1e-7);
  EXPECT_NEAR(spd_dist(SpdPoint::identity(2), SpdPoint(diag2(std::exp(2.0), 1.0))), 2.0, 1e-14);
}

TEST(SpdDist, AffineInvariance) {
  testing::Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    const SpdPoint x = random_spd(5, rng);
    const SpdPoint y = random_spd(5, rng);
    const Matrix a = random_invertible(5, rng, 1e3);
    const SpdPoint ax(symmetrize(a * x.matrix() * a.transpose()));
    const SpdPoint ay(symmetrize(a * y.matrix() * a.transpose()));
    const double d = spd_dist(x, y);
    EXPECT_LE(std::abs(spd_dist(ax, ay) - d), 1e-8 * std::max(1.0, d));
  }
}

TEST(SpdDist, MetricAxioms) {
  testing::Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    const SpdPoint x = random_spd(3, rng);
    const SpdPoint y = random_spd(3, rng);
    const SpdPoint z = random_spd(3, rng);
    const double xy = spd_dist(x, y);
    EXPECT_GE(xy, 0.0);
    EXPECT_NEAR(xy, spd_dist(y, x), 1e-10);
    EXPECT_LE(spd_dist(x, z), xy + spd_dist(y, z) + 1e-9);
    EXPECT_NEAR(xy, spd_norm(x, spd_log(x, y)), 1e-9);
  }
}

TEST(SpdGeodesic, Examples) {
  testing::Rng rng(14);
  const SpdPoint x = random_spd(3, rng);
  const SpdPoint y = random_spd(3, rng);
  EXPECT_EQ(spd_geodesic(x, y, 0.0).matrix(), x.matrix());
  EXPECT_EQ(spd_geodesic(x, y, 1.0).matrix(), y.matrix());
  const SpdPoint mid = spd_geodesic(SpdPoint::identity(2), SpdPoint(diag2(std::exp(4.0), 1.0)), 0.5);
  EXPECT_TRUE(mid.matrix().isApprox(diag2(std::exp(2.0), 1.0), 1e-14));
  EXPECT_THROW(spd_geodesic(x, y, 1.5), InvalidArgument);
  EXPECT_THROW(spd_geodesic(x, y, -0.1), InvalidArgument);
}

TEST(SpdGeodesic, AgreesWithExpOfScaledLogAndHasConstantSpeed) {
  testing::Rng rng(15);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const SpdPoint x = random_spd(4, rng);
    const SpdPoint y = random_spd(4, rng);
    const double t = unif(rng);
    const SpdPoint g = spd_geodesic(x, y, t);
    EXPECT_LE(rel_err(g.matrix(), spd_exp(x, t * spd_log(x, y)).matrix()), 1e-9);
    EXPECT_NEAR(spd_dist(x, g), t * spd_dist(x, y), 1e-9);
  }
}

TEST(SpdManifold, ChecksDimension) {
  const SpdManifold m(3);
  EXPECT_THROW(m.dist(SpdPoint::identity(2), SpdPoint::identity(2)), DimensionMismatch);
  EXPECT_THROW(SpdManifold(0), InvalidArgument);
}

TEST(SpdManifold, RayDistanceMatchesDirectEvaluation) {
  testing::Rng rng(16);
  const SpdManifold m(4);
  for (int k = 0; k < 20; ++k) {
    const SpdPoint p = random_spd(4, rng);
    const SpdPoint x = random_spd(4, rng);
    const TangentVec u = random_tangent(p, rng, 1.0);
    for (double t : {0.5, 2.0, 8.0}) {
      EXPECT_NEAR(m.ray_distance(p, u, t, x), spd_dist(spd_exp(p, (-t) * u), x), 1e-8);
    }
  }
}

TEST(SpdManifold, RayDistanceAtLargeHorizons) {
  // Commuting case: log-spectrum of x^{-1} exp(-t u) is -t h - log x.
  const SpdManifold m(2);
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 0.6;
  u(1, 1) = -0.8;
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = std::exp(1.0);
  x(1, 1) = std::exp(-2.0);
  for (double t : {1e3, 1e5, 1e8}) {
    const double expected = std::hypot(-0.6 * t - 1.0, 0.8 * t + 2.0);
    EXPECT_NEAR(m.ray_distance(SpdPoint::identity(2), TangentVec(u), t, SpdPoint(x)), expected,
                1e-15 * t);
    // Flat limit: excess -> <u, log x> = 0.6 + 1.6, with O(1/t) remainder.
    EXPECT_NEAR(m.ray_excess(SpdPoint::identity(2), TangentVec(u), t, SpdPoint(x)), 2.2,
                2.0 / t);
  }
}

TEST(SpdManifold, RayExcessIsStableInGradedRegime) {
  // d(gamma(t), x) - t settles to a finite limit for generic data.
  testing::Rng rng(18);
  const SpdManifold m(4);
  const SpdPoint p = random_spd(4, rng);
  const SpdPoint x = random_spd(4, rng);
  const TangentVec u = random_tangent(p, rng, 1.0);
  const double b1 = m.ray_excess(p, u, 1e5, x);
  const double b2 = m.ray_excess(p, u, 1e7, x);
  EXPECT_TRUE(std::isfinite(b1));
  EXPECT_NEAR(b1, b2, 1e-4);
  EXPECT_NEAR(b2, testing::busemann_closed_form(p, u, x), 1e-6);
  EXPECT_NEAR(m.ray_excess(p, u, 1e12, x), b2, 1e-6);
}

TEST(MatrixIo, FormatIsExact) {
  Matrix m(2, 2);
  m << 1.0, 0.1, 0.1, 2.0;
  EXPECT_EQ(matrix_to_string(m), "2\n1 0.10000000000000001\n0.10000000000000001 2\n");
}

TEST(MatrixIo, RoundTripIsLossless) {
  testing::Rng rng(17);
  for (int n : {1, 3, 16}) {
    const Matrix m = random_gaussian(n, n, rng);
    std::istringstream in(matrix_to_string(m));
    EXPECT_EQ(read_matrix(in), m);
  }
}

TEST(MatrixIo, RejectsTruncatedInput) {
  std::istringstream in("2\n1 2\n3\n");
  EXPECT_THROW(read_matrix(in), InvalidArgument);
  std::istringstream bad("x\n");
  EXPECT_THROW(read_matrix(bad), InvalidArgument);
}

}  // namespace
}  // namespace horoopt
