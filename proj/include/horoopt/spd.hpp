#pragma once

// SPD(n) with the affine-invariant metric <U, V>_X = Tr(X^-1 U X^-1 V).
//
// Every matrix function goes through one symmetric eigendecomposition and
// every matrix-valued result is re-symmetrized before it is returned.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "horoopt/errors.hpp"
#include "horoopt/manifold.hpp"

namespace horoopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative eigenvalue floor for functions that need positivity.
inline constexpr double kEigenvalueFloor = 1e-12;
/// Relative asymmetry accepted on input matrices.
inline constexpr double kSymmetryTolerance = 1e-12;

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

namespace detail {

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch(std::string(what) + ": matrix must be square and non-empty");
  }
}

inline void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw NonFiniteValue(std::string(what) + ": non-finite entries");
}

inline void require_symmetric(const Matrix& a, const char* what) {
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw InvalidArgument(std::string(what) + ": matrix is not symmetric");
  }
}

inline void require_same_size(std::ptrdiff_t a, std::ptrdiff_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) +
                            " does not match " + std::to_string(b));
  }
}

}  // namespace detail

/// Symmetric positive definite matrix: a point of SPD(n).
class SpdPoint {
 public:
  explicit SpdPoint(const Matrix& m) {
    detail::require_square(m, "SpdPoint");
    detail::require_finite(m, "SpdPoint");
    detail::require_symmetric(m, "SpdPoint");
    m_ = symmetrize(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo <= kEigenvalueFloor * hi) {
      throw EigenvalueFloorViolation(lo, kEigenvalueFloor * std::max(hi, 0.0));
    }
  }

  static SpdPoint identity(std::size_t n) {
    return SpdPoint(Matrix::Identity(static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n)));
  }

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  Matrix m_;
};

/// Symmetric matrix used as a tangent vector of SPD(n).
class TangentVec {
 public:
  explicit TangentVec(const Matrix& m) {
    detail::require_square(m, "TangentVec");
    detail::require_finite(m, "TangentVec");
    detail::require_symmetric(m, "TangentVec");
    m_ = symmetrize(m);
  }

  static TangentVec zero(std::size_t n) {
    return TangentVec(Matrix::Zero(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(n)));
  }

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

  TangentVec& operator+=(const TangentVec& o) {
    detail::require_same_size(m_.rows(), o.m_.rows(), "TangentVec +");
    m_ += o.m_;
    return *this;
  }
  TangentVec& operator-=(const TangentVec& o) {
    detail::require_same_size(m_.rows(), o.m_.rows(), "TangentVec -");
    m_ -= o.m_;
    return *this;
  }
  TangentVec& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend TangentVec operator+(TangentVec a, const TangentVec& b) { return a += b; }
  friend TangentVec operator-(TangentVec a, const TangentVec& b) { return a -= b; }
  friend TangentVec operator*(double s, TangentVec a) { return a *= s; }
  friend TangentVec operator*(TangentVec a, double s) { return a *= s; }
  friend TangentVec operator/(TangentVec a, double s) { return a *= 1.0 / s; }
  friend TangentVec operator-(TangentVec a) { return a *= -1.0; }

 private:
  Matrix m_;
};

/// A = Q diag(values) Q^T with eigenvalues in descending order.
struct SymEig {
  Vector values;
  Matrix vectors;
};

inline SymEig sym_eig(const Matrix& a) {
  detail::require_square(a, "sym_eig");
  detail::require_finite(a, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  if (es.info() != Eigen::Success) throw NonFiniteValue("sym_eig: eigensolver failed");
  // Eigen returns ascending order.
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

/// Spectral matrix functions.
struct MatrixFunction {
  enum class Kind { Sqrt, InvSqrt, Log, Exp, Power };

  Kind kind;
  double exponent = 1.0;

  static constexpr MatrixFunction sqrt() { return {Kind::Sqrt}; }
  static constexpr MatrixFunction inv_sqrt() { return {Kind::InvSqrt}; }
  static constexpr MatrixFunction log() { return {Kind::Log}; }
  static constexpr MatrixFunction exp() { return {Kind::Exp}; }
  static constexpr MatrixFunction power(double p) { return {Kind::Power, p}; }

  bool needs_positivity() const { return kind != Kind::Exp; }

  double operator()(double x) const {
    switch (kind) {
      case Kind::Sqrt: return std::sqrt(x);
      case Kind::InvSqrt: return 1.0 / std::sqrt(x);
      case Kind::Log: return std::log(x);
      case Kind::Exp: return std::exp(x);
      case Kind::Power: return std::pow(x, exponent);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

namespace detail {

inline void check_floor(const Vector& descending) {
  const double hi = descending(0);
  const double lo = descending(descending.size() - 1);
  const double floor = kEigenvalueFloor * std::max(hi, 0.0);
  if (!(hi > 0.0) || lo <= floor) throw EigenvalueFloorViolation(lo, floor);
}

inline Matrix apply_spectral(const SymEig& e, const MatrixFunction& fn) {
  Vector f(e.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = fn(e.values(i));
  Matrix out = e.vectors * f.asDiagonal() * e.vectors.transpose();
  if (!out.allFinite()) throw NonFiniteValue("matrix function overflowed");
  return symmetrize(out);
}

}  // namespace detail

inline Matrix matrix_fn(const Matrix& a, const MatrixFunction& fn) {
  const SymEig e = sym_eig(a);
  if (fn.needs_positivity()) detail::check_floor(e.values);
  return detail::apply_spectral(e, fn);
}

inline Matrix matrix_fn(const SpdPoint& a, const MatrixFunction& fn) {
  return matrix_fn(a.matrix(), fn);
}

/// X^{1/2} and X^{-1/2} from a single eigendecomposition.
struct SqrtPair {
  Matrix sqrt;
  Matrix inv_sqrt;
};

inline SqrtPair sqrt_pair(const SpdPoint& x) {
  const SymEig e = sym_eig(x.matrix());
  detail::check_floor(e.values);
  return {detail::apply_spectral(e, MatrixFunction::sqrt()),
          detail::apply_spectral(e, MatrixFunction::inv_sqrt())};
}

inline double spd_inner(const SpdPoint& x, const TangentVec& u, const TangentVec& v) {
  detail::require_same_size(static_cast<std::ptrdiff_t>(x.dim()),
                            static_cast<std::ptrdiff_t>(u.dim()), "spd_inner");
  detail::require_same_size(static_cast<std::ptrdiff_t>(x.dim()),
                            static_cast<std::ptrdiff_t>(v.dim()), "spd_inner");
  // With X = L L^T, Tr(X^-1 U X^-1 V) = <L^-1 U L^-T, L^-1 V L^-T>_F.
  Eigen::LLT<Matrix> llt(x.matrix());
  const auto l = llt.matrixL();
  Matrix a = l.solve(u.matrix());
  a = l.solve(a.transpose()).eval();
  Matrix b = l.solve(v.matrix());
  b = l.solve(b.transpose()).eval();
  return a.cwiseProduct(b).sum();
}

inline double spd_norm(const SpdPoint& x, const TangentVec& u) {
  return std::sqrt(std::max(spd_inner(x, u, u), 0.0));
}

inline SpdPoint spd_exp(const SpdPoint& x, const TangentVec& u) {
  detail::require_same_size(static_cast<std::ptrdiff_t>(x.dim()),
                            static_cast<std::ptrdiff_t>(u.dim()), "spd_exp");
  const SqrtPair r = sqrt_pair(x);
  const Matrix inner = matrix_fn(r.inv_sqrt * u.matrix() * r.inv_sqrt, MatrixFunction::exp());
  return SpdPoint(symmetrize(r.sqrt * inner * r.sqrt));
}

inline TangentVec spd_log(const SpdPoint& x, const SpdPoint& y) {
  detail::require_same_size(static_cast<std::ptrdiff_t>(x.dim()),
                            static_cast<std::ptrdiff_t>(y.dim()), "spd_log");
  const SqrtPair r = sqrt_pair(x);
  const Matrix inner = matrix_fn(r.inv_sqrt * y.matrix() * r.inv_sqrt, MatrixFunction::log());
  return TangentVec(symmetrize(r.sqrt * inner * r.sqrt));
}

inline double spd_dist(const SpdPoint& x, const SpdPoint& y) {
  detail::require_same_size(static_cast<std::ptrdiff_t>(x.dim()),
                            static_cast<std::ptrdiff_t>(y.dim()), "spd_dist");
  // Eigenvalues of X^-1/2 Y X^-1/2 equal those of L^-1 Y L^-T.
  Eigen::LLT<Matrix> llt(x.matrix());
  const auto l = llt.matrixL();
  Matrix c = l.solve(y.matrix());
  c = l.solve(c.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(c), Eigen::EigenvaluesOnly);
  const Vector& lambda = es.eigenvalues();
  if (lambda.minCoeff() <= 0.0) {
    throw EigenvalueFloorViolation(lambda.minCoeff(), 0.0);
  }
  return std::sqrt(lambda.array().log().square().sum());
}

inline SpdPoint spd_geodesic(const SpdPoint& x, const SpdPoint& y, double t) {
  detail::require_same_size(static_cast<std::ptrdiff_t>(x.dim()),
                            static_cast<std::ptrdiff_t>(y.dim()), "spd_geodesic");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidArgument("spd_geodesic: t must lie in [0, 1]");
  }
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  const SqrtPair r = sqrt_pair(x);
  const Matrix inner =
      matrix_fn(r.inv_sqrt * y.matrix() * r.inv_sqrt, MatrixFunction::power(t));
  return SpdPoint(symmetrize(r.sqrt * inner * r.sqrt));
}

/// log det X via Cholesky.
inline double log_det(const SpdPoint& x) {
  Eigen::LLT<Matrix> llt(x.matrix());
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

/// X scaled to unit determinant.
inline SpdPoint det_normalize(const SpdPoint& x) {
  const double n = static_cast<double>(x.dim());
  return SpdPoint(x.matrix() * std::exp(-log_det(x) / n));
}

namespace detail {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Logarithms of the singular values of G = C diag(e^{base}) by one-sided
/// Jacobi, returned as offsets from `base`. Each column is kept as a
/// direction plus a log-scale, so any grading of the column norms is
/// representable; column-scaled inputs keep high relative accuracy in their
/// small singular values.
inline LongVector log_singular_offsets(LongMatrix c, const LongVector& base) {
  const Eigen::Index n = c.cols();
  const long double eps = std::numeric_limits<long double>::epsilon();
  LongVector delta = LongVector::Zero(n);
  auto normalize = [&](Eigen::Index j) {
    const long double nu = c.col(j).norm();
    c.col(j) /= nu;
    delta(j) += std::log(nu);
  };
  for (Eigen::Index j = 0; j < n; ++j) normalize(j);

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const long double a = c.col(p).squaredNorm();
        const long double b = c.col(q).squaredNorm();
        const long double g = c.col(p).dot(c.col(q));
        if (g == 0.0L || std::fabs(g) <= eps * std::sqrt(a) * std::sqrt(b)) continue;
        rotated = true;
        // Rotation tangent t = tau * r with r = e^{-|s_p - s_q|} <= 1, so tau
        // stays finite when r underflows.
        const long double gap = (base(p) - base(q)) + (delta(p) - delta(q));
        const bool p_major = gap >= 0.0L;
        const long double r = std::exp(-std::fabs(gap));
        const long double num = p_major ? r * r * b - a : b - r * r * a;
        const long double sign = ((num >= 0.0L) == (g >= 0.0L)) ? 1.0L : -1.0L;
        const long double tau =
            sign * 2.0L * std::fabs(g) / (std::fabs(num) + std::sqrt(num * num + 4.0L * r * r * g * g));
        const long double cs = 1.0L / std::sqrt(1.0L + tau * tau * r * r);
        const auto cp = c.col(p).eval();
        if (p_major) {
          c.col(p) = cp - (tau * r * r) * c.col(q);
          c.col(q) = tau * cp + c.col(q);
        } else {
          c.col(p) = cp - tau * c.col(q);
          c.col(q) = (tau * r * r) * cp + c.col(q);
        }
        delta(p) += std::log(cs);
        delta(q) += std::log(cs);
        normalize(p);
        normalize(q);
      }
    }
    if (!rotated) break;
  }
  return delta;
}

}  // namespace detail

/// SPD(n) as a HadamardManifold model.
class SpdManifold {
 public:
  using Point = SpdPoint;
  using Tangent = TangentVec;

  explicit SpdManifold(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidArgument("SpdManifold: dimension must be positive");
  }

  std::size_t dimension() const { return n_; }

  double inner(const Point& x, const Tangent& u, const Tangent& v) const {
    check(x);
    return spd_inner(x, u, v);
  }
  double norm(const Point& x, const Tangent& u) const {
    check(x);
    return spd_norm(x, u);
  }
  Point exp(const Point& x, const Tangent& u) const {
    check(x);
    return spd_exp(x, u);
  }
  Tangent log(const Point& x, const Point& y) const {
    check(x);
    return spd_log(x, y);
  }
  double dist(const Point& x, const Point& y) const {
    check(x);
    return spd_dist(x, y);
  }
  Point geodesic_point(const Point& x, const Point& y, double t) const {
    check(x);
    return spd_geodesic(x, y, t);
  }

  /// d(exp_p(-t u / |u|), x) - t, stable for large t.
  ///
  /// With W = p^{-1/2} u p^{-1/2} = Q diag(w) Q^T, |w| = 1, the ray is
  /// p^{1/2} Q diag(e^{-t w}) Q^T p^{1/2}, so the distance is the norm of the
  /// log-spectrum of G G^T with G = x^{-1/2} p^{1/2} Q diag(e^{-t w / 2}).
  /// G is a well-conditioned matrix times a column scaling whose log is kept
  /// separately, and the log-spectrum is carried as offsets from -t w, so
  /// d^2 - t^2 is formed without cancellation.
  double ray_excess(const Point& p, const Tangent& u, double t, const Point& x) const {
    const auto [d2_minus_t2, d] = ray_terms(p, u, t, x);
    return static_cast<double>(d2_minus_t2 / (d + static_cast<long double>(t)));
  }

  /// d(exp_p(-t u / |u|), x).
  double ray_distance(const Point& p, const Tangent& u, double t, const Point& x) const {
    return static_cast<double>(ray_terms(p, u, t, x).second);
  }

 private:
  std::pair<long double, long double> ray_terms(const Point& p, const Tangent& u, double t,
                                                const Point& x) const {
    check(p);
    check(x);
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("ray_excess: invalid horizon");
    const SqrtPair rp = sqrt_pair(p);
    const SqrtPair rx = sqrt_pair(x);
    const SymEig e = sym_eig(rp.inv_sqrt * u.matrix() * rp.inv_sqrt);
    const Matrix k = rx.inv_sqrt * rp.sqrt * e.vectors;

    const Eigen::Index n = k.cols();
    detail::LongVector w = e.values.cast<long double>();
    const long double wn = w.norm();
    if (!(wn > 0.0L)) throw InvalidArgument("ray_excess: zero direction");
    w /= wn;
    const long double tl = static_cast<long double>(t);
    const detail::LongVector base = (-tl / 2.0L) * w;
    const detail::LongVector off = detail::log_singular_offsets(k.cast<long double>(), base);
    // log-eigenvalue j of G G^T is -t w_j + 2 off_j.
    long double excess = tl * tl * (w.squaredNorm() - 1.0L);
    long double d2 = 0.0L;
    for (Eigen::Index j = 0; j < n; ++j) {
      const long double o = 2.0L * off(j);
      if (!std::isfinite(o)) throw NonFiniteValue("ray_excess: singular factor");
      excess += o * (o - 2.0L * tl * w(j));
      const long double l = -tl * w(j) + o;
      d2 += l * l;
    }
    return {excess, std::sqrt(d2)};
  }

  void check(const Point& x) const {
    if (x.dim() != n_) {
      throw DimensionMismatch("SpdManifold(" + std::to_string(n_) +
                              "): point has dimension " + std::to_string(x.dim()));
    }
  }

  std::size_t n_;
};

static_assert(HadamardManifold<SpdManifold>);
static_assert(HasRayExcess<SpdManifold>);

}  // namespace horoopt
