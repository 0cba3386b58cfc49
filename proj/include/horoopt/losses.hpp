#pragma once

// Per-round losses on SPD(n):
//   Tyler:   f(S) = log(a^T S^-1 a),  grad f(S) = -a a^T / (a^T S^-1 a)
//   Frechet: f(S) = d(S, Y)^2 / 2,    grad f(S) = -Log_S(Y)

#include <cmath>
#include <utility>
#include <variant>

#include "horoopt/errors.hpp"
#include "horoopt/spd.hpp"

namespace horoopt {

struct TylerSample {
  Vector a;
};

struct FrechetSample {
  SpdPoint y;
};

class LossTerm {
 public:
  static LossTerm tyler(Vector a) {
    if (!a.allFinite()) throw NonFiniteValue("Tyler sample has non-finite entries");
    if (a.size() == 0 || a.squaredNorm() == 0.0) {
      throw InvalidArgument("Tyler sample must be a nonzero vector");
    }
    return LossTerm(TylerSample{std::move(a)});
  }

  static LossTerm frechet(SpdPoint y) { return LossTerm(FrechetSample{std::move(y)}); }

  bool is_tyler() const { return std::holds_alternative<TylerSample>(term_); }
  bool is_frechet() const { return std::holds_alternative<FrechetSample>(term_); }
  const TylerSample* as_tyler() const { return std::get_if<TylerSample>(&term_); }
  const FrechetSample* as_frechet() const { return std::get_if<FrechetSample>(&term_); }

  std::size_t dim() const {
    if (const auto* t = as_tyler()) return static_cast<std::size_t>(t->a.size());
    return std::get<FrechetSample>(term_).y.dim();
  }

  double value(const SpdPoint& s) const {
    check(s);
    if (const auto* t = as_tyler()) return std::log(quadratic_form(s, t->a));
    const double d = spd_dist(s, std::get<FrechetSample>(term_).y);
    return 0.5 * d * d;
  }

  TangentVec gradient(const SpdPoint& s) const {
    check(s);
    if (const auto* t = as_tyler()) {
      const double q = quadratic_form(s, t->a);
      return TangentVec((-1.0 / q) * (t->a * t->a.transpose()));
    }
    return -spd_log(s, std::get<FrechetSample>(term_).y);
  }

 private:
  explicit LossTerm(std::variant<TylerSample, FrechetSample> t) : term_(std::move(t)) {}

  void check(const SpdPoint& s) const {
    if (s.dim() != dim()) {
      throw DimensionMismatch("loss of dimension " + std::to_string(dim()) +
                              " evaluated at a point of dimension " + std::to_string(s.dim()));
    }
  }

  /// a^T S^-1 a through a Cholesky solve.
  static double quadratic_form(const SpdPoint& s, const Vector& a) {
    Eigen::LLT<Matrix> llt(s.matrix());
    const Vector z = llt.matrixL().solve(a);
    const double q = z.squaredNorm();
    if (!(q > 0.0) || !std::isfinite(q)) throw NonFiniteValue("Tyler quadratic form is not positive");
    return q;
  }

  std::variant<TylerSample, FrechetSample> term_;
};

inline double loss_value(const LossTerm& f, const SpdPoint& s) { return f.value(s); }

inline TangentVec loss_grad(const LossTerm& f, const SpdPoint& s) { return f.gradient(s); }

/// |grad f(S)|_S under the affine-invariant metric.
inline double grad_norm(const LossTerm& f, const SpdPoint& s) {
  return spd_norm(s, f.gradient(s));
}

}  // namespace horoopt
