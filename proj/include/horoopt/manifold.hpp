#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <utility>
#include <variant>

#include "horoopt/errors.hpp"

namespace horoopt {

/// Operations every Hadamard manifold model must provide.
///
/// Laws (checked by the test suite rather than the type system):
///   dist(x, y) == sqrt(inner(x, log(x, y), log(x, y)))
///   log(x, exp(x, u)) == u
///   geodesic_point(x, y, t) == exp(x, t * log(x, y)) for t in [0, 1]
template <class M>
concept HadamardManifold =
    requires(const M& m, const typename M::Point& x,
             const typename M::Tangent& u, double s) {
      typename M::Point;
      typename M::Tangent;
      { m.dimension() } -> std::convertible_to<std::size_t>;
      { m.inner(x, u, u) } -> std::convertible_to<double>;
      { m.norm(x, u) } -> std::convertible_to<double>;
      { m.exp(x, u) } -> std::same_as<typename M::Point>;
      { m.log(x, x) } -> std::same_as<typename M::Tangent>;
      { m.dist(x, x) } -> std::convertible_to<double>;
      { m.geodesic_point(x, x, s) } -> std::same_as<typename M::Point>;
      { s * u } -> std::convertible_to<typename M::Tangent>;
      { u + u } -> std::convertible_to<typename M::Tangent>;
      { -u } -> std::convertible_to<typename M::Tangent>;
    };

/// Optional hook: a model may evaluate the ray excess
/// d(exp_p(-t u / |u|), x) - t for large t without cancellation.
template <class M>
concept HasRayExcess =
    HadamardManifold<M> &&
    requires(const M& m, const typename M::Point& p,
             const typename M::Tangent& u, double t) {
      { m.ray_excess(p, u, t, p) } -> std::convertible_to<double>;
    };

struct WholeManifold {};

template <class Point>
class GeodesicBall {
 public:
  GeodesicBall(Point center, double radius)
      : center_(std::move(center)), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw InvalidArgument("geodesic ball radius must be positive and finite");
    }
  }

  const Point& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Point center_;
  double radius_;
};

/// The decision set: the whole manifold or a geodesic ball.
template <class Point>
class FeasibleSet {
 public:
  FeasibleSet() = default;
  FeasibleSet(WholeManifold) {}
  FeasibleSet(GeodesicBall<Point> ball) : set_(std::move(ball)) {}

  static FeasibleSet whole() { return FeasibleSet(); }
  static FeasibleSet ball(Point center, double radius) {
    return FeasibleSet(GeodesicBall<Point>(std::move(center), radius));
  }

  bool is_whole() const { return std::holds_alternative<WholeManifold>(set_); }

  const GeodesicBall<Point>* as_ball() const {
    return std::get_if<GeodesicBall<Point>>(&set_);
  }

  /// Diameter bound D; infinite for the whole manifold.
  double diameter() const {
    if (const auto* b = as_ball()) return 2.0 * b->radius();
    return std::numeric_limits<double>::infinity();
  }

 private:
  std::variant<WholeManifold, GeodesicBall<Point>> set_;
};

/// Metric projection onto `set`. For a ball the nearest point lies on the
/// geodesic from the center to `z`.
template <HadamardManifold M>
typename M::Point project(const M& m, const FeasibleSet<typename M::Point>& set,
                          const typename M::Point& z) {
  const auto* ball = set.as_ball();
  if (ball == nullptr) return z;
  const double d = m.dist(ball->center(), z);
  if (d <= ball->radius()) return z;
  return m.geodesic_point(ball->center(), z, ball->radius() / d);
}

template <HadamardManifold M>
bool contains(const M& m, const FeasibleSet<typename M::Point>& set,
              const typename M::Point& z, double slack = 0.0) {
  const auto* ball = set.as_ball();
  return ball == nullptr || m.dist(ball->center(), z) <= ball->radius() + slack;
}

}  // namespace horoopt
