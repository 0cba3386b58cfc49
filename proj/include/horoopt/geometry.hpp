#pragma once

// Numerical certificates for Busemann functions, (strong) horospherical
// convexity, the Hadamard cosine law and the Stewart inequality.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "horoopt/errors.hpp"
#include "horoopt/manifold.hpp"

namespace horoopt {

struct BusemannEval {
  double value = 0.0;
  double horizon_used = 0.0;
  /// Last doubling decrement, in the same (scaled) units as `value`.
  double convergence_gap = 0.0;
};

/// Left side minus right side of a tested inequality, plus the named scalar
/// quantities that went into it.
struct CertificateMargin {
  double margin = 0.0;
  /// Largest length involved; tolerances scale with its powers.
  double scale = 0.0;
  std::vector<std::pair<std::string, double>> terms;

  double term(const std::string& name) const {
    for (const auto& [k, v] : terms) {
      if (k == name) return v;
    }
    throw InvalidArgument("CertificateMargin: no term named " + name);
  }
};

/// Losses usable by the certificates: value and Riemannian gradient.
template <class F, class M>
concept DifferentiableLoss = requires(const F& f, const typename M::Point& x) {
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<typename M::Tangent>;
};

struct BusemannOptions {
  /// Doubling stops once the horizon exceeds max_doublings doublings of t0.
  int max_doublings = 40;
};

/// Scaled Busemann function B_{p,v}(x) = |v| * lim_t (d(gamma(t), x) - t) for
/// the ray gamma(t) = exp_p(-t v / |v|).
///
/// b(t) = d(gamma(t), x) - t is nonincreasing; t doubles from
/// max(1, d(p, x)) until |v| (b(t) - b(2t)) < tol and b at the final horizon
/// is returned.
template <HadamardManifold M>
BusemannEval busemann(const M& m, const typename M::Point& p,
                      const typename M::Tangent& v, const typename M::Point& x,
                      double tol, BusemannOptions opts = {}) {
  if (!(tol > 0.0)) throw InvalidArgument("busemann: tolerance must be positive");
  const double scale = m.norm(p, v);
  if (!(scale > 0.0)) throw InvalidArgument("busemann: zero direction vector");
  const auto u = (1.0 / scale) * v;

  auto b = [&](double t) {
    if constexpr (HasRayExcess<M>) {
      return m.ray_excess(p, u, t, x);
    } else {
      return m.dist(m.exp(p, (-t) * u), x) - t;
    }
  };

  const double t0 = std::max(1.0, m.dist(p, x));
  double t = t0;
  double bt = b(t);
  for (int k = 0; k < opts.max_doublings; ++k) {
    const double t2 = 2.0 * t;
    const double bt2 = b(t2);
    const double gap = scale * (bt - bt2);
    if (gap < tol) return {scale * bt2, t2, std::max(gap, 0.0)};
    t = t2;
    bt = bt2;
  }
  throw ConvergenceError("busemann: no convergence within the horizon cap",
                         std::ldexp(t0, opts.max_doublings));
}

/// margin = f(x) - f(y) - B_{y, grad f(y)}(x); h-convexity predicts >= -tol.
template <HadamardManifold M, class F>
  requires DifferentiableLoss<F, M>
CertificateMargin check_h_convexity(const M& m, const F& f,
                                    const typename M::Point& y,
                                    const typename M::Point& x, double tol) {
  const double fx = f.value(x);
  const double fy = f.value(y);
  const typename M::Tangent g = f.gradient(y);
  double b = 0.0;
  double horizon = 0.0;
  if (m.norm(y, g) > 0.0) {
    const BusemannEval e = busemann(m, y, g, x, tol);
    b = e.value;
    horizon = e.horizon_used;
  }
  return {fx - fy - b,
          m.dist(x, y),
          {{"f(x)", fx}, {"f(y)", fy}, {"busemann", b}, {"horizon", horizon}}};
}

/// margin = f(x) - f(y) - Q(x) with
/// Q(x) = -|v|^2 / (2 mu) + (mu / 2) d^2(exp_y(-v / mu), x), v = grad f(y).
template <HadamardManifold M, class F>
  requires DifferentiableLoss<F, M>
CertificateMargin check_strong_h_convexity(const M& m, const F& f, double mu,
                                           const typename M::Point& y,
                                           const typename M::Point& x) {
  if (!(mu > 0.0)) throw InvalidArgument("check_strong_h_convexity: mu must be positive");
  const double fx = f.value(x);
  const double fy = f.value(y);
  const typename M::Tangent v = f.gradient(y);
  const double vv = m.inner(y, v, v);
  const auto anchor = m.exp(y, (-1.0 / mu) * v);
  const double d = m.dist(anchor, x);
  const double q = -vv / (2.0 * mu) + 0.5 * mu * d * d;
  return {fx - fy - q,
          std::max(d, m.dist(x, y)),
          {{"f(x)", fx}, {"f(y)", fy}, {"Q", q}, {"|v|^2", vv}, {"d(anchor,x)", d}}};
}

/// Stewart inequality for the triangle abc and p = geodesic_point(b, c, s):
/// |ab|^2 |pc| + |ac|^2 |pb| - (|pa|^2 + |pb| |pc|) |bc| >= 0.
template <HadamardManifold M>
CertificateMargin check_stewart(const M& m, const typename M::Point& a,
                                const typename M::Point& b,
                                const typename M::Point& c, double s) {
  const auto p = m.geodesic_point(b, c, s);
  const double ab = m.dist(a, b);
  const double ac = m.dist(a, c);
  const double bc = m.dist(b, c);
  const double pa = m.dist(p, a);
  const double pb = m.dist(p, b);
  const double pc = m.dist(p, c);
  const double margin = ab * ab * pc + ac * ac * pb - (pa * pa + pb * pc) * bc;
  return {margin,
          std::max({ab, ac, bc}),
          {{"|ab|", ab}, {"|ac|", ac}, {"|bc|", bc}, {"|pa|", pa}, {"|pb|", pb}, {"|pc|", pc}}};
}

/// Cosine law in a Hadamard space:
/// |ab|^2 - |pb|^2 - |pa|^2 + 2 <log_p b, log_p a> >= 0.
template <HadamardManifold M>
CertificateMargin check_cosine_law(const M& m, const typename M::Point& a,
                                   const typename M::Point& p,
                                   const typename M::Point& b) {
  const double ab = m.dist(a, b);
  const double pa = m.dist(p, a);
  const double pb = m.dist(p, b);
  const double cross = m.inner(p, m.log(p, b), m.log(p, a));
  return {ab * ab - pb * pb - pa * pa + 2.0 * cross,
          std::max({ab, pa, pb}),
          {{"|ab|", ab}, {"|pa|", pa}, {"|pb|", pb}, {"<log_p b, log_p a>", cross}}};
}

/// Busemann descent inequality with x~ = exp_x(-w):
/// margin = (|x~x|^2 + |yx|^2 - |yx~|^2) / 2 + B_{x,w}(y) >= -tol.
template <HadamardManifold M>
CertificateMargin check_busemann_descent(const M& m, const typename M::Point& x,
                                         const typename M::Tangent& w,
                                         const typename M::Point& y, double tol) {
  const auto xt = m.exp(x, -w);
  const double step = m.dist(xt, x);
  const double yx = m.dist(y, x);
  const double yxt = m.dist(y, xt);
  const BusemannEval e = busemann(m, x, w, y, tol);
  const double rhs = 0.5 * (step * step + yx * yx - yxt * yxt);
  return {rhs + e.value,
          std::max({step, yx, yxt}),
          {{"|x~x|", step}, {"|yx|", yx}, {"|yx~|", yxt}, {"busemann", e.value}}};
}

}  // namespace horoopt
