#pragma once

// Best fixed decision in hindsight, regret accounting, and two classical
// estimators used to cross-check the comparator.

#include <Eigen/QR>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "horoopt/errors.hpp"
#include "horoopt/geometry.hpp"
#include "horoopt/losses.hpp"
#include "horoopt/manifold.hpp"
#include "horoopt/rogd.hpp"
#include "horoopt/spd.hpp"

namespace horoopt {

/// Cumulative objective F(x) = sum_t f_t(x) and its Riemannian gradient.
template <class O, class M>
concept CumulativeObjective = requires(const O& o, const typename M::Point& x) {
  { o.size() } -> std::convertible_to<std::size_t>;
  { o.value(x) } -> std::convertible_to<double>;
  { o.gradient(x) } -> std::convertible_to<typename M::Tangent>;
};

/// Plain sum over a span of losses.
template <class F>
class SumObjective {
 public:
  explicit SumObjective(std::span<const F> losses) : losses_(losses) {}

  std::size_t size() const { return losses_.size(); }

  template <class Point>
  double value(const Point& x) const {
    double acc = 0.0;
    for (const auto& f : losses_) acc += f.value(x);
    return acc;
  }

  template <class Point>
  auto gradient(const Point& x) const {
    auto g = losses_[0].gradient(x);
    for (std::size_t i = 1; i < losses_.size(); ++i) g += losses_[i].gradient(x);
    return g;
  }

 private:
  std::span<const F> losses_;
};

/// Sum of SPD losses with batched evaluation: Tyler terms share one Cholesky
/// factor, Frechet terms share one square root of the evaluation point.
class CumulativeLoss {
 public:
  explicit CumulativeLoss(std::span<const LossTerm> losses) : losses_(losses) {
    if (losses.empty()) throw InvalidArgument("CumulativeLoss: empty loss list");
    n_ = losses.front().dim();
    std::vector<const Vector*> tyler;
    for (const auto& f : losses) {
      if (f.dim() != n_) throw DimensionMismatch("CumulativeLoss: mixed dimensions");
      if (const auto* t = f.as_tyler()) {
        tyler.push_back(&t->a);
      } else {
        frechet_.push_back(&f.as_frechet()->y);
      }
    }
    samples_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(tyler.size()));
    for (std::size_t j = 0; j < tyler.size(); ++j) {
      samples_.col(static_cast<Eigen::Index>(j)) = *tyler[j];
    }
  }

  std::size_t size() const { return losses_.size(); }

  double value(const SpdPoint& x) const {
    double acc = 0.0;
    if (samples_.cols() > 0) acc += tyler_quadratic_forms(x).array().log().sum();
    if (!frechet_.empty()) {
      Eigen::LLT<Matrix> llt(x.matrix());
      const auto l = llt.matrixL();
      for (const SpdPoint* y : frechet_) {
        Matrix c = l.solve(y->matrix());
        c = l.solve(c.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(c), Eigen::EigenvaluesOnly);
        acc += 0.5 * es.eigenvalues().array().log().square().sum();
      }
    }
    return acc;
  }

  TangentVec gradient(const SpdPoint& x) const {
    Matrix g = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    if (samples_.cols() > 0) {
      const Vector q = tyler_quadratic_forms(x);
      g -= samples_ * q.cwiseInverse().asDiagonal() * samples_.transpose();
    }
    if (!frechet_.empty()) {
      const SqrtPair r = sqrt_pair(x);
      Matrix logs = Matrix::Zero(g.rows(), g.cols());
      for (const SpdPoint* y : frechet_) {
        logs += matrix_fn(r.inv_sqrt * y->matrix() * r.inv_sqrt, MatrixFunction::log());
      }
      g -= r.sqrt * logs * r.sqrt;
    }
    return TangentVec(symmetrize(g));
  }

 private:
  Vector tyler_quadratic_forms(const SpdPoint& x) const {
    Eigen::LLT<Matrix> llt(x.matrix());
    const Matrix z = llt.matrixL().solve(samples_);
    return z.colwise().squaredNorm().transpose();
  }

  std::span<const LossTerm> losses_;
  std::size_t n_ = 0;
  Matrix samples_;
  std::vector<const SpdPoint*> frechet_;
};

struct OfflineOptions {
  double tol = 1e-9;
  std::size_t max_iters = 5000;
  double armijo = 1e-4;
  double max_step = 1e4;
};

template <class Point>
struct OfflineResult {
  Point point;
  /// F(point) = sum of the losses.
  double objective;
  /// Final gradient-mapping norm d(x, x_next) / alpha of the averaged objective.
  double displacement;
  std::size_t iterations;
  bool converged;
};

/// Projected Riemannian gradient descent on F / T with Armijo backtracking.
/// Returns the iterate with the lowest F seen.
template <HadamardManifold M, class O>
  requires CumulativeObjective<O, M>
OfflineResult<typename M::Point> offline_minimize(const M& m, const O& objective,
                                                  const FeasibleSet<typename M::Point>& set,
                                                  const typename M::Point& initial,
                                                  OfflineOptions opts = {}) {
  using Point = typename M::Point;
  if (objective.size() == 0) throw InvalidArgument("offline_minimize: empty loss list");
  if (!(opts.tol > 0.0)) throw InvalidArgument("offline_minimize: tolerance must be positive");
  const double count = static_cast<double>(objective.size());

  Point x = project(m, set, initial);
  double fx = objective.value(x);
  // F differences below this are rounding; ties go to the smaller gradient
  // mapping so the iteration can still approach the minimizer.
  auto noise = [](double f) { return 1e-13 * std::max(1.0, std::abs(f)); };
  auto mapping_norm = [&](const Point& at, const auto& grad, double step) {
    return m.dist(at, project(m, set, m.exp(at, (-step) * grad))) / step;
  };
  Point best = x;
  double best_f = fx;
  double alpha = 1.0;
  double displacement = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    const auto g = (1.0 / count) * objective.gradient(x);
    if (m.norm(x, g) == 0.0) {
      displacement = 0.0;
      break;
    }
    std::optional<Point> accepted;
    double f_new = fx;
    double step = alpha;
    for (step = std::min(2.0 * alpha, opts.max_step); step > 1e-30; step *= 0.5) {
      try {
        Point cand = project(m, set, m.exp(x, (-step) * g));
        const double fc = objective.value(cand);
        if (!std::isfinite(fc)) continue;
        const double slope = count * m.inner(x, g, m.log(x, cand));
        bool ok = fc <= fx + opts.armijo * slope;
        if (!ok && fc <= fx + noise(fx)) {
          const auto gc = (1.0 / count) * objective.gradient(cand);
          ok = mapping_norm(cand, gc, step) < m.dist(x, cand) / step;
        }
        if (ok) {
          accepted = std::move(cand);
          f_new = fc;
          break;
        }
      } catch (const Error&) {
        // Overflowing trial step: shrink.
      }
    }
    if (!accepted) {
      displacement = mapping_norm(x, g, 1.0);
      break;
    }
    alpha = step;
    displacement = m.dist(x, *accepted) / alpha;
    x = std::move(*accepted);
    fx = f_new;
    if (fx <= best_f + noise(best_f)) {
      best = x;
      best_f = fx;
    }
    if (displacement <= opts.tol) {
      ++it;
      break;
    }
  }
  return {best, best_f, displacement, it, displacement <= opts.tol};
}

/// Convenience overload for SPD losses, starting from the ball center or I.
inline OfflineResult<SpdPoint> offline_minimize(std::span<const LossTerm> losses,
                                                const FeasibleSet<SpdPoint>& set,
                                                OfflineOptions opts = {}) {
  if (losses.empty()) throw InvalidArgument("offline_minimize: empty loss list");
  const SpdManifold m(losses.front().dim());
  const SpdPoint start =
      set.as_ball() ? set.as_ball()->center() : SpdPoint::identity(m.dimension());
  return offline_minimize(m, CumulativeLoss(losses), set, start, opts);
}

/// Karcher mean by the fixed-point iteration S <- Exp_S(mean_t Log_S(Y_t)).
inline SpdPoint karcher_mean(std::span<const SpdPoint> points, double tol,
                             std::size_t max_iters = 1000) {
  if (points.empty()) throw InvalidArgument("karcher_mean: empty point list");
  const Eigen::Index n = points.front().matrix().rows();
  Matrix start = Matrix::Zero(n, n);
  for (const auto& p : points) {
    if (p.matrix().rows() != n) throw DimensionMismatch("karcher_mean: mixed dimensions");
    start += p.matrix();
  }
  SpdPoint s(start / static_cast<double>(points.size()));
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iters; ++it) {
    const SqrtPair r = sqrt_pair(s);
    Matrix mean_log = Matrix::Zero(n, n);
    for (const auto& p : points) {
      mean_log += matrix_fn(r.inv_sqrt * p.matrix() * r.inv_sqrt, MatrixFunction::log());
    }
    mean_log /= static_cast<double>(points.size());
    // |mean Log_S(Y)|_S is the Frobenius norm of the whitened mean.
    residual = mean_log.norm();
    if (residual <= tol) return s;
    s = SpdPoint(symmetrize(r.sqrt * matrix_fn(mean_log, MatrixFunction::exp()) * r.sqrt));
  }
  throw ConvergenceError("karcher_mean: iteration limit reached", residual);
}

/// Tyler's fixed-point iteration S <- (n / T) sum a a^T / (a^T S^-1 a),
/// renormalized to trace n after every pass.
inline SpdPoint tyler_fixed_point(std::span<const Vector> samples, double tol,
                                  std::size_t max_iters = 10000) {
  if (samples.empty()) throw InvalidArgument("tyler_fixed_point: no samples");
  const Eigen::Index n = samples.front().size();
  if (static_cast<Eigen::Index>(samples.size()) < n) {
    throw RankDeficient("tyler_fixed_point: fewer samples than dimensions");
  }
  Matrix a(n, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (samples[j].size() != n) throw DimensionMismatch("tyler_fixed_point: mixed dimensions");
    a.col(static_cast<Eigen::Index>(j)) = samples[j];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < n) throw RankDeficient("tyler_fixed_point: samples do not span R^n");

  const double nd = static_cast<double>(n);
  const double count = static_cast<double>(samples.size());
  SpdPoint s = SpdPoint::identity(static_cast<std::size_t>(n));
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iters; ++it) {
    Eigen::LLT<Matrix> llt(s.matrix());
    const Vector q = llt.matrixL().solve(a).colwise().squaredNorm().transpose();
    Matrix next = (nd / count) * a * q.cwiseInverse().asDiagonal() * a.transpose();
    next *= nd / next.trace();
    SpdPoint updated = [&] {
      try {
        return SpdPoint(symmetrize(next));
      } catch (const EigenvalueFloorViolation&) {
        throw RankDeficient("tyler_fixed_point: singular intermediate estimate");
      }
    }();
    residual = spd_dist(s, updated);
    s = std::move(updated);
    if (residual <= tol) return s;
  }
  throw ConvergenceError("tyler_fixed_point: iteration limit reached", residual);
}

template <class Point>
struct RegretTrace {
  std::vector<double> learner_losses;
  std::vector<double> comparator_losses;
  /// R_t = sum_{s <= t} (f_s(x_s) - f_s(x*))
  std::vector<double> cumulative;
  Point comparator;
  /// |(1/T) sum_t grad f_t(x*)| at the comparator.
  double comparator_grad_norm;

  double final_regret() const { return cumulative.back(); }
};

template <HadamardManifold M, class F>
  requires DifferentiableLoss<F, M>
RegretTrace<typename M::Point> compute_regret(const M& m,
                                              const Trajectory<typename M::Point>& traj,
                                              std::span<const F> losses,
                                              const typename M::Point& comparator) {
  if (traj.iterates.size() < losses.size() || losses.empty()) {
    throw DimensionMismatch("compute_regret: trajectory and loss list lengths differ");
  }
  if (traj.horizon() != 0 && traj.horizon() != losses.size()) {
    throw DimensionMismatch("compute_regret: trajectory and loss list lengths differ");
  }
  RegretTrace<typename M::Point> out{{}, {}, {}, comparator, 0.0};
  out.learner_losses.reserve(losses.size());
  out.comparator_losses.reserve(losses.size());
  out.cumulative.reserve(losses.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    const double lf = losses[t].value(traj.iterates[t]);
    const double cf = losses[t].value(comparator);
    acc += lf - cf;
    out.learner_losses.push_back(lf);
    out.comparator_losses.push_back(cf);
    out.cumulative.push_back(acc);
  }
  auto g = losses[0].gradient(comparator);
  for (std::size_t t = 1; t < losses.size(); ++t) g += losses[t].gradient(comparator);
  out.comparator_grad_norm = m.norm(comparator, g) / static_cast<double>(losses.size());
  return out;
}

template <HadamardManifold M, class F>
  requires DifferentiableLoss<F, M>
RegretTrace<typename M::Point> compute_regret(const M& m,
                                              const Trajectory<typename M::Point>& traj,
                                              const std::vector<F>& losses,
                                              const typename M::Point& comparator) {
  return compute_regret(m, traj, std::span<const F>(losses), comparator);
}

}  // namespace horoopt
