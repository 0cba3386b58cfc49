#pragma once

// Riemannian online gradient descent:
//   g_t = grad f_t(x_t),  x_{t+1} = P_X(Exp_{x_t}(-eta_t g_t)).

#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "horoopt/errors.hpp"
#include "horoopt/geometry.hpp"
#include "horoopt/manifold.hpp"

namespace horoopt {

class StepSchedule {
 public:
  struct Constant {
    double eta;
  };
  /// eta_t = eta0 / sqrt(t)
  struct InverseSqrt {
    double eta0;
  };
  /// eta_t = eta0 / (mu t)
  struct Inverse {
    double eta0;
    double mu;
  };

  static StepSchedule constant(double eta) { return StepSchedule(Constant{positive(eta)}); }
  static StepSchedule inverse_sqrt(double eta0) {
    return StepSchedule(InverseSqrt{positive(eta0)});
  }
  static StepSchedule inverse(double eta0, double mu) {
    return StepSchedule(Inverse{positive(eta0), positive(mu)});
  }

  double operator()(std::size_t t) const {
    if (t == 0) throw InvalidArgument("step schedule: rounds are numbered from 1");
    const double td = static_cast<double>(t);
    if (const auto* c = std::get_if<Constant>(&v_)) return c->eta;
    if (const auto* s = std::get_if<InverseSqrt>(&v_)) return s->eta0 / std::sqrt(td);
    const auto& i = std::get<Inverse>(v_);
    return i.eta0 / (i.mu * td);
  }

  /// mu for the Inverse schedule, otherwise 0.
  double strong_convexity() const {
    if (const auto* i = std::get_if<Inverse>(&v_)) return i->mu;
    return 0.0;
  }

  const std::variant<Constant, InverseSqrt, Inverse>& variant() const { return v_; }

 private:
  explicit StepSchedule(std::variant<Constant, InverseSqrt, Inverse> v) : v_(v) {}

  static double positive(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw InvalidArgument("step schedule parameters must be positive and finite");
    }
    return x;
  }

  std::variant<Constant, InverseSqrt, Inverse> v_;
};

inline double step_size(const StepSchedule& s, std::size_t t) { return s(t); }

template <HadamardManifold M>
typename M::Point rogd_step(const M& m, const typename M::Point& x,
                            const typename M::Tangent& g, double eta,
                            const FeasibleSet<typename M::Point>& set) {
  if (!(eta > 0.0)) throw InvalidArgument("rogd_step: step size must be positive");
  return project(m, set, m.exp(x, (-eta) * g));
}

template <class Point>
struct Trajectory {
  /// x_1 ... x_{T+1}
  std::vector<Point> iterates;
  /// |g_t| at x_t, t = 1..T
  std::vector<double> grad_norms;
  std::vector<double> step_sizes;
  std::vector<double> step_seconds;
  std::vector<std::string> warnings;

  std::size_t horizon() const { return grad_norms.size(); }
};

/// Runs the online loop over `losses` in order. Round t only evaluates f_t,
/// and only at x_t.
template <HadamardManifold M, class F>
  requires DifferentiableLoss<F, M>
Trajectory<typename M::Point> run_rogd(const M& m, const typename M::Point& initial,
                                       std::span<const F> losses,
                                       const StepSchedule& schedule,
                                       const FeasibleSet<typename M::Point>& set) {
  if (losses.empty()) throw InvalidArgument("run_rogd: empty loss stream");
  if (!contains(m, set, initial, 1e-9)) {
    throw InvalidArgument("run_rogd: initial point lies outside the feasible set");
  }
  const std::size_t horizon = losses.size();
  Trajectory<typename M::Point> traj;
  traj.iterates.reserve(horizon + 1);
  traj.grad_norms.reserve(horizon);
  traj.step_sizes.reserve(horizon);
  traj.step_seconds.reserve(horizon);
  traj.iterates.push_back(initial);

  const double mu = schedule.strong_convexity();
  bool warned = false;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto start = std::chrono::steady_clock::now();
    const double eta = schedule(t);
    if (mu > 0.0 && eta > 1.0 / mu && !warned) {
      traj.warnings.push_back("round " + std::to_string(t) + ": step size " +
                              std::to_string(eta) + " exceeds 1/mu = " +
                              std::to_string(1.0 / mu));
      warned = true;
    }
    try {
      const auto& x = traj.iterates.back();
      const auto g = losses[t - 1].gradient(x);
      traj.grad_norms.push_back(m.norm(x, g));
      traj.step_sizes.push_back(eta);
      traj.iterates.push_back(rogd_step(m, x, g, eta, set));
    } catch (const std::exception& e) {
      throw RoundError(t, e.what());
    }
    traj.step_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return traj;
}

template <HadamardManifold M, class F>
  requires DifferentiableLoss<F, M>
Trajectory<typename M::Point> run_rogd(const M& m, const typename M::Point& initial,
                                       const std::vector<F>& losses,
                                       const StepSchedule& schedule,
                                       const FeasibleSet<typename M::Point>& set) {
  return run_rogd(m, initial, std::span<const F>(losses), schedule, set);
}

}  // namespace horoopt
