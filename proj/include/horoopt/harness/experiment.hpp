#pragma once

// Experiment driver: data generation, comparator, one online run per step
// size, CSV / SVG / JSON outputs.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "horoopt/errors.hpp"
#include "horoopt/harness/data.hpp"
#include "horoopt/harness/report.hpp"
#include "horoopt/losses.hpp"
#include "horoopt/matrix_io.hpp"
#include "horoopt/oracle.hpp"
#include "horoopt/rogd.hpp"
#include "horoopt/spd.hpp"

namespace horoopt::harness {

enum class ExperimentKind { Tyler, Frechet };
enum class ScheduleKind { Constant, InverseSqrt, InverseT };
/// Ball: online run and comparator share a geodesic ball.
/// Paper: unconstrained run, regret of determinant-normalized iterates against
/// the determinant-normalized Tyler fixed point.
enum class TylerMode { Ball, Paper };

inline const char* to_string(ExperimentKind k) {
  return k == ExperimentKind::Tyler ? "tyler" : "frechet";
}
inline const char* to_string(ScheduleKind s) {
  switch (s) {
    case ScheduleKind::Constant: return "const";
    case ScheduleKind::InverseSqrt: return "inv-sqrt";
    case ScheduleKind::InverseT: return "inv-t";
  }
  return "?";
}
inline const char* to_string(TylerMode m) { return m == TylerMode::Ball ? "ball" : "paper"; }

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Frechet;
  std::size_t n = 16;
  std::size_t horizon = 1000;
  std::vector<double> etas = {0.25, 0.5, 1.0, 2.0, 4.0};
  ScheduleKind schedule = ScheduleKind::InverseT;
  /// Strong-convexity constant used by the inv-t schedule (eta_t = eta / (mu t)).
  double mu = 1.0;
  std::uint64_t seed = 1;
  std::optional<Matrix> ball_center;
  std::optional<double> ball_radius;
  TylerMode tyler_mode = TylerMode::Ball;
  double sigma = 0.5;
  std::string out_dir;
  bool plot = true;
  bool log_t = false;
  /// Parallel runs; 0 picks HOROOPT_THREADS or the hardware concurrency.
  std::size_t threads = 0;

  /// Default settings: Tyler n = 16, T = 1e4, eta / sqrt(t); Frechet n = 16,
  /// T = 1e3, eta / t.
  static ExperimentConfig defaults(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    if (kind == ExperimentKind::Tyler) {
      c.horizon = 10000;
      c.schedule = ScheduleKind::InverseSqrt;
    } else {
      c.horizon = 1000;
      c.schedule = ScheduleKind::InverseT;
    }
    return c;
  }

  void validate() const {
    if (n < 2) throw InvalidArgument("n must be at least 2");
    if (horizon < 1) throw InvalidArgument("T must be at least 1");
    if (etas.empty()) throw InvalidArgument("the eta grid must not be empty");
    for (double e : etas) {
      if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("eta values must be positive");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be positive");
    if (ball_radius && !(*ball_radius > 0.0)) throw InvalidArgument("ball radius must be positive");
    if (ball_center) {
      if (static_cast<std::size_t>(ball_center->rows()) != n) {
        throw InvalidArgument("ball center dimension does not match n");
      }
      SpdPoint check(*ball_center);
    }
  }

  StepSchedule make_schedule(double eta) const {
    switch (schedule) {
      case ScheduleKind::Constant: return StepSchedule::constant(eta);
      case ScheduleKind::InverseSqrt: return StepSchedule::inverse_sqrt(eta);
      case ScheduleKind::InverseT: return StepSchedule::inverse(eta, mu);
    }
    throw InvalidArgument("unknown schedule");
  }
};

struct ExperimentData {
  SpdPoint sigma_true;
  std::vector<Vector> tyler_samples;
  std::vector<LossTerm> losses;
};

inline ExperimentData generate_data(const ExperimentConfig& cfg) {
  ExperimentData d{default_sigma_true(cfg.n, cfg.seed), {}, {}};
  d.losses.reserve(cfg.horizon);
  if (cfg.kind == ExperimentKind::Tyler) {
    d.tyler_samples = gen_gaussian_samples(d.sigma_true, cfg.horizon, cfg.seed);
    for (const auto& a : d.tyler_samples) d.losses.push_back(LossTerm::tyler(a));
  } else {
    for (auto& y : gen_spd_samples(d.sigma_true, cfg.sigma, cfg.horizon, cfg.seed)) {
      d.losses.push_back(LossTerm::frechet(std::move(y)));
    }
  }
  return d;
}

struct Comparator {
  FeasibleSet<SpdPoint> set;
  SpdPoint initial;
  SpdPoint point;
  std::string kind;
  double objective = 0.0;
  double displacement = 0.0;
  bool converged = true;
  /// Learner iterates are determinant-normalized before evaluation.
  bool det_normalized = false;
};

/// Feasible set, initial point and best fixed point in hindsight.
inline Comparator build_comparator(const ExperimentConfig& cfg, const ExperimentData& data,
                                   OfflineOptions opts = {}) {
  const SpdPoint identity = SpdPoint::identity(cfg.n);
  const SpdManifold m(cfg.n);
  const SpdPoint center = cfg.ball_center ? SpdPoint(*cfg.ball_center) : identity;
  const std::span<const LossTerm> losses(data.losses);

  if (cfg.kind == ExperimentKind::Tyler && cfg.tyler_mode == TylerMode::Paper) {
    const SpdPoint fp = tyler_fixed_point(data.tyler_samples, opts.tol);
    const SpdPoint normalized = det_normalize(fp);
    return {FeasibleSet<SpdPoint>::whole(), identity, normalized,
            "tyler fixed point (det-normalized)", CumulativeLoss(losses).value(normalized),
            0.0, true, true};
  }

  FeasibleSet<SpdPoint> set;
  if (cfg.kind == ExperimentKind::Tyler) {
    // The Tyler sum is unbounded below along scalings, so the ball is mandatory.
    const double radius =
        cfg.ball_radius ? *cfg.ball_radius : 1.0 + m.dist(center, det_normalize(data.sigma_true));
    set = FeasibleSet<SpdPoint>::ball(center, radius);
  } else if (cfg.ball_radius) {
    set = FeasibleSet<SpdPoint>::ball(center, *cfg.ball_radius);
  }
  const SpdPoint initial = project(m, set, identity);
  const auto res = offline_minimize(m, CumulativeLoss(losses), set, initial, opts);
  return {set, initial, res.point, "offline projected gradient descent", res.objective,
          res.displacement, res.converged, false};
}

struct RunOutcome {
  RunRecord record;
  SpdPoint final_iterate;
};

inline RunOutcome run_single(const ExperimentConfig& cfg, const ExperimentData& data,
                             const Comparator& comp, double eta) {
  const auto start = std::chrono::steady_clock::now();
  const SpdManifold m(cfg.n);
  const std::span<const LossTerm> losses(data.losses);
  auto traj = run_rogd(m, comp.initial, losses, cfg.make_schedule(eta), comp.set);

  std::vector<SpdPoint> evaluated;
  const std::vector<SpdPoint>* iterates = &traj.iterates;
  if (comp.det_normalized) {
    evaluated.reserve(traj.iterates.size());
    for (const auto& x : traj.iterates) evaluated.push_back(det_normalize(x));
    iterates = &evaluated;
  }

  RunRecord rec;
  rec.eta = eta;
  rec.label = "\xCE\xB7=" + eta_label(eta);
  rec.rows.reserve(losses.size());
  double acc = 0.0;
  double max_g = 0.0;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    const double lf = losses[t].value((*iterates)[t]);
    const double cf = losses[t].value(comp.point);
    acc += lf - cf;
    max_g = std::max(max_g, traj.grad_norms[t]);
    rec.rows.push_back({t + 1, traj.step_sizes[t], lf, cf, acc, traj.grad_norms[t]});
  }
  rec.summary.final_regret = acc;
  rec.summary.max_grad_norm = max_g;
  rec.summary.comparator_objective = comp.objective;
  rec.summary.comparator_displacement = comp.displacement;
  rec.summary.comparator_converged = comp.converged;
  rec.summary.comparator_kind = comp.kind;
  rec.summary.rng = kRngName;
  rec.warnings = traj.warnings;
  rec.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(rec), traj.iterates.back()};
}

struct RunFailure {
  double eta;
  std::string message;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<SpdPoint> final_iterates;
  std::vector<RunFailure> failures;
  std::optional<Comparator> comparator;
  std::optional<SpdPoint> sigma_true;

  bool ok() const { return failures.empty(); }
};

inline std::size_t resolve_threads(std::size_t requested) {
  std::size_t cap = requested;
  if (cap == 0) {
    if (const char* env = std::getenv("HOROOPT_THREADS")) {
      try {
        cap = static_cast<std::size_t>(std::stoul(env));
      } catch (const std::exception&) {
        cap = 0;
      }
    }
  }
  if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());
  return cap;
}

inline std::string csv_path(const ExperimentConfig& cfg, const RunRecord& rec) {
  return (std::filesystem::path(cfg.out_dir) /
          (std::string(to_string(cfg.kind)) + "_eta_" + eta_label(rec.eta) + ".csv"))
      .string();
}

inline std::string plot_path(const ExperimentConfig& cfg) {
  return (std::filesystem::path(cfg.out_dir) / (std::string(to_string(cfg.kind)) + "_regret.svg"))
      .string();
}

inline PlotOptions plot_options(const ExperimentConfig& cfg) {
  PlotOptions p;
  p.title = std::string(cfg.kind == ExperimentKind::Tyler ? "Online Tyler" : "Online Frechet mean") +
            ", SPD(" + std::to_string(cfg.n) + "), T=" + std::to_string(cfg.horizon) +
            ", schedule " + to_string(cfg.schedule);
  p.log_t = cfg.log_t;
  return p;
}

inline nlohmann::json summary_json(const ExperimentConfig& cfg, const ExperimentResult& res) {
  nlohmann::json j;
  j["experiment"] = to_string(cfg.kind);
  j["n"] = cfg.n;
  j["T"] = cfg.horizon;
  j["schedule"] = to_string(cfg.schedule);
  j["mu"] = cfg.mu;
  j["seed"] = cfg.seed;
  j["sigma"] = cfg.sigma;
  j["tyler_mode"] = to_string(cfg.tyler_mode);
  j["eta"] = cfg.etas;
  j["rng"] = kRngName;
  if (res.comparator) {
    const auto& c = *res.comparator;
    j["comparator"] = {{"kind", c.kind},
                       {"objective", c.objective},
                       {"displacement", c.displacement},
                       {"converged", c.converged}};
    if (const auto* b = c.set.as_ball()) j["ball_radius"] = b->radius();
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : res.records) {
    runs.push_back({{"eta", r.eta},
                    {"final_regret", r.summary.final_regret},
                    {"max_grad_norm", r.summary.max_grad_norm},
                    {"comparator_grad_norm", r.summary.comparator_grad_norm},
                    {"wall_seconds", r.summary.wall_seconds},
                    {"warnings", r.warnings}});
  }
  j["runs"] = runs;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : res.failures) failures.push_back({{"eta", f.eta}, {"error", f.message}});
  j["failures"] = failures;
  return j;
}

inline void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string kind = to_string(cfg.kind);
  const fs::path dir(cfg.out_dir);
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto& rec = res.records[i];
    write_text_file(csv_path(cfg, rec), to_csv(rec));
    write_matrix_file((dir / (kind + "_eta_" + eta_label(rec.eta) + "_final.txt")).string(),
                      res.final_iterates[i].matrix());
  }
  if (res.comparator) {
    write_matrix_file((dir / (kind + "_comparator.txt")).string(), res.comparator->point.matrix());
  }
  if (res.sigma_true) {
    write_matrix_file((dir / (kind + "_sigma_true.txt")).string(), res.sigma_true->matrix());
  }
  if (cfg.plot && !res.records.empty()) emit_plot(res.records, plot_path(cfg), plot_options(cfg));
  write_text_file((dir / (kind + "_summary.json")).string(), summary_json(cfg, res).dump(2) + "\n");
}

/// Runs every eta of the grid on one shared data set. A failing run is
/// recorded and the others proceed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  const ExperimentData data = generate_data(cfg);
  res.sigma_true = data.sigma_true;
  try {
    res.comparator = build_comparator(cfg, data);
  } catch (const std::exception& e) {
    for (double eta : cfg.etas) res.failures.push_back({eta, std::string("comparator: ") + e.what()});
    if (!cfg.out_dir.empty()) write_outputs(cfg, res);
    return res;
  }

  const std::size_t threads = resolve_threads(cfg.threads);
  std::vector<std::optional<RunOutcome>> outcomes(cfg.etas.size());
  std::vector<std::string> errors(cfg.etas.size());
  auto job = [&](std::size_t i) {
    try {
      outcomes[i] = run_single(cfg, data, *res.comparator, cfg.etas[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  for (std::size_t begin = 0; begin < cfg.etas.size(); begin += threads) {
    const std::size_t end = std::min(cfg.etas.size(), begin + threads);
    if (end - begin == 1) {
      job(begin);
      continue;
    }
    std::vector<std::future<void>> wave;
    for (std::size_t i = begin; i < end; ++i) wave.push_back(std::async(std::launch::async, job, i));
    for (auto& f : wave) f.get();
  }

  // Comparator gradient norm is shared by every run.
  double comp_grad = 0.0;
  {
    const SpdManifold m(cfg.n);
    const auto g = CumulativeLoss(data.losses).gradient(res.comparator->point);
    comp_grad = m.norm(res.comparator->point, g) / static_cast<double>(cfg.horizon);
  }
  for (std::size_t i = 0; i < cfg.etas.size(); ++i) {
    if (outcomes[i]) {
      outcomes[i]->record.summary.comparator_grad_norm = comp_grad;
      res.records.push_back(std::move(outcomes[i]->record));
      res.final_iterates.push_back(std::move(outcomes[i]->final_iterate));
    } else {
      res.failures.push_back({cfg.etas[i], errors[i]});
    }
  }
  if (!cfg.out_dir.empty()) write_outputs(cfg, res);
  return res;
}

}  // namespace horoopt::harness
