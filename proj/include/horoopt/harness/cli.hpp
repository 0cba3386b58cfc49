#pragma once

// Command-line surface:
//   horoopt {tyler|frechet} [--config FILE] [--n N] [--T T] [--eta E]...
//           [--schedule const|inv-sqrt|inv-t] [--seed S] [--ball-center FILE]
//           [--ball-radius R] [--tyler-mode ball|paper] [--sigma S] [--out DIR]
//           [--plot|--no-plot] [--log-t]
//
// A config file holds flat `key = value` lines using the flag names without
// dashes; `#` starts a comment. Flags given on the command line override it.
// Exit codes: 0 success, 1 a run failed, 2 invalid configuration.

#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "horoopt/errors.hpp"
#include "horoopt/harness/experiment.hpp"
#include "horoopt/matrix_io.hpp"

namespace horoopt::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailed = 1;
inline constexpr int kExitInvalidConfig = 2;

using Settings = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument(key + ": not a number: '" + v + "'");
  }
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  try {
    if (v.empty() || v.front() == '-') throw std::invalid_argument(v);
    std::size_t used = 0;
    const unsigned long long u = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw InvalidArgument(key + ": not a nonnegative integer: '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument(key + ": not a boolean: '" + v + "'");
}

}  // namespace detail

/// Reads `key = value` lines. Repeated keys are kept in order.
inline Settings parse_config_text(const std::string& text) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

inline Settings parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Applies settings in order. An `eta` group replaces the grid; several eta
/// entries inside one group (repeated keys or comma lists) accumulate.
inline void apply_settings(ExperimentConfig& cfg, const Settings& settings) {
  bool eta_reset = false;
  for (const auto& [key, value] : settings) {
    if (key == "n") {
      cfg.n = static_cast<std::size_t>(detail::parse_unsigned(key, value));
    } else if (key == "T") {
      cfg.horizon = static_cast<std::size_t>(detail::parse_unsigned(key, value));
    } else if (key == "eta") {
      if (!eta_reset) {
        cfg.etas.clear();
        eta_reset = true;
      }
      std::istringstream parts(value);
      std::string item;
      while (std::getline(parts, item, ',')) {
        item = detail::trim(item);
        if (!item.empty()) cfg.etas.push_back(detail::parse_double(key, item));
      }
    } else if (key == "schedule") {
      if (value == "const") {
        cfg.schedule = ScheduleKind::Constant;
      } else if (value == "inv-sqrt") {
        cfg.schedule = ScheduleKind::InverseSqrt;
      } else if (value == "inv-t") {
        cfg.schedule = ScheduleKind::InverseT;
      } else {
        throw InvalidArgument("schedule must be const, inv-sqrt or inv-t");
      }
    } else if (key == "seed") {
      cfg.seed = detail::parse_unsigned(key, value);
    } else if (key == "ball-center") {
      cfg.ball_center = read_matrix_file(value);
    } else if (key == "ball-radius") {
      cfg.ball_radius = detail::parse_double(key, value);
    } else if (key == "tyler-mode") {
      if (value == "ball") {
        cfg.tyler_mode = TylerMode::Ball;
      } else if (value == "paper") {
        cfg.tyler_mode = TylerMode::Paper;
      } else {
        throw InvalidArgument("tyler-mode must be ball or paper");
      }
    } else if (key == "sigma") {
      cfg.sigma = detail::parse_double(key, value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "plot") {
      cfg.plot = detail::parse_bool(key, value);
    } else if (key == "log-t") {
      cfg.log_t = detail::parse_bool(key, value);
    } else {
      throw InvalidArgument("unknown setting: " + key);
    }
  }
}

namespace detail {

struct RawFlags {
  std::string config;
  std::string n, horizon, schedule, seed, ball_center, ball_radius, tyler_mode, sigma, out;
  std::vector<std::string> etas;
  bool plot = true;
  bool log_t = false;
  CLI::Option* plot_opt = nullptr;
  CLI::Option* log_t_opt = nullptr;
  std::vector<std::pair<std::string, CLI::Option*>> scalar_opts;
};

inline void add_flags(CLI::App* sub, RawFlags& f) {
  sub->add_option("--config", f.config, "flat key = value config file")->check(CLI::ExistingFile);
  auto scalar = [&](const char* name, std::string& target, const char* help) {
    f.scalar_opts.emplace_back(name, sub->add_option(std::string("--") + name, target, help));
  };
  scalar("n", f.n, "matrix dimension");
  scalar("T", f.horizon, "number of rounds");
  scalar("schedule", f.schedule, "const | inv-sqrt | inv-t");
  scalar("seed", f.seed, "64-bit seed");
  scalar("ball-center", f.ball_center, "matrix file with the ball center");
  scalar("ball-radius", f.ball_radius, "geodesic ball radius");
  scalar("tyler-mode", f.tyler_mode, "ball | paper");
  scalar("sigma", f.sigma, "spread of the Frechet samples");
  scalar("out", f.out, "output directory");
  sub->add_option("--eta", f.etas, "step-size scale (repeatable)");
  f.plot_opt = sub->add_flag("--plot,!--no-plot", f.plot, "write the SVG regret plot");
  f.log_t_opt = sub->add_flag("--log-t", f.log_t, "log-scaled t axis in the plot");
}

inline Settings flag_settings(const RawFlags& f) {
  Settings s;
  for (const auto& [name, opt] : f.scalar_opts) {
    if (opt->count() == 0) continue;
    const std::string value = opt->as<std::string>();
    s.emplace_back(name, value);
  }
  for (const auto& e : f.etas) s.emplace_back("eta", e);
  if (f.plot_opt->count() > 0) s.emplace_back("plot", f.plot ? "true" : "false");
  if (f.log_t_opt->count() > 0) s.emplace_back("log-t", f.log_t ? "true" : "false");
  return s;
}

}  // namespace detail

/// Parses arguments, runs the experiment and writes its outputs.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Online gradient descent on SPD(n): Tyler and Frechet regret experiments",
               "horoopt");
  app.require_subcommand(1);
  detail::RawFlags tyler_flags, frechet_flags;
  CLI::App* tyler = app.add_subcommand("tyler", "online Tyler M-estimation");
  CLI::App* frechet = app.add_subcommand("frechet", "online Frechet mean");
  detail::add_flags(tyler, tyler_flags);
  detail::add_flags(frechet, frechet_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  const bool is_tyler = tyler->parsed();
  const detail::RawFlags& flags = is_tyler ? tyler_flags : frechet_flags;
  ExperimentConfig cfg =
      ExperimentConfig::defaults(is_tyler ? ExperimentKind::Tyler : ExperimentKind::Frechet);
  cfg.out_dir = std::string("results/") + to_string(cfg.kind);
  try {
    if (!flags.config.empty()) apply_settings(cfg, parse_config_file(flags.config));
    apply_settings(cfg, detail::flag_settings(flags));
    cfg.validate();
  } catch (const std::exception& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  ExperimentResult res;
  try {
    res = run_experiment(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunFailed;
  }
  for (const auto& r : res.records) {
    out << to_string(cfg.kind) << " eta=" << eta_label(r.eta)
        << " regret_T=" << format_g12(r.summary.final_regret)
        << " max_grad_norm=" << format_g12(r.summary.max_grad_norm)
        << " seconds=" << format_g12(r.summary.wall_seconds) << '\n';
    for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
  }
  for (const auto& f : res.failures) {
    err << to_string(cfg.kind) << " eta=" << eta_label(f.eta) << " failed: " << f.message << '\n';
  }
  out << "outputs written to " << cfg.out_dir << '\n';
  return res.ok() ? kExitOk : kExitRunFailed;
}

}  // namespace horoopt::harness
