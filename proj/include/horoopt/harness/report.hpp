#pragma once

// Per-run records and their serializations (CSV rows, combined SVG plot).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "horoopt/errors.hpp"

namespace horoopt::harness {

inline constexpr const char* kCsvHeader = "t,eta_t,loss,comparator_loss,cum_regret,grad_norm";

struct RegretRow {
  std::size_t t;
  double eta_t;
  double loss;
  double comparator_loss;
  double cum_regret;
  double grad_norm;
};

struct RunSummary {
  double final_regret = 0.0;
  double max_grad_norm = 0.0;
  double comparator_objective = 0.0;
  double comparator_displacement = 0.0;
  double comparator_grad_norm = 0.0;
  bool comparator_converged = false;
  std::string comparator_kind;
  double wall_seconds = 0.0;
  std::string rng;
};

struct RunRecord {
  double eta = 0.0;
  std::string label;
  std::vector<RegretRow> rows;
  RunSummary summary;
  std::vector<std::string> warnings;
};

inline std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string eta_label(double eta) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", eta);
  return buf;
}

inline std::string to_csv(const RunRecord& rec) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rec.rows) {
    out += std::to_string(r.t);
    for (double v : {r.eta_t, r.loss, r.comparator_loss, r.cum_regret, r.grad_norm}) {
      out += ',';
      out += format_g12(v);
    }
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

struct PlotOptions {
  std::string title = "Cumulative regret";
  bool log_t = false;
  int width = 800;
  int height = 500;
  std::size_t max_points = 1000;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Standalone SVG with one polyline per record (t against cumulative regret).
inline std::string render_plot(const std::vector<RunRecord>& records, const PlotOptions& opts = {}) {
  if (records.empty()) throw InvalidArgument("render_plot: no records");
  const std::size_t horizon = records.front().rows.size();
  if (horizon == 0) throw InvalidArgument("render_plot: empty record");
  for (const auto& r : records) {
    if (r.rows.size() != horizon) throw InvalidArgument("render_plot: records differ in length");
  }

  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const double left = 80, right = 150, top = 50, bottom = 60;
  const double pw = opts.width - left - right;
  const double ph = opts.height - top - bottom;

  double ymin = 0.0, ymax = 0.0;
  for (const auto& r : records) {
    for (const auto& row : r.rows) {
      ymin = std::min(ymin, row.cum_regret);
      ymax = std::max(ymax, row.cum_regret);
    }
  }
  if (ymax - ymin <= 0.0) ymax = ymin + 1.0;

  const double tmax = static_cast<double>(horizon);
  auto xmap = [&](double t) {
    const double f = opts.log_t ? (tmax > 1.0 ? std::log10(t) / std::log10(tmax) : 0.0)
                                : (tmax > 1.0 ? (t - 1.0) / (tmax - 1.0) : 0.0);
    return left + f * pw;
  };
  auto ymap = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
    << opts.height << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << opts.width << "\" height=\"" << opts.height
    << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << detail::fmt2(left + pw / 2) << "\" y=\"28\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"16\">" << detail::xml_escape(opts.title)
    << "</text>\n";
  // Axes.
  s << "<line x1=\"" << detail::fmt2(left) << "\" y1=\"" << detail::fmt2(top + ph) << "\" x2=\""
    << detail::fmt2(left + pw) << "\" y2=\"" << detail::fmt2(top + ph)
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << detail::fmt2(left) << "\" y1=\"" << detail::fmt2(top) << "\" x2=\""
    << detail::fmt2(left) << "\" y2=\"" << detail::fmt2(top + ph) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ymin + (ymax - ymin) * k / 4.0;
    s << "<text x=\"" << detail::fmt2(left - 6) << "\" y=\"" << detail::fmt2(ymap(y) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << eta_label(y) << "</text>\n";
    const double t = opts.log_t ? std::pow(tmax, k / 4.0) : 1.0 + (tmax - 1.0) * k / 4.0;
    s << "<text x=\"" << detail::fmt2(xmap(t)) << "\" y=\"" << detail::fmt2(top + ph + 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << eta_label(std::round(t)) << "</text>\n";
  }
  s << "<text x=\"" << detail::fmt2(left + pw / 2) << "\" y=\"" << opts.height - 15
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
    << (opts.log_t ? "t (log scale)" : "t") << "</text>\n";
  s << "<text x=\"18\" y=\"" << detail::fmt2(top + ph / 2)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
    << "transform=\"rotate(-90 18 " << detail::fmt2(top + ph / 2)
    << ")\">cumulative regret</text>\n";

  const std::size_t stride = std::max<std::size_t>(1, (horizon + opts.max_points - 1) / opts.max_points);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const char* color = kColors[i % (sizeof kColors / sizeof *kColors)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t j = 0; j < horizon; j += stride) {
      const auto& row = records[i].rows[j];
      s << (first ? "" : " ") << detail::fmt2(xmap(static_cast<double>(row.t))) << ','
        << detail::fmt2(ymap(row.cum_regret));
      first = false;
    }
    if ((horizon - 1) % stride != 0) {
      const auto& row = records[i].rows.back();
      s << ' ' << detail::fmt2(xmap(static_cast<double>(row.t))) << ','
        << detail::fmt2(ymap(row.cum_regret));
    }
    s << "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(i);
    s << "<line x1=\"" << detail::fmt2(left + pw + 15) << "\" y1=\"" << detail::fmt2(ly)
      << "\" x2=\"" << detail::fmt2(left + pw + 40) << "\" y2=\"" << detail::fmt2(ly)
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << detail::fmt2(left + pw + 46) << "\" y=\"" << detail::fmt2(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::xml_escape(records[i].label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void emit_plot(const std::vector<RunRecord>& records, const std::string& path,
                      const PlotOptions& opts = {}) {
  write_text_file(path, render_plot(records, opts));
}

}  // namespace horoopt::harness
