#include "lanesafe/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "lanesafe/envsim/world.hpp"
#include "lanesafe/error.hpp"

namespace lanesafe::harness {

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "reward-curve") return PlotKind::RewardCurve;
  if (name == "cost-curve") return PlotKind::CostCurve;
  if (name == "lambda-curve") return PlotKind::LambdaCurve;
  if (name == "trajectory") return PlotKind::Trajectory;
  throw ConfigError("unknown plot kind '" + std::string(name) +
                    "' (expected reward-curve, cost-curve, lambda-curve or trajectory)");
}

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::RewardCurve: return "reward-curve";
    case PlotKind::CostCurve: return "cost-curve";
    case PlotKind::LambdaCurve: return "lambda-curve";
    case PlotKind::Trajectory: return "trajectory";
  }
  return "unknown";
}

namespace {

struct Series {
  std::vector<double> y;
  std::string color;
  double width = 1.0;
  double opacity = 1.0;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<Series> series;
  std::vector<double> markers;  // x positions of dashed vertical lines
};

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 260.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 30.0, kBottom = 45.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Mean of the trailing `window` values at every index.
std::vector<double> trailing_mean(const std::vector<double>& v, std::size_t window) {
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += v[i];
    if (i >= window) sum -= v[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

void render_panel(std::string& svg, const Panel& p, double offset_y) {
  double x_lo = p.x.front(), x_hi = p.x.back();
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : p.series)
    for (double y : s.y) {
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  if (!(y_hi > y_lo)) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kPanelHeight - kTop - kBottom;
  const double top = offset_y + kTop;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  svg += "<text x=\"" + coord(kWidth / 2) + "\" y=\"" + coord(offset_y + 18) +
         "\" text-anchor=\"middle\" font-size=\"14\">" + escape(p.title) + "</text>\n";
  svg += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(top) + "\" width=\"" + coord(pw) +
         "\" height=\"" + coord(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
    svg += "<text x=\"" + coord(sx(fx)) + "\" y=\"" + coord(top + ph + 15) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + fmt(fx) + "</text>\n";
    svg += "<text x=\"" + coord(kLeft - 5) + "\" y=\"" + coord(sy(fy) + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">" + fmt(fy) + "</text>\n";
    svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(sy(fy)) + "\" x2=\"" +
           coord(kLeft + pw) + "\" y2=\"" + coord(sy(fy)) + "\" stroke=\"#ddd\"/>\n";
  }
  svg += "<text x=\"" + coord(kLeft + pw / 2) + "\" y=\"" + coord(top + ph + 35) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.x_label) + "</text>\n";
  svg += "<text transform=\"translate(15," + coord(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.y_label) +
         "</text>\n";
  for (double m : p.markers) {
    svg += "<line class=\"marker\" x1=\"" + coord(sx(m)) + "\" y1=\"" + coord(top) + "\" x2=\"" +
           coord(sx(m)) + "\" y2=\"" + coord(top + ph) +
           "\" stroke=\"black\" stroke-dasharray=\"4,3\"/>\n";
  }
  for (const auto& s : p.series) {
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"" + fmt(s.width) +
           "\" stroke-opacity=\"" + fmt(s.opacity) + "\" points=\"";
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (i) svg += ' ';
      svg += coord(sx(p.x[i])) + ',' + coord(sy(s.y[i]));
    }
    svg += "\"/>\n";
  }
}

void write_svg(const std::filesystem::path& path, const std::vector<Panel>& panels) {
  const double height = kPanelHeight * static_cast<double>(panels.size());
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) + "\" height=\"" +
         coord(height) + "\" viewBox=\"0 0 " + coord(kWidth) + ' ' + coord(height) +
         "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    render_panel(svg, panels[i], kPanelHeight * static_cast<double>(i));
  svg += "</svg>\n";
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << svg;
  if (!out) throw IoError("failed writing " + path.string());
}

Panel episode_panel(const RunLog& log, const std::string& title, const std::string& y_label,
                    double EpisodeRecord::*field, const std::string& color) {
  Panel p;
  p.title = title;
  p.x_label = "episode";
  p.y_label = y_label;
  std::vector<double> y;
  for (const auto& e : log.episodes) {
    p.x.push_back(static_cast<double>(e.episode));
    y.push_back(e.*field);
  }
  p.series.push_back({y, color, 1.0, 0.3});
  p.series.push_back({trailing_mean(y, kSmoothingWindow), color, 2.0, 1.0});
  return p;
}

}  // namespace

void emit_plot(const RunLog& log, PlotKind kind, const std::filesystem::path& path) {
  switch (kind) {
    case PlotKind::RewardCurve:
      if (log.episodes.empty()) throw ValidationError("reward-curve: no completed episodes");
      write_svg(path, {episode_panel(log, "Episode return", "return",
                                     &EpisodeRecord::episode_return, "#1f77b4")});
      return;
    case PlotKind::CostCurve:
      if (log.episodes.empty()) throw ValidationError("cost-curve: no completed episodes");
      write_svg(path, {episode_panel(log, "Episode cost", "cost total", &EpisodeRecord::cost_total,
                                     "#d62728")});
      return;
    case PlotKind::LambdaCurve: {
      if (!log.constrained) throw ValidationError("lambda-curve: run has no multiplier series");
      if (log.steps.empty()) throw ValidationError("lambda-curve: empty step log");
      Panel p;
      p.title = "Lagrange multiplier";
      p.x_label = "step";
      p.y_label = "lambda";
      std::vector<double> y;
      for (const auto& s : log.steps) {
        p.x.push_back(static_cast<double>(s.step));
        y.push_back(s.lambda);
      }
      p.series.push_back({y, "#2ca02c", 2.0, 1.0});
      write_svg(path, {p});
      return;
    }
    case PlotKind::Trajectory:
      throw ValidationError("trajectory plots are drawn from trajectory rows, not a run log");
  }
}

void emit_trajectory_plot(std::span<const envsim::TrajectoryRow> rows,
                          const envsim::RoadConfig& road, const std::filesystem::path& path) {
  const auto snaps = envsim::snapshots_from_rows(rows, road);
  if (snaps.empty()) throw ValidationError("trajectory: no rows");
  Panel speed{"Ego speed", "time (s)", "speed (m/s)", {}, {}, {}};
  Panel accel{"Ego acceleration", "time (s)", "acceleration (m/s^2)", {}, {}, {}};
  Panel gap{"Gap to leader", "time (s)", "gap (m)", {}, {}, {}};
  std::vector<double> v, a, d;
  int previous_lane = -1;
  for (std::size_t t = 0; t < snaps.size(); ++t) {
    const auto raw = envsim::sense(snaps[t], road);
    const double time = static_cast<double>(t) * road.dt;
    v.push_back(raw.v_ego);
    a.push_back(raw.a_ego);
    d.push_back(raw.d_f0);
    for (Panel* p : {&speed, &accel, &gap}) p->x.push_back(time);
    int lane = 0;
    for (const auto& veh : snaps[t])
      if (veh.is_ego) lane = veh.lane;
    if (previous_lane >= 0 && lane != previous_lane)
      for (Panel* p : {&speed, &accel, &gap}) p->markers.push_back(time);
    previous_lane = lane;
  }
  speed.series.push_back({v, "#1f77b4", 1.5, 1.0});
  accel.series.push_back({a, "#ff7f0e", 1.5, 1.0});
  gap.series.push_back({d, "#2ca02c", 1.5, 1.0});
  write_svg(path, {speed, accel, gap});
}

}  // namespace lanesafe::harness
