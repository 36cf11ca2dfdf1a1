#include "scoutnd/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "scoutnd/common.hpp"

namespace scoutnd::svg {

namespace {

const char* kPalette[] = {"#2577b2", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v, double pix_lo, double pix_hi) const {
    double a = log ? std::log10(lo) : lo;
    double b = log ? std::log10(hi) : hi;
    double x = log ? std::log10(v) : v;
    if (b <= a) return pix_lo;
    return pix_lo + (x - a) / (b - a) * (pix_hi - pix_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      int e0 = static_cast<int>(std::floor(std::log10(lo)));
      int e1 = static_cast<int>(std::ceil(std::log10(hi)));
      for (int e = e0; e <= e1; ++e) out.push_back(std::pow(10.0, e));
    } else {
      double span = hi - lo;
      if (span <= 0) return {lo};
      double raw = span / 6.0;
      double mag = std::pow(10.0, std::floor(std::log10(raw)));
      double step = mag;
      for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
          step = m * mag;
          break;
        }
      }
      double first = std::ceil(lo / step) * step;
      for (double v = first; v <= hi + 1e-12 * span; v += step) out.push_back(v);
    }
    return out;
  }
};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt_pix(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void frame_and_axes(std::ostringstream& out, const PlotOptions& opts,
                    const Axis& ax, const Axis& ay, double x0, double x1,
                    double y0, double y1) {
  out << "<rect x=\"" << fmt_pix(x0) << "\" y=\"" << fmt_pix(y1) << "\" width=\""
      << fmt_pix(x1 - x0) << "\" height=\"" << fmt_pix(y0 - y1)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double v : ax.ticks()) {
    double px = ax.map(v, x0, x1);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    out << "<line x1=\"" << fmt_pix(px) << "\" y1=\"" << fmt_pix(y0) << "\" x2=\""
        << fmt_pix(px) << "\" y2=\"" << fmt_pix(y0 + 5) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << fmt_pix(px) << "\" y=\"" << fmt_pix(y0 + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(v)
        << "</text>\n";
  }
  for (double v : ay.ticks()) {
    double py = ay.map(v, y0, y1);
    if ((y0 - py) < -0.5 || (py - y1) < -0.5) continue;
    out << "<line x1=\"" << fmt_pix(x0 - 5) << "\" y1=\"" << fmt_pix(py)
        << "\" x2=\"" << fmt_pix(x0) << "\" y2=\"" << fmt_pix(py)
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << fmt_pix(x0 - 8) << "\" y=\"" << fmt_pix(py + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(v)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt_pix((x0 + x1) / 2) << "\" y=\"24\" font-size=\"14\" "
      << "text-anchor=\"middle\">" << escape(opts.title) << "</text>\n";
  out << "<text x=\"" << fmt_pix((x0 + x1) / 2) << "\" y=\""
      << fmt_pix(y0 + 38) << "\" font-size=\"12\" text-anchor=\"middle\">"
      << escape(opts.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt_pix((y0 + y1) / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt_pix((y0 + y1) / 2) << ")\">" << escape(opts.y_label) << "</text>\n";
}

}  // namespace

std::string line_plot(const std::vector<Series>& series, const PlotOptions& opts) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    for (auto [x, y] : s.points) {
      if (opts.log_x && x <= 0) continue;
      if (opts.log_y && y <= 0) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin <= xmax)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmin == xmax) xmax = xmin + 1;
  if (ymin == ymax) ymax = ymin + (opts.log_y ? ymin * 9 + 1e-300 : 1);

  Axis ax{xmin, xmax, opts.log_x};
  Axis ay{ymin, ymax, opts.log_y};
  const double x0 = 70, x1 = opts.width - 20;
  const double y0 = opts.height - 60, y1 = 40;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
      << "\" height=\"" << opts.height << "\">\n";
  frame_and_axes(out, opts, ax, ay, x0, x1, y0, y1);

  for (size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    if (s.points.empty()) continue;
    std::ostringstream pts;
    double prev_py = 0;
    bool first = true;
    for (auto [x, y] : s.points) {
      if (opts.log_x && x <= 0) continue;
      if (opts.log_y && y <= 0) continue;
      double px = ax.map(x, x0, x1);
      double py = ay.map(y, y0, y1);
      if (opts.step && !first) {
        pts << ' ' << fmt_pix(px) << ',' << fmt_pix(prev_py);
      }
      if (!first) pts << ' ';
      pts << fmt_pix(px) << ',' << fmt_pix(py);
      prev_py = py;
      first = false;
    }
    out << "<polyline class=\"data\" data-label=\"" << escape(s.label)
        << "\" fill=\"none\" stroke=\"" << kPalette[i % 8]
        << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    out << "<text x=\"" << fmt_pix(x1 - 150) << "\" y=\""
        << fmt_pix(y1 + 16 + 16 * static_cast<double>(i)) << "\" font-size=\"12\" fill=\""
        << kPalette[i % 8] << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string box_plot(const std::vector<std::string>& group_labels,
                     const std::vector<std::string>& series_labels,
                     const std::vector<std::vector<BoxStats>>& boxes,
                     const PlotOptions& opts) {
  if (boxes.size() != group_labels.size()) {
    throw ValueError("box_plot: one row of boxes per group label");
  }
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& group : boxes) {
    for (const BoxStats& b : group) {
      if (opts.log_y && b.min <= 0) continue;
      ymin = std::min(ymin, b.min);
      ymax = std::max(ymax, b.max);
    }
  }
  if (!(ymin <= ymax)) {
    ymin = opts.log_y ? 0.1 : 0;
    ymax = 1;
  }
  Axis ay{ymin, ymax, opts.log_y};
  const double x0 = 70, x1 = opts.width - 20;
  const double y0 = opts.height - 60, y1 = 40;
  const double group_w = (x1 - x0) / static_cast<double>(group_labels.size());
  const size_t per_group = series_labels.size();

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
      << "\" height=\"" << opts.height << "\">\n";
  Axis ax{0, 1, false};
  frame_and_axes(out, opts, ax, ay, x0, x1, y0, y1);

  for (size_t g = 0; g < boxes.size(); ++g) {
    double gx = x0 + group_w * (static_cast<double>(g) + 0.5);
    out << "<text x=\"" << fmt_pix(gx) << "\" y=\"" << fmt_pix(y0 + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(group_labels[g])
        << "</text>\n";
    for (size_t s = 0; s < boxes[g].size(); ++s) {
      const BoxStats& b = boxes[g][s];
      double w = group_w / (2.0 * static_cast<double>(per_group) + 1.0);
      double cx = gx + w * (static_cast<double>(s) - (static_cast<double>(per_group) - 1) / 2.0) * 2.0;
      const char* color = kPalette[s % 8];
      double py_min = ay.map(b.min, y0, y1), py_max = ay.map(b.max, y0, y1);
      double py_q1 = ay.map(b.q1, y0, y1), py_q3 = ay.map(b.q3, y0, y1);
      double py_med = ay.map(b.median, y0, y1);
      out << "<line class=\"whisker\" x1=\"" << fmt_pix(cx) << "\" y1=\""
          << fmt_pix(py_min) << "\" x2=\"" << fmt_pix(cx) << "\" y2=\""
          << fmt_pix(py_max) << "\" stroke=\"" << color << "\"/>\n";
      out << "<rect class=\"box\" data-label=\"" << escape(group_labels[g]) << '/'
          << escape(series_labels[s]) << "\" x=\"" << fmt_pix(cx - w / 2)
          << "\" y=\"" << fmt_pix(py_q3) << "\" width=\"" << fmt_pix(w)
          << "\" height=\"" << fmt_pix(py_q1 - py_q3) << "\" fill=\"" << color
          << "\" fill-opacity=\"0.35\" stroke=\"" << color << "\"/>\n";
      out << "<line class=\"median\" x1=\"" << fmt_pix(cx - w / 2) << "\" y1=\""
          << fmt_pix(py_med) << "\" x2=\"" << fmt_pix(cx + w / 2) << "\" y2=\""
          << fmt_pix(py_med) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    }
  }
  for (size_t s = 0; s < series_labels.size(); ++s) {
    out << "<text x=\"" << fmt_pix(x1 - 150) << "\" y=\""
        << fmt_pix(y1 + 16 + 16 * static_cast<double>(s)) << "\" font-size=\"12\" fill=\""
        << kPalette[s % 8] << "\">" << escape(series_labels[s]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<Series> parse_data_polylines(const std::string& svg_text) {
  std::vector<Series> series;
  size_t pos = 0;
  while ((pos = svg_text.find("<polyline class=\"data\"", pos)) != std::string::npos) {
    size_t end = svg_text.find("/>", pos);
    std::string element = svg_text.substr(pos, end - pos);
    Series s;
    auto label_at = element.find("data-label=\"");
    if (label_at != std::string::npos) {
      label_at += 12;
      s.label = element.substr(label_at, element.find('"', label_at) - label_at);
    }
    auto points_at = element.find("points=\"");
    if (points_at != std::string::npos) {
      points_at += 8;
      std::string pts = element.substr(points_at, element.find('"', points_at) - points_at);
      std::istringstream in(pts);
      std::string pair;
      while (in >> pair) {
        auto comma = pair.find(',');
        if (comma == std::string::npos) continue;
        s.points.emplace_back(std::stod(pair.substr(0, comma)),
                              std::stod(pair.substr(comma + 1)));
      }
    }
    series.push_back(std::move(s));
    pos = end;
  }
  return series;
}

}  // namespace scoutnd::svg
