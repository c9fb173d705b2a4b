#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "scdim/dimsolver.hpp"
#include "scdim/errors.hpp"

namespace scdim::cli {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

// "--" may not occur inside an XML comment.
std::string comment_safe(std::string text) {
  for (std::size_t i = text.find("--"); i != std::string::npos; i = text.find("--", i)) text.replace(i, 2, "- -");
  return text;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v, double from, double to) const {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return from + t * (to - from);
  }
  std::string label(double v) const { return log ? num(std::pow(10.0, v)) : num(v); }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a;
  a.log = log;
  if (values.empty()) return a;
  a.lo = *std::min_element(values.begin(), values.end());
  a.hi = *std::max_element(values.begin(), values.end());
  if (!log) a.lo = std::min(a.lo, 0.0);
  if (a.hi <= a.lo) a.hi = a.lo + 1;
  return a;
}

}  // namespace

std::string render_profile_svg(std::string_view csv, bool log_log) {
  const auto profile = parse_profile_csv(csv);
  std::vector<std::string> comments;
  {
    std::istringstream in{std::string(csv)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '#') comments.push_back(line);
    }
  }

  struct Point {
    double x, y;
    bool exact;
  };
  std::vector<Point> points;
  for (const auto& s : profile.samples) {
    double x = to_double(s.s), y = to_double(s.bound);
    if (log_log) {
      if (x <= 0 || y <= 0) continue;
      x = std::log10(x);
      y = std::log10(y);
    }
    points.push_back({x, y, s.method == SolveMethod::exact});
  }
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const Axis ax = make_axis(xs, log_log), ay = make_axis(ys, log_log);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n";
  if (!comments.empty()) {
    out << "<!--\n";
    for (const auto& c : comments) out << comment_safe(c) << "\n";
    out << "-->\n";
  }
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title = "D_" + std::to_string(profile.color_count - 1) + " profile" +
                            (profile.provenance.empty() ? "" : " of " + profile.provenance) +
                            (log_log ? " (log-log)" : "");
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << escape(title) << "</text>\n";
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1)
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = ax.lo + (ax.hi - ax.lo) * k / 4, vy = ay.lo + (ay.hi - ay.lo) * k / 4;
    const double px = ax.map(vx, x0, x1), py = ay.map(vy, y0, y1);
    out << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"11\">"
        << ax.label(vx) << "</text>\n";
    out << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\" "
           "font-family=\"sans-serif\" font-size=\"11\">"
        << ay.label(vy) << "</text>\n";
  }
  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">s</text>\n";
  out << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << num((y0 + y1) / 2) << ")\">bound</text>\n";
  if (points.size() > 1) {
    out << "<polyline fill=\"none\" stroke=\"#4477aa\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      out << (i ? " " : "") << num(ax.map(points[i].x, x0, x1)) << "," << num(ay.map(points[i].y, y0, y1));
    }
    out << "\"/>\n";
  }
  // Filled markers are exact samples, hollow ones heuristic.
  for (const auto& p : points) {
    out << "<circle cx=\"" << num(ax.map(p.x, x0, x1)) << "\" cy=\"" << num(ay.map(p.y, y0, y1))
        << "\" r=\"3.5\" stroke=\"#4477aa\" fill=\"" << (p.exact ? "#4477aa" : "white") << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace scdim::cli
