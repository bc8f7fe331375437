#include "relay/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace relay {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Round tick spacing to 1/2/5 times a power of ten.
double nice_step(double span, int target_ticks) {
  if (span <= 0) return 1;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double f = 10;
  if (frac <= 1) f = 1;
  else if (frac <= 2) f = 2;
  else if (frac <= 5) f = 5;
  return f * mag;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<Series>& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const Series& s : series) {
    for (size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
      if (std::isnan(s.ys[i]) || std::isnan(s.xs[i])) continue;
      if (!any) {
        xmin = xmax = s.xs[i];
        ymin = ymax = s.ys[i];
        any = true;
      } else {
        xmin = std::min(xmin, s.xs[i]);
        xmax = std::max(xmax, s.xs[i]);
        ymin = std::min(ymin, s.ys[i]);
        ymax = std::max(ymax, s.ys[i]);
      }
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) {
    return kTop + ph - (y - ymin) / (ymax - ymin) * ph;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
     << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << escape(title) << "</text>\n";

  const double xstep = nice_step(xmax - xmin, 8);
  const double ystep = nice_step(ymax - ymin, 6);
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-9 * xstep;
       x += xstep) {
    const double gx = px(x);
    os << "<line x1=\"" << fmt(gx) << "\" y1=\"" << kTop << "\" x2=\""
       << fmt(gx) << "\" y2=\"" << kTop + ph
       << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(gx) << "\" y=\"" << kTop + ph + 16
       << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-9 * ystep;
       y += ystep) {
    const double gy = py(y);
    os << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(gy) << "\" x2=\""
       << kLeft + pw << "\" y2=\"" << fmt(gy)
       << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(gy + 4)
       << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  os << "</g>\n";

  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
     << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << escape(xlabel) << "</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + ph / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << escape(ylabel) << "</text>\n";

  for (const Series& s : series) {
    os << "<path fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\" d=\"";
    bool pen_down = false;
    for (size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
      if (std::isnan(s.ys[i]) || std::isnan(s.xs[i])) {
        pen_down = false;
        continue;
      }
      os << (pen_down ? 'L' : 'M') << fmt(px(s.xs[i])) << ' '
         << fmt(py(s.ys[i]));
      pen_down = true;
    }
    os << "\"/>\n";
  }

  double ly = kTop + 14;
  for (const Series& s : series) {
    os << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << fmt(ly - 4)
       << "\" x2=\"" << kLeft + pw - 125 << "\" y2=\"" << fmt(ly - 4)
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw - 120 << "\" y=\"" << fmt(ly)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.name)
       << "</text>\n";
    ly += 16;
  }

  os << "</svg>\n";
  return os.str();
}

}  // namespace relay
