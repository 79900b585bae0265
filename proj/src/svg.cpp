#include "swabsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace swabsim {

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_series(std::string label, std::string color, std::vector<double> x,
                         std::vector<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("svg: x/y size mismatch");
  series_.push_back({std::move(label), std::move(color), std::move(x), std::move(y)});
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string SvgPlot::render(int width, int height) const {
  const double ml = 62, mr = 16, mt = 30, mb = 46;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymin < ymax)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\" "
       "font-family=\"sans-serif\">"
    << title_ << "</text>\n";

  // Axes and ticks.
  o << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
    << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = xmin + (xmax - xmin) * i / 5.0;
    const double y = ymin + (ymax - ymin) * i / 5.0;
    o << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(px(x))
      << "\" y2=\"" << fmt(mt + ph + 4) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(mt + ph + 16)
      << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(x)
      << "</text>\n";
    o << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << fmt(ml)
      << "\" y2=\"" << fmt(py(y)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(ml - 7) << "\" y=\"" << fmt(py(y) + 3)
      << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(y)
      << "</text>\n";
  }
  o << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height - 8.0)
    << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << x_label_
    << "</text>\n";
  o << "<text x=\"14\" y=\"" << fmt(mt + ph / 2) << "\" text-anchor=\"middle\" font-size=\"11\" "
       "font-family=\"sans-serif\" transform=\"rotate(-90 14 "
    << fmt(mt + ph / 2) << ")\">" << y_label_ << "</text>\n";

  for (const auto& s : series_) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) o << " ";
      o << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
    }
    o << "\"/>\n";
  }

  // Legend.
  double ly = mt + 12;
  for (const auto& s : series_) {
    o << "<line x1=\"" << fmt(ml + 8) << "\" y1=\"" << fmt(ly - 3) << "\" x2=\"" << fmt(ml + 28)
      << "\" y2=\"" << fmt(ly - 3) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n";
    o << "<text x=\"" << fmt(ml + 32) << "\" y=\"" << fmt(ly)
      << "\" font-size=\"10\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    ly += 13;
  }
  o << "</svg>\n";
  return o.str();
}

void SvgPlot::write(const std::string& path, int width, int height) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot write '" + path + "'");
  out << render(width, height);
}

}  // namespace swabsim
