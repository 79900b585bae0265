#pragma once

#include <string>
#include <vector>

namespace swabsim {

/// Minimal self-contained SVG line chart; deterministic text output.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_series(std::string label, std::string color, std::vector<double> x,
                  std::vector<double> y);

  std::string render(int width = 640, int height = 360) const;
  void write(const std::string& path, int width = 640, int height = 360) const;

 private:
  struct Series {
    std::string label, color;
    std::vector<double> x, y;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
};

}  // namespace swabsim
