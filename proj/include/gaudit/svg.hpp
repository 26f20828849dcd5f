#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gaudit {

/// Minimal SVG writer: a plot area with linear axes in data coordinates.
class SvgPlot {
 public:
  SvgPlot(double width, double height, double x_min, double x_max, double y_min, double y_max);

  double px(double x) const;
  double py(double y) const;

  void axes(std::string_view x_label, std::string_view y_label, int ticks = 5);
  void line(double x0, double y0, double x1, double y1, std::string_view cls, std::string_view extra = {});
  void polyline(const std::vector<std::pair<double, double>>& points, std::string_view cls);
  void point(double x, double y, std::string_view cls, std::string_view extra = {});
  void label(double x, double y, std::string_view text, std::string_view cls);
  void title(std::string_view text);

  std::string str() const;

 private:
  double width_, height_;
  double x_min_, x_max_, y_min_, y_max_;
  double left_ = 70, right_ = 30, top_ = 40, bottom_ = 60;
  std::string body_;
};

std::string xml_escape(std::string_view text);
/// Fixed 4-decimal rendering used for coordinates.
std::string svg_number(double v);

}  // namespace gaudit
