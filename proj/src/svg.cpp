#include "gaudit/svg.hpp"

#include <cmath>
#include <cstdio>

namespace gaudit {

std::string xml_escape(std::string_view text) {
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

std::string svg_number(double v) {
  if (std::abs(v) < 5e-5) v = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

SvgPlot::SvgPlot(double width, double height, double x_min, double x_max, double y_min, double y_max)
    : width_(width), height_(height), x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  if (x_max_ <= x_min_) x_max_ = x_min_ + 1.0;
  if (y_max_ <= y_min_) y_max_ = y_min_ + 1.0;
}

double SvgPlot::px(double x) const {
  return left_ + (x - x_min_) / (x_max_ - x_min_) * (width_ - left_ - right_);
}

double SvgPlot::py(double y) const {
  return height_ - bottom_ - (y - y_min_) / (y_max_ - y_min_) * (height_ - top_ - bottom_);
}

void SvgPlot::axes(std::string_view x_label, std::string_view y_label, int ticks) {
  const double x0 = px(x_min_), x1 = px(x_max_), y0 = py(y_min_), y1 = py(y_max_);
  body_ += "<g class=\"axes\" stroke=\"#333\" stroke-width=\"1\">\n";
  body_ += "<line x1=\"" + svg_number(x0) + "\" y1=\"" + svg_number(y0) + "\" x2=\"" + svg_number(x1) + "\" y2=\"" +
           svg_number(y0) + "\"/>\n";
  body_ += "<line x1=\"" + svg_number(x0) + "\" y1=\"" + svg_number(y0) + "\" x2=\"" + svg_number(x0) + "\" y2=\"" +
           svg_number(y1) + "\"/>\n";
  body_ += "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int t = 0; t <= ticks; ++t) {
    const double fx = x_min_ + (x_max_ - x_min_) * t / ticks;
    const double fy = y_min_ + (y_max_ - y_min_) * t / ticks;
    char xs[32], ys[32];
    std::snprintf(xs, sizeof xs, "%.2f", fx);
    std::snprintf(ys, sizeof ys, "%.2f", fy);
    body_ += "<text x=\"" + svg_number(px(fx)) + "\" y=\"" + svg_number(y0 + 16) + "\" text-anchor=\"middle\">" +
             xs + "</text>\n";
    body_ += "<text x=\"" + svg_number(x0 - 6) + "\" y=\"" + svg_number(py(fy) + 4) + "\" text-anchor=\"end\">" +
             ys + "</text>\n";
  }
  body_ += "<text x=\"" + svg_number((x0 + x1) / 2) + "\" y=\"" + svg_number(height_ - 15) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + xml_escape(x_label) + "</text>\n";
  body_ += "<text x=\"18\" y=\"" + svg_number((y0 + y1) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
           svg_number((y0 + y1) / 2) + ")\">" + xml_escape(y_label) + "</text>\n</g>\n";
}

void SvgPlot::line(double x0, double y0, double x1, double y1, std::string_view cls, std::string_view extra) {
  body_ += "<line class=\"" + std::string(cls) + "\" x1=\"" + svg_number(px(x0)) + "\" y1=\"" + svg_number(py(y0)) +
           "\" x2=\"" + svg_number(px(x1)) + "\" y2=\"" + svg_number(py(y1)) + "\"";
  if (!extra.empty()) body_ += " " + std::string(extra);
  body_ += "/>\n";
}

void SvgPlot::polyline(const std::vector<std::pair<double, double>>& points, std::string_view cls) {
  body_ += "<polyline class=\"" + std::string(cls) + "\" fill=\"none\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) body_ += ' ';
    body_ += svg_number(px(points[i].first)) + "," + svg_number(py(points[i].second));
  }
  body_ += "\"/>\n";
}

void SvgPlot::point(double x, double y, std::string_view cls, std::string_view extra) {
  body_ += "<circle class=\"" + std::string(cls) + "\" cx=\"" + svg_number(px(x)) + "\" cy=\"" + svg_number(py(y)) +
           "\" r=\"4\"";
  if (!extra.empty()) body_ += " " + std::string(extra);
  body_ += "/>\n";
}

void SvgPlot::label(double x, double y, std::string_view text, std::string_view cls) {
  body_ += "<text class=\"" + std::string(cls) + "\" x=\"" + svg_number(px(x) + 6) + "\" y=\"" + svg_number(py(y) - 6) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(text) + "</text>\n";
}

void SvgPlot::title(std::string_view text) {
  body_ += "<text x=\"" + svg_number(width_ / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
           xml_escape(text) + "</text>\n";
}

std::string SvgPlot::str() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_number(width_) + "\" height=\"" + svg_number(height_) +
         "\" viewBox=\"0 0 " + svg_number(width_) + " " + svg_number(height_) + "\">\n";
  out += "<style>.point{fill:#1f77b4}.whisker{stroke:#1f77b4;stroke-width:1}.curve{stroke:#d62728;stroke-width:1.5}"
         ".marker{stroke:#7f7f7f;stroke-dasharray:4 3}.zero{stroke:#bbb}</style>\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

}  // namespace gaudit
