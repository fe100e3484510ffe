#pragma once

#include <memory>
#include <string>
#include <vector>

namespace stancelab {

struct PlotStyle {
  int width = 840;
  int height = 560;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool show_x_ticks = true;  // off for categorical axes labeled via add_text
  bool show_y_ticks = true;
};

// Minimal figure builder rendering the same draw list to SVG (vector) and
// PNG (raster). Coordinates are in data space; ranges auto-fit unless set.
class Figure {
 public:
  explicit Figure(PlotStyle style);
  ~Figure();
  Figure(Figure&&) noexcept;
  Figure& operator=(Figure&&) noexcept;

  void set_x_range(double lo, double hi);
  void set_y_range(double lo, double hi);

  void add_point(double x, double y, const std::string& color, double size = 4.0);
  void add_line(double x1, double y1, double x2, double y2, const std::string& color,
                double width = 1.5);
  void add_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::string& color, double width = 2.0);
  void add_bar(double x, double bar_width, double y0, double y1, const std::string& color);
  void add_error_bar(double x, double y, double half_height, const std::string& color);
  void add_arrow(double x1, double y1, double x2, double y2, const std::string& color,
                 double width = 2.0);
  void add_cell(double x0, double y0, double x1, double y1, const std::string& color);
  void add_text(double x, double y, const std::string& text,
                const std::string& color = "#333333");
  void add_legend(const std::string& label, const std::string& color);

  void write_svg(const std::string& path) const;
  void write_png(const std::string& path) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Categorical palette; wraps around.
std::string palette_color(std::size_t index);

// RGB interpolation between two #rrggbb anchors, t in [0,1].
std::string blend_color(const std::string& from, const std::string& to, double t);

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

}  // namespace stancelab
