#include "stancelab/plot.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "stancelab/errors.hpp"

namespace stancelab {

namespace {

// Classic 5x7 column-encoded ASCII font (code points 32..126).
const unsigned char kFont5x7[95][5] = {
    {0x00, 0x00, 0x00, 0x00, 0x00}, {0x00, 0x00, 0x5F, 0x00, 0x00},
    {0x00, 0x07, 0x00, 0x07, 0x00}, {0x14, 0x7F, 0x14, 0x7F, 0x14},
    {0x24, 0x2A, 0x7F, 0x2A, 0x12}, {0x23, 0x13, 0x08, 0x64, 0x62},
    {0x36, 0x49, 0x55, 0x22, 0x50}, {0x00, 0x05, 0x03, 0x00, 0x00},
    {0x00, 0x1C, 0x22, 0x41, 0x00}, {0x00, 0x41, 0x22, 0x1C, 0x00},
    {0x14, 0x08, 0x3E, 0x08, 0x14}, {0x08, 0x08, 0x3E, 0x08, 0x08},
    {0x00, 0x50, 0x30, 0x00, 0x00}, {0x08, 0x08, 0x08, 0x08, 0x08},
    {0x00, 0x60, 0x60, 0x00, 0x00}, {0x20, 0x10, 0x08, 0x04, 0x02},
    {0x3E, 0x51, 0x49, 0x45, 0x3E}, {0x00, 0x42, 0x7F, 0x40, 0x00},
    {0x42, 0x61, 0x51, 0x49, 0x46}, {0x21, 0x41, 0x45, 0x4B, 0x31},
    {0x18, 0x14, 0x12, 0x7F, 0x10}, {0x27, 0x45, 0x45, 0x45, 0x39},
    {0x3C, 0x4A, 0x49, 0x49, 0x30}, {0x01, 0x71, 0x09, 0x05, 0x03},
    {0x36, 0x49, 0x49, 0x49, 0x36}, {0x06, 0x49, 0x49, 0x29, 0x1E},
    {0x00, 0x36, 0x36, 0x00, 0x00}, {0x00, 0x56, 0x36, 0x00, 0x00},
    {0x00, 0x08, 0x14, 0x22, 0x41}, {0x14, 0x14, 0x14, 0x14, 0x14},
    {0x41, 0x22, 0x14, 0x08, 0x00}, {0x02, 0x01, 0x51, 0x09, 0x06},
    {0x32, 0x49, 0x79, 0x41, 0x3E}, {0x7E, 0x11, 0x11, 0x11, 0x7E},
    {0x7F, 0x49, 0x49, 0x49, 0x36}, {0x3E, 0x41, 0x41, 0x41, 0x22},
    {0x7F, 0x41, 0x41, 0x22, 0x1C}, {0x7F, 0x49, 0x49, 0x49, 0x41},
    {0x7F, 0x09, 0x09, 0x01, 0x01}, {0x3E, 0x41, 0x41, 0x51, 0x32},
    {0x7F, 0x08, 0x08, 0x08, 0x7F}, {0x00, 0x41, 0x7F, 0x41, 0x00},
    {0x20, 0x40, 0x41, 0x3F, 0x01}, {0x7F, 0x08, 0x14, 0x22, 0x41},
    {0x7F, 0x40, 0x40, 0x40, 0x40}, {0x7F, 0x02, 0x04, 0x02, 0x7F},
    {0x7F, 0x04, 0x08, 0x10, 0x7F}, {0x3E, 0x41, 0x41, 0x41, 0x3E},
    {0x7F, 0x09, 0x09, 0x09, 0x06}, {0x3E, 0x41, 0x51, 0x21, 0x5E},
    {0x7F, 0x09, 0x19, 0x29, 0x46}, {0x46, 0x49, 0x49, 0x49, 0x31},
    {0x01, 0x01, 0x7F, 0x01, 0x01}, {0x3F, 0x40, 0x40, 0x40, 0x3F},
    {0x1F, 0x20, 0x40, 0x20, 0x1F}, {0x7F, 0x20, 0x18, 0x20, 0x7F},
    {0x63, 0x14, 0x08, 0x14, 0x63}, {0x03, 0x04, 0x78, 0x04, 0x03},
    {0x61, 0x51, 0x49, 0x45, 0x43}, {0x00, 0x00, 0x7F, 0x41, 0x41},
    {0x02, 0x04, 0x08, 0x10, 0x20}, {0x41, 0x41, 0x7F, 0x00, 0x00},
    {0x04, 0x02, 0x01, 0x02, 0x04}, {0x40, 0x40, 0x40, 0x40, 0x40},
    {0x00, 0x01, 0x02, 0x04, 0x00}, {0x20, 0x54, 0x54, 0x54, 0x78},
    {0x7F, 0x48, 0x44, 0x44, 0x38}, {0x38, 0x44, 0x44, 0x44, 0x20},
    {0x38, 0x44, 0x44, 0x48, 0x7F}, {0x38, 0x54, 0x54, 0x54, 0x18},
    {0x08, 0x7E, 0x09, 0x01, 0x02}, {0x08, 0x14, 0x54, 0x54, 0x3C},
    {0x7F, 0x08, 0x04, 0x04, 0x78}, {0x00, 0x44, 0x7D, 0x40, 0x00},
    {0x20, 0x40, 0x44, 0x3D, 0x00}, {0x00, 0x7F, 0x10, 0x28, 0x44},
    {0x00, 0x41, 0x7F, 0x40, 0x00}, {0x7C, 0x04, 0x18, 0x04, 0x78},
    {0x7C, 0x08, 0x04, 0x04, 0x78}, {0x38, 0x44, 0x44, 0x44, 0x38},
    {0x7C, 0x14, 0x14, 0x14, 0x08}, {0x08, 0x14, 0x14, 0x18, 0x7C},
    {0x7C, 0x08, 0x04, 0x04, 0x08}, {0x48, 0x54, 0x54, 0x54, 0x20},
    {0x04, 0x3F, 0x44, 0x40, 0x20}, {0x3C, 0x40, 0x40, 0x20, 0x7C},
    {0x1C, 0x20, 0x40, 0x20, 0x1C}, {0x3C, 0x40, 0x30, 0x40, 0x3C},
    {0x44, 0x28, 0x10, 0x28, 0x44}, {0x0C, 0x50, 0x50, 0x50, 0x3C},
    {0x44, 0x64, 0x54, 0x4C, 0x44}, {0x00, 0x08, 0x36, 0x41, 0x00},
    {0x00, 0x00, 0x7F, 0x00, 0x00}, {0x00, 0x41, 0x36, 0x08, 0x00},
    {0x08, 0x04, 0x08, 0x10, 0x08},
};

struct Rgb {
  unsigned char r = 0, g = 0, b = 0;
};

Rgb parse_color(const std::string& hex) {
  if (hex.size() != 7 || hex[0] != '#') {
    throw ConfigError("bad color '" + hex + "', expected #rrggbb");
  }
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError("bad color '" + hex + "'");
  };
  Rgb out;
  out.r = static_cast<unsigned char>(nibble(hex[1]) * 16 + nibble(hex[2]));
  out.g = static_cast<unsigned char>(nibble(hex[3]) * 16 + nibble(hex[4]));
  out.b = static_cast<unsigned char>(nibble(hex[5]) * 16 + nibble(hex[6]));
  return out;
}

std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double nice_step(double range) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  return step * mag;
}

// Pixel-space primitives shared by both writers.
struct Op {
  enum Kind { Rect, Line, Disc, Tri, Text } kind = Line;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  double width = 1.0;  // line width or disc radius
  std::string color = "#000000";
  std::string text;
  char anchor = 's';  // s(tart) | m(iddle) | e(nd), for Text
};

constexpr int kGlyphW = 6;  // 5 columns + 1 space
constexpr int kGlyphH = 8;

double text_width(const std::string& s) { return static_cast<double>(s.size() * kGlyphW); }

}  // namespace

struct Figure::Impl {
  PlotStyle style;
  bool has_x_range = false, has_y_range = false;
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  double data_x_min = std::numeric_limits<double>::infinity();
  double data_x_max = -std::numeric_limits<double>::infinity();
  double data_y_min = std::numeric_limits<double>::infinity();
  double data_y_max = -std::numeric_limits<double>::infinity();

  struct Element {
    Op::Kind kind;
    std::vector<double> xs, ys;
    double size = 1.0;
    std::string color;
    std::string text;
  };
  std::vector<Element> elements;
  std::vector<std::pair<std::string, std::string>> legend;  // label, color

  void touch(double x, double y) {
    data_x_min = std::min(data_x_min, x);
    data_x_max = std::max(data_x_max, x);
    data_y_min = std::min(data_y_min, y);
    data_y_max = std::max(data_y_max, y);
  }

  struct Frame {
    double left, right, top, bottom;  // pixel margins of the plot area
    double x_lo, x_hi, y_lo, y_hi;    // data range
    double px(double x, const PlotStyle& s) const {
      return left + (x - x_lo) / (x_hi - x_lo) * (s.width - left - right);
    }
    double py(double y, const PlotStyle& s) const {
      return s.height - bottom - (y - y_lo) / (y_hi - y_lo) * (s.height - top - bottom);
    }
  };

  Frame frame() const {
    Frame f{70.0, 20.0, style.title.empty() ? 20.0 : 42.0, 52.0, 0, 1, 0, 1};
    double xl = has_x_range ? x_lo : data_x_min;
    double xh = has_x_range ? x_hi : data_x_max;
    double yl = has_y_range ? y_lo : data_y_min;
    double yh = has_y_range ? y_hi : data_y_max;
    if (!std::isfinite(xl) || !std::isfinite(xh)) {
      xl = 0;
      xh = 1;
    }
    if (!std::isfinite(yl) || !std::isfinite(yh)) {
      yl = 0;
      yh = 1;
    }
    if (xl == xh) {
      xl -= 0.5;
      xh += 0.5;
    }
    if (yl == yh) {
      yl -= 0.5;
      yh += 0.5;
    }
    if (!has_x_range) {
      const double pad = (xh - xl) * 0.06;
      xl -= pad;
      xh += pad;
    }
    if (!has_y_range) {
      const double pad = (yh - yl) * 0.08;
      yl -= pad;
      yh += pad;
    }
    f.x_lo = xl;
    f.x_hi = xh;
    f.y_lo = yl;
    f.y_hi = yh;
    return f;
  }

  std::vector<Op> draw_list() const {
    const Frame f = frame();
    std::vector<Op> ops;
    const double plot_left = f.left;
    const double plot_right = style.width - f.right;
    const double plot_top = f.top;
    const double plot_bottom = style.height - f.bottom;

    // background
    ops.push_back({Op::Rect, 0, 0, static_cast<double>(style.width),
                   static_cast<double>(style.height), 0, 0, 0, "#ffffff", "", 's'});

    // gridlines + ticks
    const double xstep = nice_step(f.x_hi - f.x_lo);
    const double ystep = nice_step(f.y_hi - f.y_lo);
    if (style.show_x_ticks) {
      for (double v = std::ceil(f.x_lo / xstep) * xstep; v <= f.x_hi + 1e-12 * xstep;
           v += xstep) {
        const double px = f.px(v, style);
        ops.push_back(
            {Op::Line, px, plot_top, px, plot_bottom, 0, 0, 1.0, "#e4e4e4", "", 's'});
        ops.push_back({Op::Text, px, plot_bottom + 16, 0, 0, 0, 0, 1.0, "#555555",
                       format_tick(std::abs(v) < 1e-12 ? 0.0 : v), 'm'});
      }
    }
    if (style.show_y_ticks) {
      for (double v = std::ceil(f.y_lo / ystep) * ystep; v <= f.y_hi + 1e-12 * ystep;
           v += ystep) {
        const double py = f.py(v, style);
        ops.push_back(
            {Op::Line, plot_left, py, plot_right, py, 0, 0, 1.0, "#e4e4e4", "", 's'});
        ops.push_back({Op::Text, plot_left - 6, py + 3, 0, 0, 0, 0, 1.0, "#555555",
                       format_tick(std::abs(v) < 1e-12 ? 0.0 : v), 'e'});
      }
    }

    // data elements
    for (const auto& e : elements) {
      switch (e.kind) {
        case Op::Disc:
          ops.push_back({Op::Disc, f.px(e.xs[0], style), f.py(e.ys[0], style), 0, 0, 0, 0,
                         e.size, e.color, "", 's'});
          break;
        case Op::Rect: {
          const double x0 = f.px(e.xs[0], style);
          const double x1 = f.px(e.xs[1], style);
          const double y0 = f.py(e.ys[0], style);
          const double y1 = f.py(e.ys[1], style);
          ops.push_back({Op::Rect, std::min(x0, x1), std::min(y0, y1), std::max(x0, x1),
                         std::max(y0, y1), 0, 0, 0, e.color, "", 's'});
          break;
        }
        case Op::Line: {
          for (std::size_t i = 0; i + 1 < e.xs.size(); ++i) {
            ops.push_back({Op::Line, f.px(e.xs[i], style), f.py(e.ys[i], style),
                           f.px(e.xs[i + 1], style), f.py(e.ys[i + 1], style), 0, 0, e.size,
                           e.color, "", 's'});
          }
          break;
        }
        case Op::Tri: {  // arrow: shaft plus head triangle
          const double x0 = f.px(e.xs[0], style);
          const double y0 = f.py(e.ys[0], style);
          const double x1 = f.px(e.xs[1], style);
          const double y1 = f.py(e.ys[1], style);
          const double dx = x1 - x0;
          const double dy = y1 - y0;
          const double len = std::hypot(dx, dy);
          if (len < 1e-9) break;
          const double ux = dx / len;
          const double uy = dy / len;
          const double head = std::min(10.0, len * 0.4);
          const double bx = x1 - ux * head;
          const double by = y1 - uy * head;
          ops.push_back({Op::Line, x0, y0, bx, by, 0, 0, e.size, e.color, "", 's'});
          ops.push_back({Op::Tri, x1, y1, bx - uy * head * 0.5, by + ux * head * 0.5,
                         bx + uy * head * 0.5, by - ux * head * 0.5, 0, e.color, "", 's'});
          break;
        }
        case Op::Text:
          ops.push_back({Op::Text, f.px(e.xs[0], style), f.py(e.ys[0], style), 0, 0, 0, 0,
                         1.0, e.color, e.text, 'm'});
          break;
      }
    }

    // axes on top of data
    ops.push_back({Op::Line, plot_left, plot_bottom, plot_right, plot_bottom, 0, 0, 1.5,
                   "#333333", "", 's'});
    ops.push_back(
        {Op::Line, plot_left, plot_top, plot_left, plot_bottom, 0, 0, 1.5, "#333333", "", 's'});

    if (!style.title.empty()) {
      ops.push_back({Op::Text, style.width / 2.0, 22, 0, 0, 0, 0, 1.0, "#111111",
                     style.title, 'm'});
    }
    if (!style.x_label.empty()) {
      ops.push_back({Op::Text, (plot_left + plot_right) / 2.0, style.height - 14.0, 0, 0, 0,
                     0, 1.0, "#333333", style.x_label, 'm'});
    }
    if (!style.y_label.empty()) {
      // rendered horizontally above the axis to keep the rasterizer simple
      ops.push_back(
          {Op::Text, plot_left, plot_top - 6, 0, 0, 0, 0, 1.0, "#333333", style.y_label, 's'});
    }

    // legend, top-right corner of the plot area
    double ly = plot_top + 14;
    for (const auto& [label, color] : legend) {
      const double lx = plot_right - 150;
      ops.push_back({Op::Rect, lx, ly - 7, lx + 14, ly + 2, 0, 0, 0, color, "", 's'});
      ops.push_back({Op::Text, lx + 20, ly + 2, 0, 0, 0, 0, 1.0, "#333333", label, 's'});
      ly += 16;
    }
    return ops;
  }
};

Figure::Figure(PlotStyle style) : impl_(std::make_unique<Impl>()) {
  impl_->style = std::move(style);
}
Figure::~Figure() = default;
Figure::Figure(Figure&&) noexcept = default;
Figure& Figure::operator=(Figure&&) noexcept = default;

void Figure::set_x_range(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("x range must satisfy lo < hi");
  impl_->has_x_range = true;
  impl_->x_lo = lo;
  impl_->x_hi = hi;
}

void Figure::set_y_range(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("y range must satisfy lo < hi");
  impl_->has_y_range = true;
  impl_->y_lo = lo;
  impl_->y_hi = hi;
}

void Figure::add_point(double x, double y, const std::string& color, double size) {
  impl_->touch(x, y);
  impl_->elements.push_back({Op::Disc, {x}, {y}, size, color, ""});
}

void Figure::add_line(double x1, double y1, double x2, double y2, const std::string& color,
                      double width) {
  impl_->touch(x1, y1);
  impl_->touch(x2, y2);
  impl_->elements.push_back({Op::Line, {x1, x2}, {y1, y2}, width, color, ""});
}

void Figure::add_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::string& color, double width) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ConfigError("polyline needs matching xs/ys with at least 2 points");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) impl_->touch(xs[i], ys[i]);
  impl_->elements.push_back({Op::Line, xs, ys, width, color, ""});
}

void Figure::add_bar(double x, double bar_width, double y0, double y1,
                     const std::string& color) {
  impl_->touch(x - bar_width / 2, y0);
  impl_->touch(x + bar_width / 2, y1);
  impl_->elements.push_back(
      {Op::Rect, {x - bar_width / 2, x + bar_width / 2}, {y0, y1}, 0, color, ""});
}

void Figure::add_error_bar(double x, double y, double half_height, const std::string& color) {
  impl_->touch(x, y - half_height);
  impl_->touch(x, y + half_height);
  impl_->elements.push_back(
      {Op::Line, {x, x}, {y - half_height, y + half_height}, 1.5, color, ""});
}

void Figure::add_arrow(double x1, double y1, double x2, double y2, const std::string& color,
                       double width) {
  impl_->touch(x1, y1);
  impl_->touch(x2, y2);
  impl_->elements.push_back({Op::Tri, {x1, x2}, {y1, y2}, width, color, ""});
}

void Figure::add_cell(double x0, double y0, double x1, double y1, const std::string& color) {
  impl_->touch(x0, y0);
  impl_->touch(x1, y1);
  impl_->elements.push_back({Op::Rect, {x0, x1}, {y0, y1}, 0, color, ""});
}

void Figure::add_text(double x, double y, const std::string& text, const std::string& color) {
  impl_->touch(x, y);
  impl_->elements.push_back({Op::Text, {x}, {y}, 1.0, color, text});
}

void Figure::add_legend(const std::string& label, const std::string& color) {
  impl_->legend.emplace_back(label, color);
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void Figure::write_svg(const std::string& path) const {
  const auto ops = impl_->draw_list();
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << impl_->style.width
      << "\" height=\"" << impl_->style.height << "\" viewBox=\"0 0 "
      << impl_->style.width << " " << impl_->style.height << "\">\n";
  for (const auto& op : ops) {
    switch (op.kind) {
      case Op::Rect:
        out << "<rect x=\"" << num(op.x0) << "\" y=\"" << num(op.y0) << "\" width=\""
            << num(op.x1 - op.x0) << "\" height=\"" << num(op.y1 - op.y0) << "\" fill=\""
            << op.color << "\"/>\n";
        break;
      case Op::Line:
        out << "<line x1=\"" << num(op.x0) << "\" y1=\"" << num(op.y0) << "\" x2=\""
            << num(op.x1) << "\" y2=\"" << num(op.y1) << "\" stroke=\"" << op.color
            << "\" stroke-width=\"" << num(op.width) << "\"/>\n";
        break;
      case Op::Disc:
        out << "<circle cx=\"" << num(op.x0) << "\" cy=\"" << num(op.y0) << "\" r=\""
            << num(op.width) << "\" fill=\"" << op.color << "\"/>\n";
        break;
      case Op::Tri:
        out << "<polygon points=\"" << num(op.x0) << "," << num(op.y0) << " " << num(op.x1)
            << "," << num(op.y1) << " " << num(op.x2) << "," << num(op.y2) << "\" fill=\""
            << op.color << "\"/>\n";
        break;
      case Op::Text: {
        const char* anchor = op.anchor == 'm' ? "middle" : op.anchor == 'e' ? "end" : "start";
        out << "<text x=\"" << num(op.x0) << "\" y=\"" << num(op.y0)
            << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"" << anchor
            << "\" fill=\"" << op.color << "\">" << xml_escape(op.text) << "</text>\n";
        break;
      }
    }
  }
  out << "</svg>\n";
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + path);
  file << out.str();
}

// ---------------------------------------------------------------------------
// PNG

namespace {

class Raster {
 public:
  Raster(int w, int h) : w_(w), h_(h), pix_(static_cast<std::size_t>(w) * h * 3, 255) {}

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    const std::size_t i = (static_cast<std::size_t>(y) * w_ + x) * 3;
    pix_[i] = c.r;
    pix_[i + 1] = c.g;
    pix_[i + 2] = c.b;
  }

  void fill_rect(double x0, double y0, double x1, double y1, Rgb c) {
    const int xa = static_cast<int>(std::floor(std::min(x0, x1)));
    const int xb = static_cast<int>(std::ceil(std::max(x0, x1)));
    const int ya = static_cast<int>(std::floor(std::min(y0, y1)));
    const int yb = static_cast<int>(std::ceil(std::max(y0, y1)));
    for (int y = ya; y < yb; ++y) {
      for (int x = xa; x < xb; ++x) set(x, y, c);
    }
  }

  void disc(double cx, double cy, double r, Rgb c) {
    for (int y = static_cast<int>(cy - r) - 1; y <= static_cast<int>(cy + r) + 1; ++y) {
      for (int x = static_cast<int>(cx - r) - 1; x <= static_cast<int>(cx + r) + 1; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= r * r) set(x, y, c);
      }
    }
  }

  void line(double x0, double y0, double x1, double y1, double width, Rgb c) {
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len = std::hypot(dx, dy);
    const int steps = std::max(1, static_cast<int>(len * 1.5));
    const double r = std::max(0.5, width / 2.0);
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      disc(x0 + dx * t, y0 + dy * t, r, c);
    }
  }

  void triangle(double ax, double ay, double bx, double by, double cx, double cy, Rgb c) {
    const int xa = static_cast<int>(std::floor(std::min({ax, bx, cx})));
    const int xb = static_cast<int>(std::ceil(std::max({ax, bx, cx})));
    const int ya = static_cast<int>(std::floor(std::min({ay, by, cy})));
    const int yb = static_cast<int>(std::ceil(std::max({ay, by, cy})));
    auto edge = [](double px, double py, double qx, double qy, double rx, double ry) {
      return (qx - px) * (ry - py) - (qy - py) * (rx - px);
    };
    for (int y = ya; y <= yb; ++y) {
      for (int x = xa; x <= xb; ++x) {
        const double px = x + 0.5;
        const double py = y + 0.5;
        const double e0 = edge(ax, ay, bx, by, px, py);
        const double e1 = edge(bx, by, cx, cy, px, py);
        const double e2 = edge(cx, cy, ax, ay, px, py);
        if ((e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0)) {
          set(x, y, c);
        }
      }
    }
  }

  void text(double x, double y, const std::string& s, char anchor, Rgb c) {
    double left = x;
    if (anchor == 'm') left -= text_width(s) / 2.0;
    if (anchor == 'e') left -= text_width(s);
    const int baseline = static_cast<int>(y);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const unsigned char ch = static_cast<unsigned char>(s[i]);
      if (ch < 32 || ch > 126) continue;
      const unsigned char* glyph = kFont5x7[ch - 32];
      const int gx = static_cast<int>(left) + static_cast<int>(i) * kGlyphW;
      for (int col = 0; col < 5; ++col) {
        for (int row = 0; row < 7; ++row) {
          if (glyph[col] & (1 << row)) set(gx + col, baseline - 7 + row, c);
        }
      }
    }
  }

  const std::vector<unsigned char>& pixels() const { return pix_; }
  int width() const { return w_; }
  int height() const { return h_; }

 private:
  int w_, h_;
  std::vector<unsigned char> pix_;
};

void png_chunk(std::string& out, const char type[4], const std::string& data) {
  auto be32 = [](std::uint32_t v) {
    std::string s(4, '\0');
    s[0] = static_cast<char>(v >> 24);
    s[1] = static_cast<char>(v >> 16);
    s[2] = static_cast<char>(v >> 8);
    s[3] = static_cast<char>(v);
    return s;
  };
  out += be32(static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  const auto crc =
      ::crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  out += be32(static_cast<std::uint32_t>(crc));
}

std::string encode_png(const Raster& raster) {
  const int w = raster.width();
  const int h = raster.height();
  std::string raw;
  raw.reserve(static_cast<std::size_t>(h) * (1 + static_cast<std::size_t>(w) * 3));
  for (int y = 0; y < h; ++y) {
    raw.push_back('\0');  // filter: none
    const auto* row = raster.pixels().data() + static_cast<std::size_t>(y) * w * 3;
    raw.append(reinterpret_cast<const char*>(row), static_cast<std::size_t>(w) * 3);
  }
  uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  if (::compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  9) != Z_OK) {
    throw DataError("png deflate failed");
  }
  compressed.resize(bound);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  auto be32 = [&ihdr](std::uint32_t v) {
    ihdr.push_back(static_cast<char>(v >> 24));
    ihdr.push_back(static_cast<char>(v >> 16));
    ihdr.push_back(static_cast<char>(v >> 8));
    ihdr.push_back(static_cast<char>(v));
  };
  be32(static_cast<std::uint32_t>(w));
  be32(static_cast<std::uint32_t>(h));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // no interlace
  png_chunk(out, "IHDR", ihdr);
  png_chunk(out, "IDAT", compressed);
  png_chunk(out, "IEND", "");
  return out;
}

}  // namespace

void Figure::write_png(const std::string& path) const {
  Raster raster(impl_->style.width, impl_->style.height);
  for (const auto& op : impl_->draw_list()) {
    const Rgb c = parse_color(op.color);
    switch (op.kind) {
      case Op::Rect: raster.fill_rect(op.x0, op.y0, op.x1, op.y1, c); break;
      case Op::Line: raster.line(op.x0, op.y0, op.x1, op.y1, op.width, c); break;
      case Op::Disc: raster.disc(op.x0, op.y0, op.width, c); break;
      case Op::Tri: raster.triangle(op.x0, op.y0, op.x1, op.y1, op.x2, op.y2, c); break;
      case Op::Text: raster.text(op.x0, op.y0, op.text, op.anchor, c); break;
    }
  }
  const std::string png = encode_png(raster);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + path);
  file.write(png.data(), static_cast<std::streamsize>(png.size()));
  if (!file) throw DataError("failed writing " + path);
}

// ---------------------------------------------------------------------------

std::string palette_color(std::size_t index) {
  static const char* kPalette[] = {"#4269d0", "#efb118", "#ff725c", "#6cc5b0",
                                   "#3ca951", "#ff8ab7", "#a463f2", "#97bbf5",
                                   "#9c6b4e", "#9498a0"};
  return kPalette[index % (sizeof kPalette / sizeof kPalette[0])];
}

std::string blend_color(const std::string& from, const std::string& to, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const Rgb a = parse_color(from);
  const Rgb b = parse_color(to);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(a.r + (b.r - a.r) * t)),
                static_cast<int>(std::lround(a.g + (b.g - a.g) * t)),
                static_cast<int>(std::lround(a.b + (b.b - a.b) * t)));
  return buf;
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  auto escape = [](const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
      if (c == '"') quoted += "\"\"";
      else quoted.push_back(c);
    }
    return quoted + "\"";
  };
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << escape(header[i]);
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << escape(row[i]);
    }
    out << "\n";
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + path);
  file << out.str();
}

}  // namespace stancelab
