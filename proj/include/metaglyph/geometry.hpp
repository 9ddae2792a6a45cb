#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace metaglyph {

struct Point {
  double x{0};
  double y{0};

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned rectangle. A default-constructed Rect is empty and grows
/// through expand().
struct Rect {
  double min_x{std::numeric_limits<double>::infinity()};
  double min_y{std::numeric_limits<double>::infinity()};
  double max_x{-std::numeric_limits<double>::infinity()};
  double max_y{-std::numeric_limits<double>::infinity()};

  static Rect from_xywh(double x, double y, double w, double h) { return {x, y, x + w, y + h}; }
  static Rect centered(Point c, double w, double h) {
    return {c.x - w / 2, c.y - h / 2, c.x + w / 2, c.y + h / 2};
  }

  bool empty() const { return !(max_x >= min_x && max_y >= min_y); }
  double width() const { return empty() ? 0.0 : max_x - min_x; }
  double height() const { return empty() ? 0.0 : max_y - min_y; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }
  Point center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }

  void expand(Point p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void expand(const Rect& r) {
    if (r.empty()) return;
    expand(Point{r.min_x, r.min_y});
    expand(Point{r.max_x, r.max_y});
  }
  bool contains(Point p, double eps = 0) const {
    return p.x >= min_x - eps && p.x <= max_x + eps && p.y >= min_y - eps && p.y <= max_y + eps;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect intersection(const Rect& a, const Rect& b) {
  Rect r{std::max(a.min_x, b.min_x), std::max(a.min_y, b.min_y), std::min(a.max_x, b.max_x),
         std::min(a.max_y, b.max_y)};
  if (r.max_x < r.min_x || r.max_y < r.min_y) return Rect{};
  return r;
}

inline double intersection_area(const Rect& a, const Rect& b) { return intersection(a, b).area(); }

/// 2D affine map in SVG matrix(a b c d e f) order:
///   x' = a*x + c*y + e,  y' = b*x + d*y + f
struct Affine {
  double a{1}, b{0}, c{0}, d{1}, e{0}, f{0};

  static Affine translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
  static Affine scale(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
  static Affine rotate_deg(double deg, double cx = 0, double cy = 0);

  Point apply(Point p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }

  /// Composition: (*this * rhs).apply(p) == this->apply(rhs.apply(p)).
  Affine operator*(const Affine& r) const {
    return {a * r.a + c * r.b, b * r.a + d * r.b, a * r.c + c * r.d,
            b * r.c + d * r.d, a * r.e + c * r.f + e, b * r.e + d * r.f + f};
  }

  double determinant() const { return a * d - b * c; }
  bool operator==(const Affine&) const = default;
};

inline Affine Affine::rotate_deg(double deg, double cx, double cy) {
  const double rad = deg * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  Affine rot{cs, sn, -sn, cs, 0, 0};
  return translate(cx, cy) * rot * translate(-cx, -cy);
}

/// A flattened subpath: straight segments between consecutive points.
struct Polyline {
  std::vector<Point> points;
  bool closed{false};
};

/// Signed shoelace area; positive for counter-clockwise in a y-up frame.
double signed_area(std::span<const Point> ring);
double polyline_length(const Polyline& pl);
Rect bounds(std::span<const Polyline> outline);

/// Uniformly resample a closed ring by arc length.
std::vector<Point> resample_ring(std::span<const Point> ring, std::size_t samples);

}  // namespace metaglyph
