#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaglyph/geometry.hpp"

namespace metaglyph::svg {

/// Path geometry in absolute user units. Quadratics and arcs are converted to
/// cubics at parse time so an affine map can be applied exactly to control
/// points.
struct Segment {
  enum class Kind { Line, Cubic } kind{Kind::Line};
  Point c1{}, c2{};  // cubic control points, unused for lines
  Point end{};
};

struct Subpath {
  Point start{};
  std::vector<Segment> segments;
  bool closed{false};
};

struct Path {
  std::vector<Subpath> subpaths;

  Path transformed(const Affine& m) const;
  bool empty() const;
};

/// Parse SVG path data ("M 0 0 L 10 0 ..."). Throws Error{ParseError}.
Path parse_path_data(std::string_view d);

/// Parse a transform attribute list. Throws Error{ParseError}.
Affine parse_transform(std::string_view text);

/// Flatten a path into polylines with the given maximum chord deviation.
std::vector<Polyline> flatten(const Path& path, double tolerance = 0.1);

/// Serialize as absolute path data with fixed precision.
std::string to_path_data(const Path& path, int precision = 3);

enum class ShapeKind { Path, Circle, Ellipse, Rect, Line, Polyline, Polygon };
std::string_view to_string(ShapeKind k);

struct Style {
  std::string fill{"#000000"};
  std::string stroke{"none"};
  double stroke_width{1.0};
  double opacity{1.0};
};

/// One drawable leaf of the document, normalized to path form.
struct Drawable {
  ShapeKind kind{ShapeKind::Path};
  Path path;  // absolute coordinates, transforms applied
  Style style;
  std::optional<std::string> label;  // id, <title> or class
  /// Effective radii for circle/ellipse sources when the accumulated
  /// transform has no skew or rotation.
  std::optional<std::pair<double, double>> radii;
};

struct Document {
  std::optional<Rect> view_box;
  double width{0};
  double height{0};
  std::vector<Drawable> drawables;

  /// viewBox, else width/height, else union bounds of all drawables.
  Rect canvas(double tolerance = 0.1) const;
};

/// Parse the supported SVG 1.1 subset. Throws Error{ParseError} on malformed
/// input and Error{UnsupportedFeature} for raster images, filters, masks and
/// foreign objects.
Document parse(std::string_view bytes);

/// Shortest round-trippable fixed-precision number formatting.
std::string fmt_num(double v, int precision = 3);

/// Escape text for XML attribute/content.
std::string xml_escape(std::string_view s);

}  // namespace metaglyph::svg
