#include "metaglyph/svg.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "metaglyph/error.hpp"

namespace metaglyph::svg {

namespace pt = boost::property_tree;

namespace {

constexpr double kKappa = 0.5522847498307936;  // 4/3*(sqrt(2)-1)

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  void skip_separators() {
    while (pos_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == ','))
      ++pos_;
  }
  bool at_end() {
    skip_separators();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_separators();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  char take() { return s_[pos_++]; }
  bool at_number() {
    const char c = peek();
    return c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c));
  }

  double number() {
    skip_separators();
    // std::from_chars rejects a leading '+', so strip it by hand.
    std::size_t start = pos_;
    if (start < s_.size() && s_[start] == '+') ++start;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + s_.size(), v);
    if (ec != std::errc{} || ptr == s_.data() + start)
      throw Error(ErrorCode::ParseError, "expected number in '" + std::string(s_) + "'");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  // Arc flags may be written without separators ("a1 1 0 01 5 5").
  bool flag() {
    skip_separators();
    if (pos_ >= s_.size() || (s_[pos_] != '0' && s_[pos_] != '1'))
      throw Error(ErrorCode::ParseError, "expected arc flag");
    return s_[pos_++] == '1';
  }

 private:
  std::string_view s_;
  std::size_t pos_{0};
};

Segment line_to(Point p) { return {Segment::Kind::Line, {}, {}, p}; }
Segment cubic_to(Point c1, Point c2, Point p) { return {Segment::Kind::Cubic, c1, c2, p}; }

// Endpoint-parameterized elliptical arc to cubic Béziers, per the SVG
// implementation notes (center conversion, then <=90° pieces).
void arc_to_cubics(Point p0, double rx, double ry, double phi_deg, bool large, bool sweep, Point p1,
                   std::vector<Segment>& out) {
  if (p0 == p1) return;
  rx = std::abs(rx);
  ry = std::abs(ry);
  if (rx == 0 || ry == 0) {
    out.push_back(line_to(p1));
    return;
  }
  const double phi = phi_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(phi), sn = std::sin(phi);
  const double dx = (p0.x - p1.x) / 2, dy = (p0.y - p1.y) / 2;
  const double x1p = cs * dx + sn * dy;
  const double y1p = -sn * dx + cs * dy;
  const double lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
  if (lambda > 1) {
    rx *= std::sqrt(lambda);
    ry *= std::sqrt(lambda);
  }
  const double num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p;
  const double den = rx * rx * y1p * y1p + ry * ry * x1p * x1p;
  double coef = den > 0 ? std::sqrt(std::max(0.0, num / den)) : 0.0;
  if (large == sweep) coef = -coef;
  const double cxp = coef * rx * y1p / ry;
  const double cyp = -coef * ry * x1p / rx;
  const double cx = cs * cxp - sn * cyp + (p0.x + p1.x) / 2;
  const double cy = sn * cxp + cs * cyp + (p0.y + p1.y) / 2;

  auto angle = [](double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  };
  const double theta1 = angle(1, 0, (x1p - cxp) / rx, (y1p - cyp) / ry);
  double dtheta = angle((x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry);
  if (!sweep && dtheta > 0) dtheta -= 2 * std::numbers::pi;
  if (sweep && dtheta < 0) dtheta += 2 * std::numbers::pi;

  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(dtheta) / (std::numbers::pi / 2) - 1e-9)));
  const double delta = dtheta / pieces;
  const double t = 4.0 / 3.0 * std::tan(delta / 4);
  auto on_ellipse = [&](double th) {
    return Point{cx + rx * std::cos(th) * cs - ry * std::sin(th) * sn,
                 cy + rx * std::cos(th) * sn + ry * std::sin(th) * cs};
  };
  auto derivative = [&](double th) {
    return Point{-rx * std::sin(th) * cs - ry * std::cos(th) * sn,
                 -rx * std::sin(th) * sn + ry * std::cos(th) * cs};
  };
  double th = theta1;
  for (int i = 0; i < pieces; ++i) {
    const double th2 = th + delta;
    const Point a = on_ellipse(th), b = i + 1 == pieces ? p1 : on_ellipse(th2);
    const Point da = derivative(th), db = derivative(th2);
    out.push_back(cubic_to({a.x + t * da.x, a.y + t * da.y}, {b.x - t * db.x, b.y - t * db.y}, b));
    th = th2;
  }
}

void flatten_cubic(Point p0, Point c1, Point c2, Point p3, double tol, int depth, std::vector<Point>& out) {
  auto dist_to_chord = [&](Point q) {
    const double dx = p3.x - p0.x, dy = p3.y - p0.y;
    const double len = std::hypot(dx, dy);
    if (len == 0) return distance(q, p0);
    return std::abs((q.x - p0.x) * dy - (q.y - p0.y) * dx) / len;
  };
  if (depth >= 18 || std::max(dist_to_chord(c1), dist_to_chord(c2)) <= tol) {
    out.push_back(p3);
    return;
  }
  auto mid = [](Point a, Point b) { return Point{(a.x + b.x) / 2, (a.y + b.y) / 2}; };
  const Point p01 = mid(p0, c1), p12 = mid(c1, c2), p23 = mid(c2, p3);
  const Point p012 = mid(p01, p12), p123 = mid(p12, p23);
  const Point m = mid(p012, p123);
  flatten_cubic(p0, p01, p012, m, tol, depth + 1, out);
  flatten_cubic(m, p123, p23, p3, tol, depth + 1, out);
}

Path ellipse_path(double cx, double cy, double rx, double ry) {
  const double kx = rx * kKappa, ky = ry * kKappa;
  Subpath sp;
  sp.start = {cx + rx, cy};
  sp.segments = {
      cubic_to({cx + rx, cy + ky}, {cx + kx, cy + ry}, {cx, cy + ry}),
      cubic_to({cx - kx, cy + ry}, {cx - rx, cy + ky}, {cx - rx, cy}),
      cubic_to({cx - rx, cy - ky}, {cx - kx, cy - ry}, {cx, cy - ry}),
      cubic_to({cx + kx, cy - ry}, {cx + rx, cy - ky}, {cx + rx, cy}),
  };
  sp.closed = true;
  return Path{{sp}};
}

Path rect_path(double x, double y, double w, double h, double rx, double ry) {
  Subpath sp;
  if (rx <= 0 && ry <= 0) {
    sp.start = {x, y};
    sp.segments = {line_to({x + w, y}), line_to({x + w, y + h}), line_to({x, y + h})};
  } else {
    if (rx <= 0) rx = ry;
    if (ry <= 0) ry = rx;
    rx = std::min(rx, w / 2);
    ry = std::min(ry, h / 2);
    const double kx = rx * kKappa, ky = ry * kKappa;
    sp.start = {x + rx, y};
    sp.segments = {
        line_to({x + w - rx, y}),
        cubic_to({x + w - rx + kx, y}, {x + w, y + ry - ky}, {x + w, y + ry}),
        line_to({x + w, y + h - ry}),
        cubic_to({x + w, y + h - ry + ky}, {x + w - rx + kx, y + h}, {x + w - rx, y + h}),
        line_to({x + rx, y + h}),
        cubic_to({x + rx - kx, y + h}, {x, y + h - ry + ky}, {x, y + h - ry}),
        line_to({x, y + ry}),
        cubic_to({x, y + ry - ky}, {x + rx - kx, y}, {x + rx, y}),
    };
  }
  sp.closed = true;
  return Path{{sp}};
}

Path points_path(std::string_view points, bool closed) {
  Scanner sc(points);
  std::vector<Point> pts;
  while (!sc.at_end()) {
    const double x = sc.number();
    const double y = sc.number();
    pts.push_back({x, y});
  }
  Path p;
  if (pts.empty()) return p;
  Subpath sp;
  sp.start = pts.front();
  for (std::size_t i = 1; i < pts.size(); ++i) sp.segments.push_back(line_to(pts[i]));
  sp.closed = closed;
  p.subpaths.push_back(std::move(sp));
  return p;
}

std::string local_name(const std::string& tag) {
  const auto colon = tag.find(':');
  return colon == std::string::npos ? tag : tag.substr(colon + 1);
}

std::optional<std::string> attr(const pt::ptree& node, const char* name) {
  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    if (auto v = attrs->get_optional<std::string>(name)) return *v;
  }
  return std::nullopt;
}

double num_attr(const pt::ptree& node, const char* name, double fallback = 0.0) {
  auto v = attr(node, name);
  if (!v || v->empty()) return fallback;
  Scanner sc(*v);
  if (!sc.at_number()) return fallback;
  return sc.number();  // trailing unit suffixes ("px") are ignored
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

void apply_property(Style& style, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (value.empty() || value == "inherit") return;
  if (key == "fill") {
    style.fill = value.rfind("url(", 0) == 0 ? std::string("#888888") : value;
  } else if (key == "stroke") {
    style.stroke = value.rfind("url(", 0) == 0 ? std::string("#888888") : value;
  } else if (key == "stroke-width") {
    Scanner sc(value);
    if (sc.at_number()) style.stroke_width = sc.number();
  } else if (key == "opacity") {
    Scanner sc(value);
    if (sc.at_number()) style.opacity *= sc.number();
  }
}

Style inherit_style(const pt::ptree& node, Style style) {
  for (const char* key : {"fill", "stroke", "stroke-width", "opacity"})
    if (auto v = attr(node, key)) apply_property(style, key, *v);
  if (auto css = attr(node, "style")) {
    std::stringstream ss(*css);
    std::string decl;
    while (std::getline(ss, decl, ';')) {
      const auto colon = decl.find(':');
      if (colon == std::string::npos) continue;
      apply_property(style, trim(decl.substr(0, colon)), decl.substr(colon + 1));
    }
  }
  return style;
}

bool has_active(const pt::ptree& node, const char* name) {
  auto v = attr(node, name);
  return v && !v->empty() && trim(*v) != "none";
}

// Semi-axes of the image of an axis-aligned ellipse under the linear part of
// m: singular values of m * diag(rx, ry).
std::pair<double, double> mapped_radii(const Affine& m, double rx, double ry) {
  const double a = m.a * rx, b = m.b * rx, c = m.c * ry, d = m.d * ry;
  const double s1 = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, s1 * s1 / 4 - det * det));
  const double big = std::sqrt(std::max(0.0, s1 / 2 + disc));
  const double small = std::sqrt(std::max(0.0, s1 / 2 - disc));
  return {big, small};
}

const std::array<std::string_view, 4> kRejected{"image", "filter", "foreignObject", "mask"};
const std::array<std::string_view, 15> kSkipped{
    "defs", "symbol", "clipPath", "pattern", "marker", "linearGradient", "radialGradient", "style",
    "title", "desc", "metadata", "text", "use", "switch", "script"};

void walk(const pt::ptree& node, const std::string& tag, const Affine& parent, const Style& parent_style,
          Document& doc) {
  const std::string name = local_name(tag);
  for (auto r : kRejected)
    if (name == r) throw Error(ErrorCode::UnsupportedFeature, "unsupported SVG element <" + name + ">");
  for (auto s : kSkipped)
    if (name == s) return;
  if (has_active(node, "filter") || has_active(node, "mask"))
    throw Error(ErrorCode::UnsupportedFeature, "filters and masks are not supported");

  Affine m = parent;
  if (auto t = attr(node, "transform")) m = parent * parse_transform(*t);
  Style style = inherit_style(node, parent_style);

  if (name == "svg" || name == "g" || name == "a") {
    for (const auto& [child_tag, child] : node) {
      if (child_tag == "<xmlattr>" || child_tag == "<xmlcomment>" || child_tag == "<xmltext>") continue;
      walk(child, child_tag, m, style, doc);
    }
    return;
  }

  Drawable dr;
  dr.style = style;
  Path local;
  if (name == "path") {
    dr.kind = ShapeKind::Path;
    local = parse_path_data(attr(node, "d").value_or(""));
  } else if (name == "circle") {
    dr.kind = ShapeKind::Circle;
    const double r = num_attr(node, "r");
    local = ellipse_path(num_attr(node, "cx"), num_attr(node, "cy"), r, r);
    dr.radii = mapped_radii(m, r, r);
  } else if (name == "ellipse") {
    dr.kind = ShapeKind::Ellipse;
    const double rx = num_attr(node, "rx"), ry = num_attr(node, "ry");
    local = ellipse_path(num_attr(node, "cx"), num_attr(node, "cy"), rx, ry);
    dr.radii = mapped_radii(m, rx, ry);
  } else if (name == "rect") {
    dr.kind = ShapeKind::Rect;
    local = rect_path(num_attr(node, "x"), num_attr(node, "y"), num_attr(node, "width"),
                      num_attr(node, "height"), num_attr(node, "rx"), num_attr(node, "ry"));
  } else if (name == "line") {
    dr.kind = ShapeKind::Line;
    Subpath sp;
    sp.start = {num_attr(node, "x1"), num_attr(node, "y1")};
    sp.segments.push_back(line_to({num_attr(node, "x2"), num_attr(node, "y2")}));
    local.subpaths.push_back(sp);
  } else if (name == "polyline" || name == "polygon") {
    dr.kind = name == "polyline" ? ShapeKind::Polyline : ShapeKind::Polygon;
    local = points_path(attr(node, "points").value_or(""), name == "polygon");
  } else {
    return;  // unknown non-drawable elements are ignored
  }

  if (auto id = attr(node, "id"); id && !id->empty()) {
    dr.label = *id;
  } else if (auto title = node.get_optional<std::string>("title"); title && !trim(*title).empty()) {
    dr.label = trim(*title);
  } else if (auto cls = attr(node, "class"); cls && !cls->empty()) {
    dr.label = *cls;
  }
  dr.path = local.transformed(m);
  doc.drawables.push_back(std::move(dr));
}

}  // namespace

std::string_view to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Path: return "path";
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Ellipse: return "ellipse";
    case ShapeKind::Rect: return "rect";
    case ShapeKind::Line: return "line";
    case ShapeKind::Polyline: return "polyline";
    case ShapeKind::Polygon: return "polygon";
  }
  return "path";
}

Path Path::transformed(const Affine& m) const {
  Path out = *this;
  for (auto& sp : out.subpaths) {
    sp.start = m.apply(sp.start);
    for (auto& seg : sp.segments) {
      seg.c1 = m.apply(seg.c1);
      seg.c2 = m.apply(seg.c2);
      seg.end = m.apply(seg.end);
    }
  }
  return out;
}

bool Path::empty() const {
  for (const auto& sp : subpaths)
    if (!sp.segments.empty()) return false;
  return true;
}

Path parse_path_data(std::string_view d) {
  Scanner sc(d);
  Path path;
  Subpath* cur = nullptr;
  Point pen{}, start{};
  Point last_ctrl{};
  char prev_cmd = 0;
  char cmd = 0;

  auto begin_subpath = [&](Point p) {
    path.subpaths.push_back(Subpath{p, {}, false});
    cur = &path.subpaths.back();
    start = pen = p;
  };
  auto ensure_subpath = [&] {
    if (!cur) begin_subpath(pen);
  };

  while (!sc.at_end()) {
    if (std::isalpha(static_cast<unsigned char>(sc.peek()))) {
      cmd = sc.take();
    } else if (cmd == 0) {
      throw Error(ErrorCode::ParseError, "path data must start with a command");
    } else if (cmd == 'M') {
      cmd = 'L';  // implicit lineto after moveto
    } else if (cmd == 'm') {
      cmd = 'l';
    } else if (cmd == 'Z' || cmd == 'z') {
      throw Error(ErrorCode::ParseError, "unexpected number after closepath");
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    const Point base = rel ? pen : Point{0, 0};
    auto pt_arg = [&] {
      const double x = sc.number();
      const double y = sc.number();
      return Point{base.x + x, base.y + y};
    };

    switch (std::toupper(static_cast<unsigned char>(cmd))) {
      case 'M': begin_subpath(pt_arg()); break;
      case 'L': {
        ensure_subpath();
        pen = pt_arg();
        cur->segments.push_back(line_to(pen));
        break;
      }
      case 'H': {
        ensure_subpath();
        const double x = sc.number();
        pen = {rel ? pen.x + x : x, pen.y};
        cur->segments.push_back(line_to(pen));
        break;
      }
      case 'V': {
        ensure_subpath();
        const double y = sc.number();
        pen = {pen.x, rel ? pen.y + y : y};
        cur->segments.push_back(line_to(pen));
        break;
      }
      case 'C': {
        ensure_subpath();
        const Point c1 = pt_arg(), c2 = pt_arg(), p = pt_arg();
        cur->segments.push_back(cubic_to(c1, c2, p));
        last_ctrl = c2;
        pen = p;
        break;
      }
      case 'S': {
        ensure_subpath();
        const char pc = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
        const Point c1 = (pc == 'C' || pc == 'S') ? Point{2 * pen.x - last_ctrl.x, 2 * pen.y - last_ctrl.y} : pen;
        const Point c2 = pt_arg(), p = pt_arg();
        cur->segments.push_back(cubic_to(c1, c2, p));
        last_ctrl = c2;
        pen = p;
        break;
      }
      case 'Q':
      case 'T': {
        ensure_subpath();
        Point q;
        if (std::toupper(static_cast<unsigned char>(cmd)) == 'Q') {
          q = pt_arg();
        } else {
          const char pc = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
          q = (pc == 'Q' || pc == 'T') ? Point{2 * pen.x - last_ctrl.x, 2 * pen.y - last_ctrl.y} : pen;
        }
        const Point p = pt_arg();
        const Point c1{pen.x + 2.0 / 3.0 * (q.x - pen.x), pen.y + 2.0 / 3.0 * (q.y - pen.y)};
        const Point c2{p.x + 2.0 / 3.0 * (q.x - p.x), p.y + 2.0 / 3.0 * (q.y - p.y)};
        cur->segments.push_back(cubic_to(c1, c2, p));
        last_ctrl = q;
        pen = p;
        break;
      }
      case 'A': {
        ensure_subpath();
        const double rx = sc.number(), ry = sc.number(), rot = sc.number();
        const bool large = sc.flag(), sweep = sc.flag();
        const Point p = pt_arg();
        arc_to_cubics(pen, rx, ry, rot, large, sweep, p, cur->segments);
        pen = p;
        break;
      }
      case 'Z': {
        if (cur) {
          cur->closed = true;
          cur = nullptr;
        }
        pen = start;
        break;
      }
      default: throw Error(ErrorCode::ParseError, std::string("unknown path command '") + cmd + "'");
    }
    prev_cmd = cmd;
  }
  return path;
}

Affine parse_transform(std::string_view text) {
  Affine m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ',')) ++pos;
    if (pos >= text.size()) break;
    const auto open = text.find('(', pos);
    const auto close = text.find(')', pos);
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      throw Error(ErrorCode::ParseError, "malformed transform '" + std::string(text) + "'");
    const std::string name = trim(text.substr(pos, open - pos));
    Scanner sc(text.substr(open + 1, close - open - 1));
    std::vector<double> args;
    while (!sc.at_end()) args.push_back(sc.number());
    auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };

    Affine t;
    if (name == "matrix" && args.size() == 6) {
      t = {args[0], args[1], args[2], args[3], args[4], args[5]};
    } else if (name == "translate" && !args.empty()) {
      t = Affine::translate(args[0], arg(1, 0));
    } else if (name == "scale" && !args.empty()) {
      t = Affine::scale(args[0], arg(1, args[0]));
    } else if (name == "rotate" && !args.empty()) {
      t = Affine::rotate_deg(args[0], arg(1, 0), arg(2, 0));
    } else if (name == "skewX" && args.size() == 1) {
      t = {1, 0, std::tan(args[0] * std::numbers::pi / 180), 1, 0, 0};
    } else if (name == "skewY" && args.size() == 1) {
      t = {1, std::tan(args[0] * std::numbers::pi / 180), 0, 1, 0, 0};
    } else {
      throw Error(ErrorCode::ParseError, "unsupported transform '" + name + "'");
    }
    m = m * t;
    pos = close + 1;
  }
  return m;
}

std::vector<Polyline> flatten(const Path& path, double tolerance) {
  std::vector<Polyline> out;
  for (const auto& sp : path.subpaths) {
    Polyline pl;
    pl.points.push_back(sp.start);
    Point pen = sp.start;
    for (const auto& seg : sp.segments) {
      if (seg.kind == Segment::Kind::Line) {
        pl.points.push_back(seg.end);
      } else {
        flatten_cubic(pen, seg.c1, seg.c2, seg.end, tolerance, 0, pl.points);
      }
      pen = seg.end;
    }
    if (sp.closed && pl.points.size() > 1 && pl.points.back() == pl.points.front()) pl.points.pop_back();
    pl.closed = sp.closed;
    out.push_back(std::move(pl));
  }
  return out;
}

std::string fmt_num(double v, int precision) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -precision)) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
  std::string s(buf.data(), ptr);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  return s;
}

std::string to_path_data(const Path& path, int precision) {
  std::string out;
  auto put = [&](Point p) {
    out += fmt_num(p.x, precision);
    out += ' ';
    out += fmt_num(p.y, precision);
  };
  for (const auto& sp : path.subpaths) {
    if (!out.empty()) out += ' ';
    out += "M";
    put(sp.start);
    for (const auto& seg : sp.segments) {
      if (seg.kind == Segment::Kind::Line) {
        out += " L";
        put(seg.end);
      } else {
        out += " C";
        put(seg.c1);
        out += ' ';
        put(seg.c2);
        out += ' ';
        put(seg.end);
      }
    }
    if (sp.closed) out += " Z";
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

Rect Document::canvas(double tolerance) const {
  if (view_box && !view_box->empty() && view_box->area() > 0) return *view_box;
  if (width > 0 && height > 0) return Rect::from_xywh(0, 0, width, height);
  Rect r;
  for (const auto& d : drawables) r.expand(bounds(flatten(d.path, tolerance)));
  return r;
}

Document parse(std::string_view bytes) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(bytes)};
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed SVG: ") + e.what());
  }
  const pt::ptree* root = nullptr;
  std::string root_tag;
  for (const auto& [tag, child] : tree) {
    if (local_name(tag) == "svg") {
      root = &child;
      root_tag = tag;
      break;
    }
  }
  if (!root) throw Error(ErrorCode::ParseError, "document has no <svg> root");

  Document doc;
  if (auto vb = attr(*root, "viewBox")) {
    Scanner sc(*vb);
    std::array<double, 4> v{};
    for (auto& x : v) x = sc.number();
    doc.view_box = Rect::from_xywh(v[0], v[1], v[2], v[3]);
  }
  doc.width = num_attr(*root, "width");
  doc.height = num_attr(*root, "height");
  walk(*root, root_tag, Affine{}, Style{}, doc);
  if (doc.drawables.empty()) throw Error(ErrorCode::ParseError, "SVG contains no drawable elements");
  return doc;
}

}  // namespace metaglyph::svg
