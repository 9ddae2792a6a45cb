#include "metaglyph/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "metaglyph/error.hpp"
#include "metaglyph/svg.hpp"

namespace metaglyph {

using svg::fmt_num;
using svg::xml_escape;

std::string_view to_string(ChartKind k) {
  switch (k) {
    case ChartKind::Pie: return "pie";
    case ChartKind::Donut: return "donut";
    case ChartKind::Star: return "star";
    case ChartKind::Heatmap: return "heatmap";
  }
  return "star";
}

std::optional<ChartKind> chart_from_string(std::string_view s) {
  for (auto k : {ChartKind::Pie, ChartKind::Donut, ChartKind::Star, ChartKind::Heatmap})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string_view to_string(ReinstateAction a) {
  switch (a) {
    case ReinstateAction::ScaleWithPartner: return "scale_with_partner";
    case ReinstateAction::Delete: return "delete";
    case ReinstateAction::KeepOriginal: return "keep_original";
  }
  return "keep_original";
}

std::string_view to_string(PlacementKind k) {
  switch (k) {
    case PlacementKind::Cartesian: return "cartesian";
    case PlacementKind::HorizontalAxis: return "horizontal_axis";
    case PlacementKind::Timeline: return "timeline";
    case PlacementKind::Map: return "map";
    case PlacementKind::Ordered: return "ordered";
  }
  return "ordered";
}

const std::vector<std::string>& categorical_palette() {
  static const std::vector<std::string> p{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                          "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  return p;
}

const std::vector<std::string>& sequential_ramp() {
  static const std::vector<std::string> r{"#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6",
                                          "#4292c6", "#2171b5", "#08519c", "#08306b"};
  return r;
}

double Scale::map(double v) const {
  double t;
  if (!categories.empty()) {
    t = categories.size() > 1 ? v / static_cast<double>(categories.size() - 1) : 0.0;
  } else if (domain_max > domain_min) {
    t = (v - domain_min) / (domain_max - domain_min);
  } else {
    t = 1.0;
  }
  return range_min + t * (range_max - range_min);
}

namespace {

std::vector<std::string> sorted_categories(const DataDimension& dim) {
  std::set<std::string> s(dim.raw.begin(), dim.raw.end());
  return {s.begin(), s.end()};
}

Scale make_scale(const DataDimension& dim, Channel channel, const RenderConfig& cfg) {
  Scale s;
  if (uses_numerical_channels(dim.type)) {
    auto [lo, hi] = dim.range();
    s.domain_min = lo;
    s.domain_max = hi;
  }
  switch (channel) {
    case Channel::SizeArea:
    case Channel::SizeLength:
    case Channel::SizeHeight:
      s.range_min = cfg.size_floor;
      s.range_max = 1.0;
      s.units = channel == Channel::SizeArea ? "area fraction"
                                             : (channel == Channel::SizeLength ? "length fraction" : "height fraction");
      break;
    case Channel::ColorLightness:
      s.range_min = 0;
      s.range_max = 1;
      s.units = "lightness";
      break;
    case Channel::Angle:
      s.range_min = 0;
      s.range_max = cfg.angle_max_deg;
      s.units = "deg";
      break;
    case Channel::ColorHue:
    case Channel::Rotation:
    case Channel::PositionOffset: {
      s.categories = sorted_categories(dim);
      const double k = static_cast<double>(s.categories.size());
      s.domain_min = 0;
      s.domain_max = std::max(0.0, k - 1);
      if (channel == Channel::ColorHue) {
        s.range_min = 0;
        s.range_max = s.domain_max;
        s.units = "palette index";
      } else if (channel == Channel::Rotation) {
        const double step = k > 0 ? std::min(45.0, 360.0 / k) : 0.0;
        s.range_min = 0;
        s.range_max = step * s.domain_max;
        s.units = "deg";
      } else {
        s.range_min = -0.25;
        s.range_max = 0.25;
        s.units = "element width";
      }
      break;
    }
  }
  return s;
}

double group_extreme(const DataGroup& g, const Dataset& ds, bool max) {
  double v = max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (std::size_t m : g.members)
    for (double x : ds.dimension(m).numeric) v = max ? std::max(v, x) : std::min(v, x);
  return std::isfinite(v) ? v : 0.0;
}

}  // namespace

double channel_value(const DataDimension& dim, std::size_t row, const Scale& scale) {
  if (!scale.categories.empty()) {
    auto it = std::lower_bound(scale.categories.begin(), scale.categories.end(), dim.raw.at(row));
    return static_cast<double>(it - scale.categories.begin());
  }
  return dim.numeric.empty() ? 0.0 : dim.numeric.at(row);
}

std::vector<ChartKind> chart_options(const DataGroup& group, const Dataset& ds, const RenderConfig& config) {
  const bool proportional = std::all_of(group.members.begin(), group.members.end(),
                                        [&](std::size_t m) { return ds.dimension(m).non_negative(); });
  std::vector<ChartKind> out;
  if (proportional)
    for (auto k : config.proportional_priority)
      if (k != ChartKind::Star && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  out.push_back(ChartKind::Star);
  return out;
}

ChannelPlan assign_channels(const MappingSolution& solution, const MappingSpace& space, const Dataset& ds,
                            const ElementList& list, const RenderConfig& config,
                            const std::map<std::size_t, ChartKind>& chart_overrides) {
  if (solution.pairs.size() != space.depths.size()) throw Error(ErrorCode::Internal, "incomplete solution");
  std::map<std::size_t, std::vector<std::size_t>> hosted;
  for (std::size_t i = 0; i < solution.pairs.size(); ++i)
    if (solution.pairs[i].is_element()) hosted[solution.pairs[i].index].push_back(i);

  auto product = [&](std::size_t depth) {
    return depth < solution.reward.products.size() ? solution.reward.products[depth] : 0.0;
  };

  ChannelPlan plan;
  for (const auto& [j, depths] : hosted) {
    const Element& el = list.element(j);
    std::optional<std::size_t> group_depth;
    for (std::size_t d : depths)
      if (space.depths[d].is_group()) group_depth = d;

    if (group_depth) {
      if (depths.size() > 1)
        throw Error(ErrorCode::ChannelExhausted, "an element hosting a group cannot encode other data",
                    "e" + std::to_string(j));
      const std::size_t gi = space.depths[*group_depth].entry.index;
      const DataGroup& g = ds.groups().at(gi);
      if (el.augmentable) {
        auto options = chart_options(g, ds, config);
        ChartKind kind = options.front();
        if (auto it = chart_overrides.find(gi); it != chart_overrides.end()) {
          if (std::find(options.begin(), options.end(), it->second) == options.end())
            throw Error(ErrorCode::InvalidRequest, "chart kind not valid for this group", std::string(to_string(it->second)));
          kind = it->second;
        }
        plan.charts.push_back({j, kind, gi, g.members, group_extreme(g, ds, false), group_extreme(g, ds, true)});
      } else {
        GroupReplication rep{j, gi, g.members, {}, {}};
        const double k = static_cast<double>(g.members.size());
        const Channel size = primary_size_channel(list.structure);
        Scale scale;
        scale.domain_min = group_extreme(g, ds, false);
        scale.domain_max = group_extreme(g, ds, true);
        scale.range_min = config.size_floor;
        scale.range_max = 1.0;
        scale.units = make_scale(ds.dimension(g.members.front()), size, config).units;
        for (std::size_t i = 0; i < g.members.size(); ++i) {
          rep.rotation_deg.push_back(360.0 * static_cast<double>(i) / k);
          rep.colors.push_back(categorical_palette()[i % categorical_palette().size()]);
          plan.assignments.push_back({g.members[i], j, size, scale, i});
        }
        plan.replications.push_back(std::move(rep));
      }
      continue;
    }

    std::vector<ChannelRequest> requests;
    for (std::size_t d : depths) requests.push_back({space.depths[d].type, product(d)});
    auto channels = allocate_channels(config.channels, list.structure, requests);
    if (!channels)
      throw Error(ErrorCode::ChannelExhausted, "more dimensions than free channels on one element",
                  "e" + std::to_string(j));
    for (std::size_t i = 0; i < depths.size(); ++i) {
      const std::size_t dim = space.depths[depths[i]].entry.index;
      plan.assignments.push_back({dim, j, (*channels)[i], make_scale(ds.dimension(dim), (*channels)[i], config), {}});
    }
  }
  return plan;
}

std::vector<Reinstatement> reinstate_removed(const ElementList& list, const ChannelPlan& plan) {
  std::vector<Reinstatement> out;
  const auto essential = list.essential();
  for (std::size_t r : list.removed()) {
    Reinstatement rs{r, std::nullopt, ReinstateAction::KeepOriginal};
    double best = 0;
    for (std::size_t p : essential) {
      double a = intersection_area(list.element(r).bbox, list.element(p).bbox);
      if (a > best) {
        best = a;
        rs.partner = p;
      }
    }
    if (rs.partner) {
      const std::size_t p = *rs.partner;
      const bool transformed =
          std::any_of(plan.charts.begin(), plan.charts.end(), [&](const auto& c) { return c.element == p; }) ||
          std::any_of(plan.replications.begin(), plan.replications.end(),
                      [&](const auto& g) { return g.element == p; });
      bool encodes = false, sized = false;
      for (const auto& a : plan.assignments) {
        if (a.element != p) continue;
        encodes = true;
        if (is_size_channel(a.channel)) sized = true;
      }
      if (transformed || !encodes) rs.action = ReinstateAction::Delete;
      else if (sized) rs.action = ReinstateAction::ScaleWithPartner;
    }
    out.push_back(rs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Placement

namespace {

double linear_pos(double v, double lo, double hi, double extent) {
  const double pad = kPlacementPadding * extent;
  const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  return pad + t * (extent - 2 * pad);
}

std::vector<double> positional_values(const DataDimension& dim) {
  if (dim.has_numeric()) return dim.numeric;
  auto cats = sorted_categories(dim);
  std::vector<double> v;
  for (const auto& s : dim.raw)
    v.push_back(static_cast<double>(std::lower_bound(cats.begin(), cats.end(), s) - cats.begin()));
  return v;
}

void grid(Placement& p, const std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  if (n == 0) return;
  const std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const std::size_t rows = (n + cols - 1) / cols;
  const double cw = p.width / static_cast<double>(cols), ch = p.height / static_cast<double>(rows);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = k / cols, c = k % cols;
    p.centers[order[k]] = {(static_cast<double>(c) + 0.5) * cw, (static_cast<double>(r) + 0.5) * ch};
  }
}

}  // namespace

Placement place_glyphs(const AxisBinding& axes, const Dataset& ds, double width, double height,
                       const RegionTable& regions) {
  if (!(width > 0) || !(height > 0)) throw Error(ErrorCode::InvalidRequest, "canvas must be positive");
  Placement p;
  p.width = width;
  p.height = height;
  p.axes = axes;
  const std::size_t n = ds.rows();
  p.centers.assign(n, Point{width / 2, height / 2});
  p.located.assign(n, true);
  const double per_side = std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1))));
  p.base_size = std::clamp(std::min(width, height) / per_side * 0.8, 24.0, 160.0);

  std::optional<std::size_t> xd = axes.x, yd = axes.y;
  if (!xd && yd) std::swap(xd, yd);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  if (!xd) {
    p.kind = PlacementKind::Ordered;
    grid(p, order);
    return p;
  }
  const DataDimension& x = ds.dimension(*xd);

  if (x.type == DataType::Geospatial) {
    p.kind = PlacementKind::Map;
    const double map_h = height * 0.9;
    std::vector<std::size_t> unlocated;
    std::set<std::string> unknown;
    for (std::size_t i = 0; i < n; ++i) {
      const Region* r = regions.find(x.raw[i]);
      if (!r) {
        p.located[i] = false;
        unlocated.push_back(i);
        unknown.insert(x.raw[i]);
        continue;
      }
      p.centers[i] = {linear_pos(r->lon, -180, 180, width), map_h - linear_pos(r->lat, -90, 90, map_h)};
    }
    for (std::size_t k = 0; k < unlocated.size(); ++k) {
      const double pad = kPlacementPadding * width;
      const double step = (width - 2 * pad) / static_cast<double>(unlocated.size());
      p.centers[unlocated[k]] = {pad + (static_cast<double>(k) + 0.5) * step, height * 0.95};
    }
    for (const auto& u : unknown) p.warnings.push_back("UnknownRegion: " + u);
    return p;
  }

  if (!yd && x.type == DataType::Categorical) {
    p.kind = PlacementKind::Ordered;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x.raw[a] < x.raw[b]; });
    grid(p, order);
    return p;
  }

  const auto xv = positional_values(x);
  const auto [xlo, xhi] = std::minmax_element(xv.begin(), xv.end());
  std::vector<double> yv;
  double ylo = 0, yhi = 0;
  if (yd) {
    yv = positional_values(ds.dimension(*yd));
    auto [a, b] = std::minmax_element(yv.begin(), yv.end());
    ylo = *a;
    yhi = *b;
  }
  if (x.type == DataType::Temporal) p.kind = PlacementKind::Timeline;
  else p.kind = yd ? PlacementKind::Cartesian : PlacementKind::HorizontalAxis;

  for (std::size_t i = 0; i < n; ++i) {
    const double cx = linear_pos(xv[i], *xlo, *xhi, width);
    const double cy = yd ? height - linear_pos(yv[i], ylo, yhi, height) : height / 2;
    p.centers[i] = {cx, cy};
  }
  return p;
}

std::vector<Rect> glyph_boxes(const Placement& placement, const ElementList& list) {
  const Rect& wb = list.whole_image.bbox;
  const double extent = std::max(wb.width(), wb.height());
  const double s = extent > 0 ? placement.base_size / extent : 1.0;
  std::vector<Rect> out;
  out.reserve(placement.centers.size());
  for (const Point& c : placement.centers) out.push_back(Rect::centered(c, wb.width() * s, wb.height() * s));
  return out;
}

OverlapProbe make_overlap_probe(const Dataset& ds, const ElementList& list, double width, double height,
                                const RegionTable& regions) {
  return [&ds, &list, width, height, &regions](const AxisBinding& axes) {
    auto placement = place_glyphs(axes, ds, width, height, regions);
    auto boxes = glyph_boxes(placement, list);
    return overlap_score(boxes).p_overlap;
  };
}

GlyphScene build_scene(const MappingSolution& solution, const MappingSpace& space, const Dataset& ds,
                       const ElementList& list, const RenderConfig& config,
                       const std::map<std::size_t, ChartKind>& chart_overrides, const RegionTable& regions) {
  GlyphScene scene;
  scene.topic = ds.topic();
  scene.source_id = list.source_id;
  scene.config = config;
  scene.reward = solution.reward;
  AxisBinding axes;
  for (std::size_t i = 0; i < solution.pairs.size(); ++i) {
    const auto& depth = space.depths.at(i);
    const double prod = i < solution.reward.products.size() ? solution.reward.products[i] : 0.0;
    scene.pairs.push_back({depth.entry, depth.name, solution.pairs[i], prod});
    if (solution.pairs[i].is_axis()) (solution.pairs[i].index == 1 ? axes.x : axes.y) = depth.entry.index;
  }
  scene.plan = assign_channels(solution, space, ds, list, config, chart_overrides);
  scene.reinstatements = reinstate_removed(list, scene.plan);
  scene.placement = place_glyphs(axes, ds, config.canvas_width, config.canvas_height, regions);
  return scene;
}

// ---------------------------------------------------------------------------
// SVG emission

namespace {

std::string matrix_attr(const Affine& m) {
  return "matrix(" + fmt_num(m.a, 6) + " " + fmt_num(m.b, 6) + " " + fmt_num(m.c, 6) + " " + fmt_num(m.d, 6) + " " +
         fmt_num(m.e, 4) + " " + fmt_num(m.f, 4) + ")";
}

Rgb mix(Rgb a, Rgb b, double t) {
  auto lerp = [t](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (y - x) * t));
  };
  return {lerp(a.r, b.r), lerp(a.g, b.g), lerp(a.b, b.b)};
}

/// Visual state of one element in one row.
struct ElementLook {
  Affine transform{};
  std::optional<std::string> color;
};

std::string civil_date(double days) {
  long z = static_cast<long>(std::floor(days)) + 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const long doe = z - era * 146097;
  const long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long y = yoe + era * 400;
  const long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const long mp = (5 * doy + 2) / 153;
  const long d = doy - (153 * mp + 2) / 5 + 1;
  const long m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04ld-%02ld-%02ld", y % 100000, m % 100, d % 100);
  return buf;
}

class SceneWriter {
 public:
  SceneWriter(const GlyphScene& scene, const ElementList& list, const Dataset& ds)
      : scene_(scene), list_(list), ds_(ds) {}

  ElementLook look(std::size_t element, std::size_t row) const {
    const Element& el = list_.element(element);
    const Point c = el.bbox.center();
    double sx = 1, sy = 1, rot = 0, dx = 0;
    std::optional<Rgb> hue;
    std::optional<double> lightness;
    for (const auto& a : scene_.plan.assignments) {
      if (a.element != element || a.replica) continue;
      const double v = a.scale.map(channel_value(ds_.dimension(a.dimension), row, a.scale));
      switch (a.channel) {
        case Channel::SizeArea:
          sx *= std::sqrt(v);
          sy *= std::sqrt(v);
          break;
        case Channel::SizeLength: sx *= v; break;
        case Channel::SizeHeight: sy *= v; break;
        case Channel::Angle:
        case Channel::Rotation: rot += v; break;
        case Channel::PositionOffset: dx += v * el.bbox.width(); break;
        case Channel::ColorHue: {
          const auto& pal = categorical_palette();
          hue = parse_color(pal[static_cast<std::size_t>(std::lround(v)) % pal.size()]);
          break;
        }
        case Channel::ColorLightness: lightness = v; break;
      }
    }
    ElementLook out;
    out.transform = Affine::translate(dx, 0) * Affine::rotate_deg(rot, c.x, c.y) * Affine::translate(c.x, c.y) *
                    Affine::scale(sx, sy) * Affine::translate(-c.x, -c.y);
    if (hue && lightness) out.color = to_hex(mix(*hue, Rgb{255, 255, 255}, 0.8 * (1 - *lightness)));
    else if (hue) out.color = to_hex(*hue);
    else if (lightness) {
      const auto& ramp = sequential_ramp();
      out.color = ramp[static_cast<std::size_t>(std::lround(std::clamp(*lightness, 0.0, 1.0) * (ramp.size() - 1)))];
    }
    return out;
  }

  /// Size-only part of an element's look, used to scale reinstated details.
  Affine size_transform(std::size_t element, std::size_t row) const {
    const Element& el = list_.element(element);
    const Point c = el.bbox.center();
    double sx = 1, sy = 1;
    for (const auto& a : scene_.plan.assignments) {
      if (a.element != element || a.replica || !is_size_channel(a.channel)) continue;
      const double v = a.scale.map(channel_value(ds_.dimension(a.dimension), row, a.scale));
      if (a.channel == Channel::SizeArea) {
        sx *= std::sqrt(v);
        sy *= std::sqrt(v);
      } else if (a.channel == Channel::SizeLength) {
        sx *= v;
      } else {
        sy *= v;
      }
    }
    return Affine::translate(c.x, c.y) * Affine::scale(sx, sy) * Affine::translate(-c.x, -c.y);
  }

  void path(std::ostream& os, const Element& el, const Affine& m, const std::optional<std::string>& color,
            const std::string& extra = "") const {
    std::string fill = el.style.fill, stroke = el.style.stroke;
    if (color) {
      if (fill != "none") fill = *color;
      else stroke = *color;
    }
    os << "<path d=\"" << svg::to_path_data(el.path, 3) << "\" fill=\"" << xml_escape(fill) << "\" stroke=\""
       << xml_escape(stroke) << "\"";
    if (stroke != "none") os << " stroke-width=\"" << fmt_num(el.style.stroke_width) << "\"";
    if (el.style.opacity < 1) os << " opacity=\"" << fmt_num(el.style.opacity) << "\"";
    if (!(m == Affine{})) os << " transform=\"" << matrix_attr(m) << "\"";
    os << " data-element=\"" << el.index << "\"" << extra << "/>";
  }

  void chart(std::ostream& os, const ChartAugmentation& ch, std::size_t row) const {
    const Element& el = list_.element(ch.element);
    const Point c = el.bbox.center();
    const double r = std::min(el.bbox.width(), el.bbox.height()) / 2;
    std::vector<double> values;
    for (std::size_t m : ch.series) values.push_back(ds_.dimension(m).numeric.at(row));
    const auto& pal = categorical_palette();
    os << "<g class=\"chart\" data-chart=\"" << to_string(ch.chart) << "\" data-element=\"" << ch.element << "\">";
    switch (ch.chart) {
      case ChartKind::Pie:
      case ChartKind::Donut: {
        const double inner = ch.chart == ChartKind::Donut ? r * scene_.config.donut_inner : 0.0;
        auto sweeps = pie_sweeps(values);
        if (sweeps.empty()) {
          os << "<circle cx=\"" << fmt_num(c.x) << "\" cy=\"" << fmt_num(c.y) << "\" r=\"" << fmt_num(r)
             << "\" fill=\"none\" stroke=\"#999999\" class=\"empty-chart\"/>";
          os << "<path d=\"M" << fmt_num(c.x - r * 0.7) << " " << fmt_num(c.y - r * 0.7) << "L" << fmt_num(c.x + r * 0.7)
             << " " << fmt_num(c.y + r * 0.7) << "M" << fmt_num(c.x + r * 0.7) << " " << fmt_num(c.y - r * 0.7) << "L"
             << fmt_num(c.x - r * 0.7) << " " << fmt_num(c.y + r * 0.7)
             << "\" fill=\"none\" stroke=\"#999999\" class=\"hatch\"/>";
          break;
        }
        double start = -90;
        for (std::size_t i = 0; i < sweeps.size(); ++i) {
          os << "<path d=\"" << sector_path(c, r, inner, start, sweeps[i]) << "\" fill=\"" << pal[i % pal.size()]
             << "\" stroke=\"#ffffff\" stroke-width=\"0.5\" data-sweep=\"" << fmt_num(sweeps[i], 9) << "\"/>";
          start += sweeps[i];
        }
        break;
      }
      case ChartKind::Star: {
        const std::size_t k = values.size();
        os << "<polygon points=\"";
        for (std::size_t i = 0; i < k; ++i) {
          const double t = ch.value_max > ch.value_min ? (values[i] - ch.value_min) / (ch.value_max - ch.value_min) : 1.0;
          const double rad = r * (0.15 + 0.85 * std::clamp(t, 0.0, 1.0));
          const double ang = (-90.0 + 360.0 * static_cast<double>(i) / static_cast<double>(k)) * std::numbers::pi / 180;
          if (i) os << ' ';
          os << fmt_num(c.x + rad * std::cos(ang)) << ',' << fmt_num(c.y + rad * std::sin(ang));
        }
        os << "\" fill=\"" << pal[0] << "\" fill-opacity=\"0.7\" stroke=\"" << pal[0] << "\"/>";
        break;
      }
      case ChartKind::Heatmap: {
        const std::string clip = "clip-r" + std::to_string(row) + "-e" + std::to_string(ch.element);
        os << "<defs><clipPath id=\"" << clip << "\"><path d=\"" << svg::to_path_data(el.path, 3)
           << "\"/></clipPath></defs><g clip-path=\"url(#" << clip << ")\">";
        const auto& ramp = sequential_ramp();
        const double w = el.bbox.width() / static_cast<double>(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
          const double t = ch.value_max > ch.value_min ? (values[i] - ch.value_min) / (ch.value_max - ch.value_min) : 1.0;
          const std::size_t step = static_cast<std::size_t>(std::lround(std::clamp(t, 0.0, 1.0) * (ramp.size() - 1)));
          os << "<rect x=\"" << fmt_num(el.bbox.min_x + w * static_cast<double>(i)) << "\" y=\""
             << fmt_num(el.bbox.min_y) << "\" width=\"" << fmt_num(w) << "\" height=\"" << fmt_num(el.bbox.height())
             << "\" fill=\"" << ramp[step] << "\"/>";
        }
        os << "</g>";
        break;
      }
    }
    os << "</g>";
  }

  static std::string sector_path(Point c, double r, double inner, double start_deg, double sweep_deg) {
    auto at = [&](double radius, double deg) {
      const double a = deg * std::numbers::pi / 180;
      return Point{c.x + radius * std::cos(a), c.y + radius * std::sin(a)};
    };
    std::ostringstream os;
    auto pt = [&](Point p) { os << fmt_num(p.x) << " " << fmt_num(p.y); };
    if (sweep_deg >= 360 - 1e-9) {
      // Full ring: two half arcs.
      os << "M";
      pt(at(r, start_deg));
      os << "A" << fmt_num(r) << " " << fmt_num(r) << " 0 1 1 ";
      pt(at(r, start_deg + 180));
      os << "A" << fmt_num(r) << " " << fmt_num(r) << " 0 1 1 ";
      pt(at(r, start_deg + 360));
      os << "Z";
      if (inner > 0) {
        os << "M";
        pt(at(inner, start_deg));
        os << "A" << fmt_num(inner) << " " << fmt_num(inner) << " 0 1 0 ";
        pt(at(inner, start_deg + 180));
        os << "A" << fmt_num(inner) << " " << fmt_num(inner) << " 0 1 0 ";
        pt(at(inner, start_deg + 360));
        os << "Z";
      }
      return os.str();
    }
    const int large = sweep_deg > 180 ? 1 : 0;
    if (inner > 0) {
      os << "M";
      pt(at(r, start_deg));
      os << "A" << fmt_num(r) << " " << fmt_num(r) << " 0 " << large << " 1 ";
      pt(at(r, start_deg + sweep_deg));
      os << "L";
      pt(at(inner, start_deg + sweep_deg));
      os << "A" << fmt_num(inner) << " " << fmt_num(inner) << " 0 " << large << " 0 ";
      pt(at(inner, start_deg));
      os << "Z";
    } else {
      os << "M";
      pt(c);
      os << "L";
      pt(at(r, start_deg));
      os << "A" << fmt_num(r) << " " << fmt_num(r) << " 0 " << large << " 1 ";
      pt(at(r, start_deg + sweep_deg));
      os << "Z";
    }
    return os.str();
  }

  void glyph(std::ostream& os, std::size_t row) const {
    const Rect& wb = list_.whole_image.bbox;
    const double extent = std::max(wb.width(), wb.height());
    const double s = extent > 0 ? scene_.placement.base_size / extent : 1.0;
    const Point at = scene_.placement.centers[row];
    const Point c0 = wb.center();
    const Affine place = Affine::translate(at.x, at.y) * Affine::scale(s, s) * Affine::translate(-c0.x, -c0.y);
    os << "<g class=\"glyph\" data-row=\"" << row << "\" transform=\"" << matrix_attr(place) << "\">";

    const ElementLook whole = look(0, row);
    const bool whole_replicated = replication_on(0) != nullptr;
    if (!(whole.transform == Affine{})) os << "<g transform=\"" << matrix_attr(whole.transform) << "\">";
    if (whole_replicated) {
      const GroupReplication& rep = *replication_on(0);
      for (std::size_t i = 0; i < rep.members.size(); ++i) {
        const Affine m = Affine::rotate_deg(rep.rotation_deg[i], c0.x, c0.y) * replica_size(0, i, row);
        os << "<g class=\"replica\" data-member=\"" << rep.members[i] << "\" transform=\"" << matrix_attr(m) << "\">";
        elements(os, row, rep.colors[i]);
        os << "</g>";
      }
    } else {
      elements(os, row, whole.color);
    }
    if (!(whole.transform == Affine{})) os << "</g>";
    os << "</g>";
  }

  void elements(std::ostream& os, std::size_t row, const std::optional<std::string>& inherited) const {
    for (const Element& el : list_.elements) {
      if (el.removed) {
        const Reinstatement* rs = reinstatement(el.index);
        if (rs && rs->action == ReinstateAction::Delete) continue;
        Affine m{};
        if (rs && rs->action == ReinstateAction::ScaleWithPartner) m = size_transform(*rs->partner, row);
        path(os, el, m, inherited, " data-reinstated=\"" + std::string(rs ? to_string(rs->action) : "keep_original") + "\"");
        continue;
      }
      if (const ChartAugmentation* ch = chart_on(el.index)) {
        chart(os, *ch, row);
        continue;
      }
      if (const GroupReplication* rep = replication_on(el.index)) {
        const Point c0 = list_.whole_image.bbox.center();
        for (std::size_t i = 0; i < rep->members.size(); ++i) {
          const Affine m = Affine::rotate_deg(rep->rotation_deg[i], c0.x, c0.y) * replica_size(el.index, i, row);
          path(os, el, m, rep->colors[i], " data-member=\"" + std::to_string(rep->members[i]) + "\"");
        }
        continue;
      }
      ElementLook lk = look(el.index, row);
      path(os, el, lk.transform, lk.color ? lk.color : inherited);
    }
  }

  Affine replica_size(std::size_t element, std::size_t replica, std::size_t row) const {
    const Element& el = list_.element(element);
    const Point c = el.bbox.center();
    for (const auto& a : scene_.plan.assignments) {
      if (a.element != element || a.replica != replica) continue;
      const double v = a.scale.map(channel_value(ds_.dimension(a.dimension), row, a.scale));
      double sx = 1, sy = 1;
      if (a.channel == Channel::SizeArea) sx = sy = std::sqrt(v);
      else if (a.channel == Channel::SizeLength) sx = v;
      else sy = v;
      return Affine::translate(c.x, c.y) * Affine::scale(sx, sy) * Affine::translate(-c.x, -c.y);
    }
    return {};
  }

  const ChartAugmentation* chart_on(std::size_t j) const {
    for (const auto& c : scene_.plan.charts)
      if (c.element == j) return &c;
    return nullptr;
  }
  const GroupReplication* replication_on(std::size_t j) const {
    for (const auto& r : scene_.plan.replications)
      if (r.element == j) return &r;
    return nullptr;
  }
  const Reinstatement* reinstatement(std::size_t j) const {
    for (const auto& r : scene_.reinstatements)
      if (r.element == j) return &r;
    return nullptr;
  }

  std::string axis_label(std::size_t dim, double v) const {
    const auto& d = ds_.dimension(dim);
    if (d.type == DataType::Temporal) return civil_date(v);
    if (!d.has_numeric()) {
      auto cats = sorted_categories(d);
      const auto i = static_cast<std::size_t>(std::lround(v));
      return i < cats.size() ? cats[i] : "";
    }
    return fmt_num(v, 2);
  }

  void backdrop(std::ostream& os) const {
    const Placement& p = scene_.placement;
    const double W = p.width, H = p.height;
    os << "<g class=\"backdrop\">";
    if (p.kind == PlacementKind::Map) {
      const double map_h = H * 0.9;
      for (const auto& poly : base_map_outlines()) {
        os << "<polygon points=\"";
        for (std::size_t i = 0; i < poly.size(); ++i) {
          if (i) os << ' ';
          os << fmt_num(linear_pos(poly[i].x, -180, 180, W)) << ','
             << fmt_num(map_h - linear_pos(poly[i].y, -90, 90, map_h));
        }
        os << "\" fill=\"#f0f0f0\" stroke=\"#cccccc\"/>";
      }
      if (std::find(p.located.begin(), p.located.end(), false) != p.located.end())
        os << "<text x=\"" << fmt_num(W * kPlacementPadding) << "\" y=\"" << fmt_num(H * 0.91)
           << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"#666666\">unlocated</text>";
    } else if (p.kind != PlacementKind::Ordered) {
      std::optional<std::size_t> xd = p.axes.x, yd = p.axes.y;
      if (!xd && yd) std::swap(xd, yd);
      const double pad = W * kPlacementPadding;
      const double base_y = yd ? H - H * kPlacementPadding * 0.5 : H / 2;
      os << "<line x1=\"" << fmt_num(pad) << "\" y1=\"" << fmt_num(base_y) << "\" x2=\"" << fmt_num(W - pad)
         << "\" y2=\"" << fmt_num(base_y) << "\" stroke=\"#999999\" class=\"axis-x\"/>";
      auto xv = positional_values(ds_.dimension(*xd));
      auto [lo, hi] = std::minmax_element(xv.begin(), xv.end());
      os << "<text x=\"" << fmt_num(pad) << "\" y=\"" << fmt_num(base_y + 14)
         << "\" font-size=\"11\" font-family=\"sans-serif\">" << xml_escape(axis_label(*xd, *lo)) << "</text>";
      os << "<text x=\"" << fmt_num(W - pad) << "\" y=\"" << fmt_num(base_y + 14)
         << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">" << xml_escape(axis_label(*xd, *hi))
         << "</text>";
      os << "<text x=\"" << fmt_num(W / 2) << "\" y=\"" << fmt_num(base_y + 14)
         << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">"
         << xml_escape(ds_.dimension(*xd).name) << "</text>";
      if (yd) {
        const double px = W * kPlacementPadding * 0.5, ypad = H * kPlacementPadding;
        os << "<line x1=\"" << fmt_num(px) << "\" y1=\"" << fmt_num(ypad) << "\" x2=\"" << fmt_num(px) << "\" y2=\""
           << fmt_num(H - ypad) << "\" stroke=\"#999999\" class=\"axis-y\"/>";
        os << "<text x=\"" << fmt_num(px + 4) << "\" y=\"" << fmt_num(ypad - 4)
           << "\" font-size=\"12\" font-family=\"sans-serif\">" << xml_escape(ds_.dimension(*yd).name) << "</text>";
      }
    }
    os << "</g>";
  }

  void thumbnail(std::ostream& os, std::size_t element, double x, double y, double size,
                 const std::optional<std::string>& color = {}) const {
    const Element& el = list_.element(element);
    const double ext = std::max(el.bbox.width(), el.bbox.height());
    const double s = ext > 0 ? size / ext : 1.0;
    const Point c = el.bbox.center();
    const Affine m = Affine::translate(x + size / 2, y + size / 2) * Affine::scale(s, s) * Affine::translate(-c.x, -c.y);
    os << "<g transform=\"" << matrix_attr(m) << "\">";
    if (element == 0) {
      for (const Element& e : list_.elements)
        if (!e.removed) path(os, e, {}, color);
    } else {
      path(os, el, {}, color);
    }
    os << "</g>";
  }

  void legend(std::ostream& os) const {
    const double x0 = scene_.placement.width + 16;
    double y = 24;
    const auto& pal = categorical_palette();
    os << "<g class=\"legend\" font-family=\"sans-serif\">";
    os << "<text x=\"" << fmt_num(x0) << "\" y=\"" << fmt_num(y) << "\" font-size=\"14\" font-weight=\"bold\">"
       << xml_escape(scene_.topic) << "</text>";
    y += 16;
    auto row_start = [&](std::size_t element, const std::string& name) {
      os << "<g class=\"legend-row\">";
      thumbnail(os, element, x0, y, 28);
      os << "<text x=\"" << fmt_num(x0 + 36) << "\" y=\"" << fmt_num(y + 12) << "\" font-size=\"12\">"
         << xml_escape(name) << "</text>";
    };
    auto swatch = [&](double x, const std::string& color, const std::string& label) {
      os << "<rect class=\"swatch\" x=\"" << fmt_num(x) << "\" y=\"" << fmt_num(y + 18)
         << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>";
      if (!label.empty())
        os << "<text x=\"" << fmt_num(x + 12) << "\" y=\"" << fmt_num(y + 27) << "\" font-size=\"9\">"
           << xml_escape(label) << "</text>";
    };

    for (const auto& a : scene_.plan.assignments) {
      if (a.replica) continue;
      const auto& dim = ds_.dimension(a.dimension);
      row_start(a.element, dim.name + " (" + std::string(to_string(a.channel)) + ")");
      const double gx = x0 + 36;
      switch (a.channel) {
        case Channel::SizeArea:
        case Channel::SizeLength:
        case Channel::SizeHeight:
          for (int i = 0; i < 3; ++i) {
            const double sz = 6 + 5 * i;
            os << "<rect class=\"size-ramp\" x=\"" << fmt_num(gx + 26 * i) << "\" y=\"" << fmt_num(y + 36 - sz)
               << "\" width=\"" << fmt_num(sz) << "\" height=\"" << fmt_num(sz) << "\" fill=\"#777777\"/>";
          }
          os << "<text x=\"" << fmt_num(gx + 84) << "\" y=\"" << fmt_num(y + 34) << "\" font-size=\"9\">"
             << xml_escape(fmt_num(a.scale.domain_min, 2) + " to " + fmt_num(a.scale.domain_max, 2)) << "</text>";
          break;
        case Channel::ColorLightness:
          for (std::size_t i = 0; i < sequential_ramp().size(); i += 2)
            swatch(gx + 12 * static_cast<double>(i / 2), sequential_ramp()[i], "");
          break;
        case Channel::ColorHue:
          for (std::size_t i = 0; i < a.scale.categories.size() && i < pal.size(); ++i)
            swatch(gx + 44 * static_cast<double>(i), pal[i], a.scale.categories[i]);
          break;
        case Channel::Angle:
        case Channel::Rotation:
          for (int i = 0; i < 4; ++i) {
            const double ang = (-90 + a.scale.range_max * i / 3.0) * std::numbers::pi / 180;
            os << "<line class=\"fan\" x1=\"" << fmt_num(gx + 12) << "\" y1=\"" << fmt_num(y + 36) << "\" x2=\""
               << fmt_num(gx + 12 + 14 * std::cos(ang)) << "\" y2=\"" << fmt_num(y + 36 + 14 * std::sin(ang))
               << "\" stroke=\"#555555\"/>";
          }
          break;
        case Channel::PositionOffset:
          for (std::size_t i = 0; i < a.scale.categories.size() && i < 10; ++i)
            os << "<circle cx=\"" << fmt_num(gx + 8 + 10 * static_cast<double>(i)) << "\" cy=\""
               << fmt_num(y + 30 - 2 * static_cast<double>(i % 2)) << "\" r=\"3\" fill=\"#555555\"/>";
          break;
      }
      os << "</g>";
      y += 48;
    }
    for (const auto& ch : scene_.plan.charts) {
      row_start(ch.element, ds_.groups()[ch.group].name + " (" + std::string(to_string(ch.chart)) + ")");
      for (std::size_t i = 0; i < ch.series.size(); ++i)
        swatch(x0 + 36 + 56 * static_cast<double>(i),
               ch.chart == ChartKind::Heatmap ? sequential_ramp()[4] : pal[i % pal.size()],
               ds_.dimension(ch.series[i]).name);
      os << "</g>";
      y += 48;
    }
    for (const auto& rep : scene_.plan.replications) {
      row_start(rep.element, ds_.groups()[rep.group].name + " (rotation, color, size)");
      for (std::size_t i = 0; i < rep.members.size(); ++i)
        swatch(x0 + 36 + 56 * static_cast<double>(i), rep.colors[i], ds_.dimension(rep.members[i]).name);
      os << "</g>";
      y += 48;
    }
    os << "</g>";
  }

 private:
  const GlyphScene& scene_;
  const ElementList& list_;
  const Dataset& ds_;
};

std::string xml_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos) throw Error(ErrorCode::ParseError, "bad entity in metadata");
    auto ent = s.substr(i + 1, semi - i - 1);
    if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "amp") out += '&';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else throw Error(ErrorCode::ParseError, "bad entity in metadata", std::string(ent));
    i = semi;
  }
  return out;
}

constexpr std::string_view kMetaOpen = "<metadata id=\"metaglyph-data\">";
constexpr std::string_view kMetaClose = "</metadata>";

}  // namespace

std::vector<double> pie_sweeps(const std::vector<double>& values) {
  double sum = 0;
  for (double v : values) sum += std::max(0.0, v);
  if (!(sum > 0)) return {};
  std::vector<double> out;
  for (double v : values) out.push_back(360.0 * std::max(0.0, v) / sum);
  return out;
}

nlohmann::json to_json(const ChannelAssignment& a) {
  nlohmann::json j;
  j["dimension"] = a.dimension;
  j["element"] = a.element;
  j["channel"] = std::string(to_string(a.channel));
  j["scale"] = {{"domain", {a.scale.domain_min, a.scale.domain_max}},
                {"range", {a.scale.range_min, a.scale.range_max}},
                {"units", a.scale.units},
                {"categories", a.scale.categories}};
  j["replica"] = a.replica ? nlohmann::json(*a.replica) : nlohmann::json(nullptr);
  return j;
}

ChannelAssignment assignment_from_json(const nlohmann::json& j) {
  try {
    ChannelAssignment a;
    a.dimension = j.at("dimension").get<std::size_t>();
    a.element = j.at("element").get<std::size_t>();
    auto ch = channel_from_string(j.at("channel").get<std::string>());
    if (!ch) throw Error(ErrorCode::ParseError, "unknown channel", j.at("channel").get<std::string>());
    a.channel = *ch;
    const auto& s = j.at("scale");
    a.scale.domain_min = s.at("domain").at(0).get<double>();
    a.scale.domain_max = s.at("domain").at(1).get<double>();
    a.scale.range_min = s.at("range").at(0).get<double>();
    a.scale.range_max = s.at("range").at(1).get<double>();
    a.scale.units = s.at("units").get<std::string>();
    a.scale.categories = s.at("categories").get<std::vector<std::string>>();
    if (!j.at("replica").is_null()) a.replica = j.at("replica").get<std::size_t>();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "malformed assignment metadata", e.what());
  }
}

nlohmann::json scene_metadata(const GlyphScene& scene) {
  nlohmann::json j;
  j["format"] = "metaglyph-mgv/1";
  j["topic"] = scene.topic;
  j["source"] = scene.source_id;
  j["placement"] = std::string(to_string(scene.placement.kind));
  j["reward"] = {{"R", scene.reward.R},
                 {"O", scene.reward.O},
                 {"n_axes", scene.reward.n_axes},
                 {"p_overlap", scene.reward.p_overlap},
                 {"products", scene.reward.products}};
  auto& pairs = j["pairs"] = nlohmann::json::array();
  for (const auto& p : scene.pairs)
    pairs.push_back({{"entry", p.entry.str()}, {"name", p.name}, {"target", p.target.str()}, {"product", p.product}});
  auto& as = j["assignments"] = nlohmann::json::array();
  for (const auto& a : scene.plan.assignments) as.push_back(to_json(a));
  auto& charts = j["charts"] = nlohmann::json::array();
  for (const auto& c : scene.plan.charts)
    charts.push_back({{"element", c.element},
                      {"chart", std::string(to_string(c.chart))},
                      {"group", c.group},
                      {"series", c.series},
                      {"value_range", {c.value_min, c.value_max}}});
  auto& reps = j["replications"] = nlohmann::json::array();
  for (const auto& r : scene.plan.replications)
    reps.push_back({{"element", r.element},
                    {"group", r.group},
                    {"members", r.members},
                    {"rotation_deg", r.rotation_deg},
                    {"colors", r.colors}});
  auto& rs = j["reinstatements"] = nlohmann::json::array();
  for (const auto& r : scene.reinstatements)
    rs.push_back({{"element", r.element},
                  {"partner", r.partner ? nlohmann::json(*r.partner) : nlohmann::json(nullptr)},
                  {"action", std::string(to_string(r.action))}});
  j["warnings"] = scene.placement.warnings;
  return j;
}

std::string render_mgv(const GlyphScene& scene, const ElementList& list, const Dataset& ds) {
  SceneWriter w(scene, list, ds);
  const double W = scene.placement.width + (scene.config.legend ? scene.config.legend_width : 0.0);
  const double H = scene.placement.height;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt_num(W) << "\" height=\""
     << fmt_num(H) << "\" viewBox=\"0 0 " << fmt_num(W) << " " << fmt_num(H) << "\">\n";
  os << "<title>" << xml_escape(scene.topic) << "</title>\n";
  os << kMetaOpen << xml_escape(scene_metadata(scene).dump()) << kMetaClose << "\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt_num(W) << "\" height=\"" << fmt_num(H)
     << "\" fill=\"#ffffff\" class=\"background\"/>\n";
  w.backdrop(os);
  os << "\n<g class=\"glyphs\">\n";
  for (std::size_t row = 0; row < scene.placement.centers.size(); ++row) {
    w.glyph(os, row);
    os << "\n";
  }
  os << "</g>\n";
  if (scene.config.legend) {
    w.legend(os);
    os << "\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_legend(const GlyphScene& scene, const ElementList& list, const Dataset& ds) {
  SceneWriter w(scene, list, ds);
  std::ostringstream os;
  w.legend(os);
  return os.str();
}

std::string render_element_svg(const ElementList& list, std::size_t j) {
  const Element& el = list.element(j);
  Rect box = el.bbox;
  const double pad = std::max(box.width(), box.height()) * 0.05;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\""
     << fmt_num(box.min_x - pad) << " " << fmt_num(box.min_y - pad) << " " << fmt_num(box.width() + 2 * pad) << " "
     << fmt_num(box.height() + 2 * pad) << "\">\n";
  auto emit = [&](const Element& e) {
    os << "<path d=\"" << svg::to_path_data(e.path, 3) << "\" fill=\"" << xml_escape(e.style.fill) << "\" stroke=\""
       << xml_escape(e.style.stroke) << "\" stroke-width=\"" << fmt_num(e.style.stroke_width) << "\"/>\n";
  };
  if (j == 0) {
    for (const Element& e : list.elements)
      if (!e.removed) emit(e);
  } else {
    emit(el);
  }
  os << "</svg>\n";
  return os.str();
}

std::size_t legend_row_count(const GlyphScene& scene) {
  std::size_t n = scene.plan.charts.size() + scene.plan.replications.size();
  for (const auto& a : scene.plan.assignments)
    if (!a.replica) ++n;
  return n;
}

nlohmann::json decode_metadata(std::string_view svg) {
  auto open = svg.find(kMetaOpen);
  if (open == std::string_view::npos) throw Error(ErrorCode::ParseError, "no metadata island in document");
  open += kMetaOpen.size();
  auto close = svg.find(kMetaClose, open);
  if (close == std::string_view::npos) throw Error(ErrorCode::ParseError, "unterminated metadata island");
  try {
    return nlohmann::json::parse(xml_unescape(svg.substr(open, close - open)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, "malformed metadata island", e.what());
  }
}

std::vector<ChannelAssignment> decode_assignments(std::string_view svg) {
  auto meta = decode_metadata(svg);
  std::vector<ChannelAssignment> out;
  for (const auto& a : meta.at("assignments")) out.push_back(assignment_from_json(a));
  return out;
}

}  // namespace metaglyph
