#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <regex>

#include "fixtures.hpp"
#include "metaglyph/channels.hpp"
#include "metaglyph/error.hpp"
#include "metaglyph/render.hpp"
#include "metaglyph/util.hpp"

using namespace metaglyph;

namespace {

ElementList corpus_list(const std::string& file) {
  return build_element_list(fixtures::candidate(file, util::read_file(fixtures::corpus_dir() / file)));
}

Dataset table(const std::string& name) { return load_spreadsheet(util::read_file(fixtures::table(name)), name); }

std::size_t element_named(const ElementList& list, const std::string& label) {
  for (const auto& e : list.elements)
    if (e.label == label) return e.index;
  FAIL("no element " << label);
  return 0;
}

/// Hand-built solution over exactly the listed entries, each with product 1
/// unless given.
struct Manual {
  MappingSpace space;
  MappingSolution solution;
};

Manual manual(const Dataset& ds, const std::vector<std::pair<EntryId, MappingTarget>>& pairs,
              std::vector<double> products = {}) {
  Manual m;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [entry, target] = pairs[i];
    MappingDepth d;
    d.entry = entry;
    if (entry.kind == EntryId::Kind::Group) {
      d.name = ds.groups().at(entry.index).name;
      d.type = DataType::Numerical;
    } else {
      d.name = ds.dimension(entry.index).name;
      d.type = ds.dimension(entry.index).type;
    }
    d.options = {target, MappingTarget::none()};
    m.space.depths.push_back(d);
    m.solution.pairs.push_back(target);
    m.solution.choice.push_back(0);
    m.solution.reward.products.push_back(i < products.size() ? products[i] : 1.0);
  }
  m.solution.reward.R = 1;
  return m;
}

EntryId dim(std::size_t i) { return {EntryId::Kind::Dimension, i}; }
EntryId group(std::size_t i) { return {EntryId::Kind::Group, i}; }
MappingTarget el(std::size_t j) { return MappingTarget::element(j); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

// --- emitted-document inspection -------------------------------------------

std::string glyph_line(const std::string& svg, std::size_t row) {
  const std::string key = "<g class=\"glyph\" data-row=\"" + std::to_string(row) + "\"";
  const auto at = svg.find(key);
  REQUIRE(at != std::string::npos);
  return svg.substr(at, svg.find('\n', at) - at);
}

std::vector<std::string> tags(const std::string& text, const std::string& name) {
  std::vector<std::string> out;
  const std::string open = "<" + name + " ";
  for (std::size_t at = text.find(open); at != std::string::npos; at = text.find(open, at + 1))
    out.push_back(text.substr(at, text.find('>', at) - at + 1));
  return out;
}

std::optional<std::string> attr(const std::string& tag, const std::string& name) {
  const std::string key = " " + name + "=\"";
  const auto at = tag.find(key);
  if (at == std::string::npos) return std::nullopt;
  const auto start = at + key.size();
  return tag.substr(start, tag.find('"', start) - start);
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

/// Emitted outline of one element in one glyph, in element coordinates
/// (the per-element transform applied, the glyph placement not).
std::vector<Polyline> emitted_outline(const std::string& svg, std::size_t row, std::size_t j) {
  for (const auto& t : tags(glyph_line(svg, row), "path")) {
    if (attr(t, "data-element") != std::to_string(j)) continue;
    svg::Path p = svg::parse_path_data(*attr(t, "d"));
    if (auto tr = attr(t, "transform")) p = p.transformed(svg::parse_transform(*tr));
    return svg::flatten(p);
  }
  FAIL("element " << j << " not emitted in row " << row);
  return {};
}

Rect bbox_of(const std::vector<Polyline>& lines) { return bounds(lines); }

std::vector<std::size_t> rows_by(const DataDimension& d) {
  std::vector<std::size_t> order(d.numeric.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d.numeric[a] < d.numeric[b]; });
  return order;
}

}  // namespace

// --- channels ------------------------------------------------------------------

TEST_CASE("size channels follow image structure") {
  StructureInfo radial{Structure::Radial, 0, 0, false};
  StructureInfo flat{Structure::NonRadial, 0.3, 0, false};
  StructureInfo tall{Structure::NonRadial, std::numeric_limits<double>::infinity(), 0, false};
  CHECK(primary_size_channel(radial) == Channel::SizeArea);
  CHECK_FALSE(secondary_size_channel(radial));
  CHECK(primary_size_channel(flat) == Channel::SizeLength);
  CHECK(secondary_size_channel(flat) == Channel::SizeHeight);
  CHECK(primary_size_channel(tall) == Channel::SizeHeight);
  CHECK(secondary_size_channel(tall) == Channel::SizeLength);
  StructureInfo diagonal{Structure::NonRadial, -1.0, 0, false};
  CHECK(primary_size_channel(diagonal) == Channel::SizeLength);
}

TEST_CASE("allocate_channels walks the table by priority") {
  StructureInfo flat{Structure::NonRadial, 0, 0, false};
  std::vector<ChannelRequest> four{{DataType::Numerical, 0.1}, {DataType::Numerical, 0.9},
                                   {DataType::Numerical, 0.5}, {DataType::Temporal, 0.3}};
  auto got = allocate_channels(ChannelTable::defaults(), flat, four);
  REQUIRE(got);
  CHECK(*got == std::vector<Channel>{Channel::ColorLightness, Channel::SizeLength, Channel::SizeHeight, Channel::Angle});

  four.push_back({DataType::Numerical, 0.0});
  CHECK_FALSE(allocate_channels(ChannelTable::defaults(), flat, four));

  StructureInfo radial{Structure::Radial, 0, 0, false};
  std::vector<ChannelRequest> three(3, {DataType::Numerical, 1.0});
  auto r3 = allocate_channels(ChannelTable::defaults(), radial, three);
  REQUIRE(r3);
  CHECK(*r3 == std::vector<Channel>{Channel::SizeArea, Channel::Angle, Channel::ColorLightness});
  three.push_back({DataType::Numerical, 1.0});
  CHECK_FALSE(allocate_channels(ChannelTable::defaults(), radial, three));
}

TEST_CASE("angle and rotation exclude each other") {
  StructureInfo flat{Structure::NonRadial, 0, 0, false};
  std::vector<ChannelRequest> reqs{{DataType::Numerical, 3}, {DataType::Numerical, 2}, {DataType::Numerical, 1},
                                   {DataType::Categorical, 0.9}, {DataType::Geospatial, 0.8}};
  auto got = allocate_channels(ChannelTable::defaults(), flat, reqs);
  REQUIRE(got);
  CHECK((*got)[2] == Channel::Angle);
  CHECK((*got)[3] == Channel::ColorHue);
  CHECK((*got)[4] == Channel::PositionOffset);
}

TEST_CASE("allocated channels are distinct for random request sets") {
  std::mt19937_64 rng(17);
  const DataType types[] = {DataType::Numerical, DataType::Categorical, DataType::Temporal, DataType::Geospatial};
  for (int trial = 0; trial < 300; ++trial) {
    StructureInfo s{rng() % 2 ? Structure::Radial : Structure::NonRadial, static_cast<double>(rng() % 5) - 2, 0,
                    false};
    std::vector<ChannelRequest> reqs(1 + rng() % 6);
    for (auto& r : reqs) r = {types[rng() % 4], static_cast<double>(rng() % 10)};
    auto got = allocate_channels(ChannelTable::defaults(), s, reqs);
    if (!got) continue;
    std::vector<Channel> c = *got;
    std::sort(c.begin(), c.end());
    CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
    const bool angle = std::count(c.begin(), c.end(), Channel::Angle) > 0;
    const bool rotation = std::count(c.begin(), c.end(), Channel::Rotation) > 0;
    CHECK_FALSE((angle && rotation));
    for (std::size_t i = 0; i < reqs.size(); ++i)
      CHECK(uses_numerical_channels(reqs[i].type) ==
            (is_size_channel((*got)[i]) || (*got)[i] == Channel::Angle || (*got)[i] == Channel::ColorLightness));
  }
}

// --- scales and encodings --------------------------------------------------------

TEST_CASE("scale maps domain ends to range ends") {
  Scale s{10, 20, 0.25, 1.0, "", {}};
  CHECK(s.map(10) == doctest::Approx(0.25));
  CHECK(s.map(20) == doctest::Approx(1.0));
  CHECK(s.map(15) == doctest::Approx(0.625));
  Scale flat{5, 5, 0.25, 1.0, "", {}};
  CHECK(flat.map(5) == doctest::Approx(1.0));
  Scale cats{0, 3, 0, 135, "deg", {"a", "b", "c", "d"}};
  CHECK(cats.map(1) == doctest::Approx(45));
}

TEST_CASE("a numerical dimension on the vertical burger sizes the upper bread by height") {
  ElementList list = corpus_list("burger.svg");
  Dataset ds = table("burger.csv");
  REQUIRE(list.structure.structure == Structure::NonRadial);
  const std::size_t bread = element_named(list, "upper-bread");
  auto m = manual(ds, {{dim(2), el(bread)}});
  auto plan = assign_channels(m.solution, m.space, ds, list);
  REQUIRE(plan.assignments.size() == 1);
  CHECK(plan.assignments[0].channel == Channel::SizeHeight);
  CHECK(plan.assignments[0].element == bread);
  CHECK(plan.assignments[0].dimension == 2);
}

TEST_CASE("emitted size matches the scale at the data extremes and is monotone") {
  // Oracle: measure the emitted geometry, not the transform bookkeeping.
  SUBCASE("height on the burger") {
    ElementList list = corpus_list("burger.svg");
    Dataset ds = table("burger.csv");
    const std::size_t bread = element_named(list, "upper-bread");
    auto m = manual(ds, {{dim(2), el(bread)}});
    std::string svg = render_mgv(build_scene(m.solution, m.space, ds, list), list, ds);
    const double h0 = list.element(bread).bbox.height();
    const auto order = rows_by(ds.dimension(2));
    CHECK(bbox_of(emitted_outline(svg, order.back(), bread)).height() / h0 == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(bbox_of(emitted_outline(svg, order.front(), bread)).height() / h0 == doctest::Approx(0.25).epsilon(2e-3));
    CHECK(bbox_of(emitted_outline(svg, order.front(), bread)).width() / list.element(bread).bbox.width() ==
          doctest::Approx(1.0).epsilon(2e-3));
    for (std::size_t k = 1; k < order.size(); ++k) {
      const double a = ds.dimension(2).numeric[order[k - 1]], b = ds.dimension(2).numeric[order[k]];
      const double ha = bbox_of(emitted_outline(svg, order[k - 1], bread)).height();
      const double hb = bbox_of(emitted_outline(svg, order[k], bread)).height();
      if (b > a) CHECK(hb > ha);
      else CHECK(hb == doctest::Approx(ha));
    }
  }
  SUBCASE("area on the rings") {
    ElementList list = corpus_list("rings.svg");
    Dataset ds = table("burger.csv");
    REQUIRE(list.structure.structure == Structure::Radial);
    const std::size_t core = element_named(list, "core");
    auto m = manual(ds, {{dim(1), el(core)}});
    std::string svg = render_mgv(build_scene(m.solution, m.space, ds, list), list, ds);
    const double a0 = outline_area(svg::flatten(list.element(core).path), 0);
    const auto order = rows_by(ds.dimension(1));
    CHECK(outline_area(emitted_outline(svg, order.back(), core), 0) / a0 == doctest::Approx(1.0).epsilon(3e-3));
    CHECK(outline_area(emitted_outline(svg, order.front(), core), 0) / a0 == doctest::Approx(0.25).epsilon(3e-3));
    double prev = 0;
    for (std::size_t r : order) {
      const double a = outline_area(emitted_outline(svg, r, core), 0);
      CHECK(a >= prev - 1e-9);
      prev = a;
    }
  }
}

TEST_CASE("size scales are strictly monotone for random data") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-50, 50);
  for (Channel c : {Channel::SizeArea, Channel::SizeLength, Channel::SizeHeight}) {
    for (int trial = 0; trial < 100; ++trial) {
      double lo = u(rng), hi = u(rng);
      if (lo == hi) continue;
      if (lo > hi) std::swap(lo, hi);
      Scale s{lo, hi, 0.25, 1.0, std::string(to_string(c)), {}};
      double a = u(rng), b = u(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      CHECK(s.map(a) < s.map(b));
    }
  }
}

TEST_CASE("pie sweeps") {
  auto half = pie_sweeps({0.5, 0.5});
  REQUIRE(half.size() == 2);
  CHECK(half[0] == doctest::Approx(180));
  CHECK(half[1] == doctest::Approx(180));
  CHECK(pie_sweeps({0, 0, 0}).empty());

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + rng() % 8);
    for (auto& x : v) x = rng() % 4 ? u(rng) : 0.0;
    auto s = pie_sweeps(v);
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0; })) {
      CHECK(s.empty());
      continue;
    }
    CHECK(std::abs(std::accumulate(s.begin(), s.end(), 0.0) - 360.0) <= 1e-6);
    for (double x : s) CHECK(x >= 0);
  }
}

namespace {

struct NutrientFixture {
  ElementList list = corpus_list("burger.svg");
  Dataset ds = table("burger_nutrients.csv").with_groups({DataGroup{"nutrients", {3, 4, 5, 6}, {}}});
  std::size_t bread = element_named(list, "upper-bread");
  std::size_t patty = element_named(list, "patty");
};

}  // namespace

TEST_CASE("a nutrient group on the upper bread offers the proportional charts") {
  NutrientFixture f;
  REQUIRE(f.list.element(f.bread).augmentable);
  auto options = chart_options(f.ds.groups()[0], f.ds);
  CHECK(options == std::vector<ChartKind>{ChartKind::Pie, ChartKind::Donut, ChartKind::Heatmap, ChartKind::Star});

  auto m = manual(f.ds, {{group(0), el(f.bread)}});
  auto plan = assign_channels(m.solution, m.space, f.ds, f.list, {}, {{0, ChartKind::Heatmap}});
  REQUIRE(plan.charts.size() == 1);
  CHECK(plan.charts[0].chart == ChartKind::Heatmap);
  CHECK(plan.charts[0].element == f.bread);

  auto scene = build_scene(m.solution, m.space, f.ds, f.list, {}, {{0, ChartKind::Heatmap}});
  std::string svg = render_mgv(scene, f.list, f.ds);
  const std::string row0 = glyph_line(svg, 0);
  CHECK(count_of(row0, "data-chart=\"heatmap\"") == 1);
  CHECK(count_of(row0, "<clipPath id=\"clip-r0-e" + std::to_string(f.bread) + "\"") == 1);
  CHECK(tags(row0.substr(row0.find("clip-path=")), "rect").size() == 4);
}

TEST_CASE("a signed group only offers the star") {
  Dataset ds = load_spreadsheet("n,a,b\nx,1,-2\ny,3,4\n", "s.csv").with_groups({DataGroup{"ab", {1, 2}, {}}});
  CHECK(chart_options(ds.groups()[0], ds) == std::vector<ChartKind>{ChartKind::Star});
  ElementList list = corpus_list("rings.svg");
  auto m = manual(ds, {{group(0), el(element_named(list, "core"))}});
  CHECK(code_of([&] { assign_channels(m.solution, m.space, ds, list, {}, {{0, ChartKind::Pie}}); }) ==
        ErrorCode::InvalidRequest);
}

TEST_CASE("default chart is the first proportional kind and pie sectors close") {
  NutrientFixture f;
  auto m = manual(f.ds, {{group(0), el(f.bread)}});
  std::string svg = render_mgv(build_scene(m.solution, m.space, f.ds, f.list), f.list, f.ds);
  for (std::size_t row = 0; row < f.ds.rows(); ++row) {
    const std::string line = glyph_line(svg, row);
    CHECK(count_of(line, "data-chart=\"pie\"") == 1);
    double total = 0;
    std::size_t sectors = 0;
    for (const auto& t : tags(line, "path"))
      if (auto s = attr(t, "data-sweep")) {
        total += std::stod(*s);
        ++sectors;
      }
    CHECK(sectors == 4);
    CHECK(std::abs(total - 360.0) <= 1e-6);
  }
}

TEST_CASE("a zero row draws an empty pie") {
  Dataset ds = load_spreadsheet("n,a,b\nx,0,0\ny,1,3\n", "z.csv").with_groups({DataGroup{"ab", {1, 2}, {}}});
  ElementList list = corpus_list("rings.svg");
  const std::size_t core = element_named(list, "core");
  auto m = manual(ds, {{group(0), el(core)}});
  std::string svg = render_mgv(build_scene(m.solution, m.space, ds, list), list, ds);
  CHECK(count_of(glyph_line(svg, 0), "class=\"empty-chart\"") == 1);
  CHECK(count_of(glyph_line(svg, 0), "class=\"hatch\"") == 1);
  CHECK(count_of(glyph_line(svg, 1), "data-sweep=") == 2);
}

TEST_CASE("star plots draw one vertex per member") {
  std::mt19937_64 rng(31);
  ElementList list = corpus_list("rings.svg");
  const std::size_t middle = element_named(list, "middle-ring");
  for (std::size_t k = 2; k <= 7; ++k) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) names.push_back("m" + std::to_string(i));
    std::vector<std::size_t> members(k);
    std::iota(members.begin(), members.end(), 0);
    Dataset ds = fixtures::numeric_dataset(names, 4, rng()).with_groups({DataGroup{"g", members, {}}});
    auto m = manual(ds, {{group(0), el(middle)}});
    std::string svg = render_mgv(build_scene(m.solution, m.space, ds, list, {}, {{0, ChartKind::Star}}), list, ds);
    for (std::size_t row = 0; row < 4; ++row) {
      auto polys = tags(glyph_line(svg, row), "polygon");
      REQUIRE(polys.size() == 1);
      const std::string pts = *attr(polys[0], "points");
      CHECK(static_cast<std::size_t>(std::count(pts.begin(), pts.end(), ',')) == k);
    }
  }
}

TEST_CASE("a group on a non-augmentable element replicates it with rotation, color and size") {
  NutrientFixture f;
  REQUIRE_FALSE(f.list.element(f.patty).augmentable);
  auto m = manual(f.ds, {{group(0), el(f.patty)}});
  auto scene = build_scene(m.solution, m.space, f.ds, f.list);
  REQUIRE(scene.plan.replications.size() == 1);
  const auto& rep = scene.plan.replications[0];
  CHECK(rep.members == std::vector<std::size_t>{3, 4, 5, 6});
  CHECK(rep.rotation_deg == std::vector<double>{0, 90, 180, 270});
  std::set<std::string> colors(rep.colors.begin(), rep.colors.end());
  CHECK(colors.size() == 4);
  std::size_t sized = 0;
  for (const auto& a : scene.plan.assignments) {
    CHECK(a.replica.has_value());
    CHECK(is_size_channel(a.channel));
    CHECK(a.dimension == rep.members[*a.replica]);
    ++sized;
  }
  CHECK(sized == 4);

  std::string svg = render_mgv(scene, f.list, f.ds);
  for (std::size_t row = 0; row < f.ds.rows(); ++row) {
    std::set<std::string> member_ids, fills;
    for (const auto& t : tags(glyph_line(svg, row), "path")) {
      if (attr(t, "data-element") != std::to_string(f.patty)) continue;
      auto member = attr(t, "data-member");
      REQUIRE(member);
      member_ids.insert(*member);
      fills.insert(*attr(t, "fill"));
      CHECK(attr(t, "transform"));
    }
    CHECK(member_ids.size() == 4);
    CHECK(fills.size() == 4);
  }
  const auto meta = decode_metadata(svg);
  REQUIRE(meta.at("replications").size() == 1);
}

TEST_CASE("a group sharing its element with another entry exhausts the channels") {
  NutrientFixture f;
  auto m = manual(f.ds, {{group(0), el(f.bread)}, {dim(1), el(f.bread)}});
  CHECK(code_of([&] { assign_channels(m.solution, m.space, f.ds, f.list); }) == ErrorCode::ChannelExhausted);
}

// --- reinstatement ------------------------------------------------------------------

TEST_CASE("removed details follow their partner") {
  ElementList list = corpus_list("rings.svg");
  Dataset ds = fixtures::numeric_dataset({"a", "b", "c"}, 3).with_groups({DataGroup{"bc", {1, 2}, {}}});
  const std::size_t bark = element_named(list, "bark"), core = element_named(list, "core");
  REQUIRE(list.removed().size() == 2);
  auto actions = [&](const std::vector<std::pair<EntryId, MappingTarget>>& pairs) {
    auto m = manual(ds, pairs);
    auto rs = reinstate_removed(list, assign_channels(m.solution, m.space, ds, list));
    std::set<ReinstateAction> out;
    for (const auto& r : rs) {
      CHECK(r.partner == std::optional<std::size_t>(bark));
      out.insert(r.action);
    }
    return out;
  };
  CHECK(actions({{dim(0), el(bark)}}) == std::set{ReinstateAction::ScaleWithPartner});
  CHECK(actions({{dim(0), el(core)}}) == std::set{ReinstateAction::Delete});
  CHECK(actions({{group(0), el(bark)}}) == std::set{ReinstateAction::Delete});

  Dataset cats = load_spreadsheet("kind,v\nx,1\ny,2\nz,3\n", "c.csv");
  auto m = manual(cats, {{dim(0), el(bark)}});
  auto rs = reinstate_removed(list, assign_channels(m.solution, m.space, cats, list));
  for (const auto& r : rs) CHECK(r.action == ReinstateAction::KeepOriginal);
}

TEST_CASE("reinstated details are emitted or skipped per action") {
  ElementList list = corpus_list("rings.svg");
  Dataset ds = fixtures::numeric_dataset({"a"}, 2);
  const std::size_t bark = element_named(list, "bark"), core = element_named(list, "core");
  const std::size_t knot = element_named(list, "knot");
  auto sized = manual(ds, {{dim(0), el(bark)}});
  std::string svg = render_mgv(build_scene(sized.solution, sized.space, ds, list), list, ds);
  CHECK(count_of(glyph_line(svg, 0), "data-reinstated=\"scale_with_partner\"") == 2);

  auto elsewhere = manual(ds, {{dim(0), el(core)}});
  svg = render_mgv(build_scene(elsewhere.solution, elsewhere.space, ds, list), list, ds);
  CHECK(count_of(glyph_line(svg, 0), "data-reinstated=") == 0);
  CHECK(count_of(glyph_line(svg, 0), "data-element=\"" + std::to_string(knot) + "\"") == 0);
}

// --- placement ---------------------------------------------------------------------

TEST_CASE("cartesian placement pads the extremes by five percent") {
  Dataset ds = load_spreadsheet("x,y\n0,0\n10,5\n4,2\n", "p.csv");
  auto p = place_glyphs({0, 1}, ds, 1000, 600);
  CHECK(p.kind == PlacementKind::Cartesian);
  CHECK(p.centers[0].x == doctest::Approx(50));
  CHECK(p.centers[0].y == doctest::Approx(570));
  CHECK(p.centers[1].x == doctest::Approx(950));
  CHECK(p.centers[1].y == doctest::Approx(30));
  CHECK(p.centers[2].x == doctest::Approx(50 + 0.4 * 900));
}

TEST_CASE("placement kinds follow the axis types") {
  Dataset ds = load_spreadsheet("when,v,kind,where\n2020-01-01,1,a,France\n2020-01-11,2,b,Japan\n"
                                "2020-01-21,3,a,Peru\n2020-01-31,4,c,Brazil\n",
                                "k.csv");
  REQUIRE(ds.dimension(0).type == DataType::Temporal);
  REQUIRE(ds.dimension(3).type == DataType::Geospatial);

  auto t = place_glyphs({0, std::nullopt}, ds, 800, 400);
  CHECK(t.kind == PlacementKind::Timeline);
  for (std::size_t i = 2; i < 4; ++i)
    CHECK(t.centers[i].x - t.centers[i - 1].x == doctest::Approx(t.centers[1].x - t.centers[0].x));
  CHECK(t.centers[0].y == doctest::Approx(200));

  CHECK(place_glyphs({1, std::nullopt}, ds, 800, 400).kind == PlacementKind::HorizontalAxis);
  CHECK(place_glyphs({std::nullopt, 1}, ds, 800, 400).kind == PlacementKind::HorizontalAxis);
  CHECK(place_glyphs({2, std::nullopt}, ds, 800, 400).kind == PlacementKind::Ordered);

  RegionTable partial;
  for (const char* name : {"France", "Japan", "Brazil"}) partial.add(*RegionTable::builtin().find(name));
  auto map = place_glyphs({3, std::nullopt}, ds, 800, 400, partial);
  CHECK(map.kind == PlacementKind::Map);
  CHECK(map.located == std::vector<bool>{true, true, false, true});
  CHECK(map.warnings == std::vector<std::string>{"UnknownRegion: Peru"});
  CHECK(map.centers[2].y == doctest::Approx(380));
}

TEST_CASE("no axis gives a centered square grid") {
  Dataset ds = fixtures::numeric_dataset({"a"}, 9);
  auto p = place_glyphs({}, ds, 900, 600);
  CHECK(p.kind == PlacementKind::Ordered);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(p.centers[i].x == doctest::Approx((i % 3 + 0.5) * 300));
    CHECK(p.centers[i].y == doctest::Approx((i / 3 + 0.5) * 200));
  }
  CHECK(p.base_size == doctest::Approx(160));
}

TEST_CASE("placement centers scale with the canvas") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    Dataset ds = fixtures::numeric_dataset({"a", "b"}, 2 + rng() % 10, rng());
    const double k = 0.5 + static_cast<double>(rng() % 40) / 10;
    AxisBinding axes;
    switch (rng() % 3) {
      case 0: axes = {0, 1}; break;
      case 1: axes = {1, std::nullopt}; break;
      default: break;
    }
    auto a = place_glyphs(axes, ds, 500, 400), b = place_glyphs(axes, ds, 500 * k, 400 * k);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      CHECK(b.centers[i].x == doctest::Approx(a.centers[i].x * k));
      CHECK(b.centers[i].y == doctest::Approx(a.centers[i].y * k));
    }
  }
}

TEST_CASE("placement rejects an empty canvas") {
  Dataset ds = fixtures::numeric_dataset({"a"}, 2);
  CHECK(code_of([&] { place_glyphs({}, ds, 0, 100); }) == ErrorCode::InvalidRequest);
}

// --- document --------------------------------------------------------------------

TEST_CASE("legend rows match the plan") {
  ElementList list = corpus_list("burger.svg");
  Dataset ds = load_spreadsheet("kind,v,w\nbeef,1,3\nfish,2,2\nveg,3,1\nduck,4,0\n", "l.csv");
  auto m = manual(ds, {{dim(0), el(element_named(list, "patty"))},
                       {dim(1), el(element_named(list, "upper-bread"))},
                       {dim(2), el(element_named(list, "lower-bread"))}});
  auto scene = build_scene(m.solution, m.space, ds, list);
  CHECK(legend_row_count(scene) == 3);
  const std::string legend = render_legend(scene, list, ds);
  CHECK(count_of(legend, "class=\"legend-row\"") == 3);
  CHECK(count_of(legend, "class=\"swatch\"") == 4);
  CHECK(count_of(legend, "class=\"size-ramp\"") == 6);

  std::string svg = render_mgv(scene, list, ds);
  CHECK(svg.find("width=\"1280\"") != std::string::npos);
  RenderConfig bare;
  bare.legend = false;
  auto plain = build_scene(m.solution, m.space, ds, list, bare);
  std::string no_legend = render_mgv(plain, list, ds);
  CHECK(no_legend.find("class=\"legend\"") == std::string::npos);
  CHECK(no_legend.find("width=\"1000\"") != std::string::npos);
}

TEST_CASE("metadata island round-trips the plan") {
  NutrientFixture f;
  auto m = manual(f.ds, {{group(0), el(f.bread)}, {dim(1), el(f.patty)}, {dim(2), MappingTarget::axis(1)}},
                  {0.5, 0.25, 1.0});
  auto scene = build_scene(m.solution, m.space, f.ds, f.list);
  std::string svg = render_mgv(scene, f.list, f.ds);
  CHECK(decode_assignments(svg) == scene.plan.assignments);
  const auto meta = decode_metadata(svg);
  CHECK(meta.at("format") == "metaglyph-mgv/1");
  CHECK(meta.at("topic") == f.ds.topic());
  CHECK(meta.at("placement") == "horizontal_axis");
  REQUIRE(meta.at("charts").size() == 1);
  CHECK(meta.at("charts")[0].at("chart") == "pie");
  REQUIRE(meta.at("pairs").size() == 3);
  CHECK(meta.at("pairs")[2].at("target") == "a1");
  CHECK(code_of([] { decode_metadata("<svg/>"); }) == ErrorCode::ParseError);
}

TEST_CASE("rendering is byte-identical for identical inputs") {
  NutrientFixture f;
  auto m = manual(f.ds, {{group(0), el(f.patty)}, {dim(1), el(f.bread)}});
  const std::string a = render_mgv(build_scene(m.solution, m.space, f.ds, f.list), f.list, f.ds);
  ElementList again = corpus_list("burger.svg");
  const std::string b = render_mgv(build_scene(m.solution, m.space, f.ds, again), again, f.ds);
  CHECK(a == b);
  CHECK(svg::parse(render_element_svg(f.list, f.bread)).drawables.size() == 1);
  CHECK(svg::parse(render_element_svg(f.list, 0)).drawables.size() == f.list.essential().size());
}
