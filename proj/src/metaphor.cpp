#include "metaglyph/metaphor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include <json.hpp>

#include "metaglyph/error.hpp"
#include "metaglyph/util.hpp"

namespace metaglyph {

namespace {

bool point_in_ring(Point p, const std::vector<Point>& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Point& a = ring[i];
    const Point& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

Element make_element(std::size_t index, svg::Drawable dr, double tol) {
  Element e;
  e.index = index;
  e.kind = dr.kind;
  e.path = std::move(dr.path);
  e.style = std::move(dr.style);
  e.label = std::move(dr.label);
  e.radii = dr.radii;
  e.outline = svg::flatten(e.path, tol);
  e.bbox = bounds(e.outline);
  e.center = e.bbox.center();
  // Arcs are flattened as inscribed chords; circles and ellipses get the exact value.
  if ((e.kind == svg::ShapeKind::Circle || e.kind == svg::ShapeKind::Ellipse) && e.radii)
    e.area = std::numbers::pi * e.radii->first * e.radii->second;
  else
    e.area = outline_area(e.outline, e.style.stroke_width);
  return e;
}

}  // namespace

std::string_view to_string(Structure s) { return s == Structure::Radial ? "radial" : "non_radial"; }

std::vector<std::size_t> ElementList::essential() const {
  std::vector<std::size_t> out;
  for (const auto& e : elements)
    if (!e.removed) out.push_back(e.index);
  return out;
}

std::vector<std::size_t> ElementList::removed() const {
  std::vector<std::size_t> out;
  for (const auto& e : elements)
    if (e.removed) out.push_back(e.index);
  return out;
}

double outline_area(const std::vector<Polyline>& outline, double stroke_width) {
  std::vector<const Polyline*> rings;
  double open_area = 0.0;
  for (const auto& pl : outline) {
    if (pl.closed && pl.points.size() >= 3) {
      rings.push_back(&pl);
    } else {
      open_area += polyline_length(pl) * std::max(stroke_width, 0.0);
    }
  }
  double area = 0.0;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    int depth = 0;
    for (std::size_t j = 0; j < rings.size(); ++j)
      if (i != j && point_in_ring(rings[i]->points.front(), rings[j]->points)) ++depth;
    const double a = std::abs(signed_area(rings[i]->points));
    area += depth % 2 == 0 ? a : -a;
  }
  return std::max(area, 0.0) + open_area;
}

Segmentation segment(const MetaphorCandidate& candidate, double flatten_tolerance) {
  svg::Document doc = svg::parse(candidate.svg_bytes);
  Segmentation seg;
  seg.canvas = doc.canvas(flatten_tolerance);
  seg.elements.reserve(doc.drawables.size());
  for (std::size_t i = 0; i < doc.drawables.size(); ++i)
    seg.elements.push_back(make_element(i + 1, std::move(doc.drawables[i]), flatten_tolerance));

  Element& whole = seg.whole_image;
  whole.index = 0;
  for (const auto& e : seg.elements) {
    whole.bbox.expand(e.bbox);
    for (const auto& sp : e.path.subpaths) whole.path.subpaths.push_back(sp);
    for (const auto& pl : e.outline) whole.outline.push_back(pl);
  }
  whole.center = whole.bbox.center();
  whole.area = whole.bbox.area();
  if (seg.canvas.empty() || seg.canvas.area() <= 0) seg.canvas = whole.bbox;
  return seg;
}

PruneResult prune(std::vector<Element>& elements, const Element& whole_image, double min_area_fraction) {
  if (elements.empty()) throw Error(ErrorCode::AllPruned, "no elements to prune");
  const double whole_area = whole_image.bbox.area();
  const double threshold = min_area_fraction * whole_area;
  PruneResult result;
  for (auto& e : elements) {
    e.removed = false;
    if (e.area < threshold) {
      for (const auto& other : elements) {
        if (&other == &e || other.area <= e.area) continue;
        if (intersection_area(e.bbox, other.bbox) > 0) {
          e.removed = true;
          break;
        }
      }
    }
    (e.removed ? result.removed : result.essential).push_back(e.index);
  }
  if (result.essential.empty()) throw Error(ErrorCode::AllPruned, "every element was pruned");
  return result;
}

StructureInfo detect_structure(const std::vector<const Element*>& essential, const Element& whole_image,
                               double proximity_fraction) {
  StructureInfo info;
  const Point origin = whole_image.center;
  const double rho = proximity_fraction * whole_image.bbox.diagonal();
  std::size_t near = 0;
  for (const Element* e : essential)
    if (distance(e->center, origin) <= rho) ++near;
  if (near > 1) {
    info.structure = Structure::Radial;
    return info;
  }

  info.structure = Structure::NonRadial;
  if (essential.empty()) return info;
  // Orthogonal least squares: the principal axis of the center cloud.
  double mx = 0, my = 0;
  for (const Element* e : essential) {
    mx += e->center.x;
    my += e->center.y;
  }
  mx /= static_cast<double>(essential.size());
  my /= static_cast<double>(essential.size());
  double sxx = 0, syy = 0, sxy = 0;
  for (const Element* e : essential) {
    const double dx = e->center.x - mx, dy = e->center.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double theta = 0.5 * std::atan2(2 * sxy, sxx - syy);
  const double ux = std::cos(theta), uy = std::sin(theta);
  info.slope = std::abs(ux) < 1e-12 ? std::numeric_limits<double>::infinity() : uy / ux;
  for (const Element* e : essential) {
    const double dev = std::abs(-(e->center.x - mx) * uy + (e->center.y - my) * ux);
    info.max_deviation = std::max(info.max_deviation, dev);
  }
  info.low_collinearity = info.max_deviation > rho;
  return info;
}

bool is_circular(const Element& e) {
  if ((e.kind == svg::ShapeKind::Circle || e.kind == svg::ShapeKind::Ellipse) && e.radii) {
    const auto [big, small] = *e.radii;
    if (small <= 0) return false;
    const double ratio = big / small;
    return ratio >= 0.9 && ratio <= 1.1;
  }
  const Polyline* outer = nullptr;
  double best = 0.0;
  for (const auto& pl : e.outline) {
    if (!pl.closed || pl.points.size() < 3) continue;
    const double a = std::abs(signed_area(pl.points));
    if (a > best) {
      best = a;
      outer = &pl;
    }
  }
  if (!outer) return false;
  const auto samples = resample_ring(outer->points, 128);
  Rect box;
  for (auto p : outer->points) box.expand(p);
  const Point c = box.center();
  double sum = 0, sum_sq = 0;
  for (auto p : samples) {
    const double r = distance(p, c);
    sum += r;
    sum_sq += r * r;
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  if (mean <= 0) return false;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return std::sqrt(var) / mean <= 0.1;
}

void tag_augmentable(std::vector<Element*> essential) {
  for (Element* e : essential) e->augmentable = is_circular(*e);
}

ElementList build_element_list(const MetaphorCandidate& candidate, const MetaphorOptions& options) {
  Segmentation seg = segment(candidate, options.flatten_tolerance);
  prune(seg.elements, seg.whole_image, options.min_area_fraction);

  std::vector<const Element*> essential;
  std::vector<Element*> essential_mut;
  for (auto& e : seg.elements) {
    if (e.removed) continue;
    essential.push_back(&e);
    essential_mut.push_back(&e);
  }
  if (essential.size() < options.min_essential)
    throw Error(ErrorCode::TooSimple, "candidate '" + candidate.id + "' has " + std::to_string(essential.size()) +
                                          " essential element(s), need at least " + std::to_string(options.min_essential));
  if (essential.size() > options.max_essential)
    throw Error(ErrorCode::TooComplex, "candidate '" + candidate.id + "' has " + std::to_string(essential.size()) +
                                           " essential elements, limit is " + std::to_string(options.max_essential));

  const double canvas_area = seg.canvas.area();
  for (const Element* e : essential) {
    if (canvas_area > 0 && e->area > options.max_background_fraction * canvas_area)
      throw Error(ErrorCode::MultiLayer, "candidate '" + candidate.id + "' has an element covering most of the canvas");
  }

  ElementList list;
  list.structure = detect_structure(essential, seg.whole_image, options.proximity_fraction);
  tag_augmentable(essential_mut);
  list.elements = std::move(seg.elements);
  list.whole_image = std::move(seg.whole_image);
  list.source_id = candidate.id;
  list.canvas = seg.canvas;
  return list;
}

// ---------------------------------------------------------------------------

std::vector<std::string> keyword_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (std::isupper(c) && !cur.empty() && i > 0 && std::islower(static_cast<unsigned char>(text[i - 1]))) flush();
    cur += static_cast<char>(std::tolower(c));
  }
  flush();
  return out;
}

LocalCorpus::LocalCorpus(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_))
    throw Error(ErrorCode::NoSource, "corpus directory '" + dir_.string() + "' does not exist");
}

std::vector<LocalCorpus::Entry> LocalCorpus::entries() const {
  nlohmann::json tags = nlohmann::json::object();
  const auto sidecar = dir_ / "tags.json";
  if (std::filesystem::exists(sidecar)) {
    try {
      tags = nlohmann::json::parse(util::read_file(sidecar));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("malformed tags.json: ") + e.what());
    }
  }
  std::vector<Entry> out;
  for (const auto& f : std::filesystem::directory_iterator(dir_)) {
    if (!f.is_regular_file() || f.path().extension() != ".svg") continue;
    Entry e{f.path().filename().string(), {}};
    if (tags.contains(e.file)) e.tags = tags[e.file].get<std::vector<std::string>>();
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.file < b.file; });
  return out;
}

MetaphorCandidate LocalCorpus::load(const std::string& file) const {
  MetaphorCandidate c;
  c.id = file;
  c.source = MetaphorCandidate::Source::LocalCorpus;
  c.svg_bytes = util::read_file(dir_ / file);
  for (const auto& e : entries())
    if (e.file == file) c.keywords = e.tags;
  return c;
}

std::vector<MetaphorCandidate> LocalCorpus::search(const std::vector<std::string>& query_tokens, std::size_t limit,
                                                   bool include_unmatched) const {
  const std::set<std::string> query(query_tokens.begin(), query_tokens.end());
  struct Scored {
    std::size_t score;
    Entry entry;
  };
  std::vector<Scored> scored;
  for (auto& e : entries()) {
    std::set<std::string> vocab;
    for (const auto& t : e.tags)
      for (auto& tok : keyword_tokens(t)) vocab.insert(tok);
    for (auto& tok : keyword_tokens(std::filesystem::path(e.file).stem().string())) vocab.insert(tok);
    std::size_t score = 0;
    for (const auto& q : query) score += vocab.count(q);
    if (score > 0 || include_unmatched) scored.push_back({score, std::move(e)});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
  std::vector<MetaphorCandidate> out;
  for (const auto& s : scored) {
    if (out.size() >= limit) break;
    MetaphorCandidate c;
    c.id = s.entry.file;
    c.source = MetaphorCandidate::Source::LocalCorpus;
    c.svg_bytes = util::read_file(dir_ / s.entry.file);
    c.keywords = s.entry.tags;
    out.push_back(std::move(c));
  }
  return out;
}

void LocalCorpus::add(const std::filesystem::path& svg_file, const std::vector<std::string>& tags) {
  const auto target = dir_ / svg_file.filename();
  if (std::filesystem::absolute(svg_file) != std::filesystem::absolute(target))
    std::filesystem::copy_file(svg_file, target, std::filesystem::copy_options::overwrite_existing);
  if (!tags.empty()) set_tags(svg_file.filename().string(), tags);
}

void LocalCorpus::set_tags(const std::string& file, const std::vector<std::string>& tags) {
  const auto sidecar = dir_ / "tags.json";
  nlohmann::json j = nlohmann::json::object();
  if (std::filesystem::exists(sidecar)) j = nlohmann::json::parse(util::read_file(sidecar));
  j[file] = tags;
  util::write_file(sidecar, j.dump(2) + "\n");
}

ImageSearchResult search_images(const std::string& topic, const std::vector<std::string>& keywords, std::size_t limit,
                                const LocalCorpus* corpus, RemoteFetcher* remote, const ImageSearchOptions& options) {
  if (!corpus && !remote) throw Error(ErrorCode::NoSource, "no local corpus or remote fetcher configured");
  ImageSearchResult result;
  std::set<std::uint64_t> seen;
  auto push = [&](MetaphorCandidate c) {
    if (result.candidates.size() >= limit) return;
    if (seen.insert(util::fnv1a64(c.svg_bytes)).second) result.candidates.push_back(std::move(c));
  };

  std::vector<std::string> tokens = keyword_tokens(topic);
  for (const auto& k : keywords)
    for (auto& t : keyword_tokens(k)) tokens.push_back(t);

  if (corpus) {
    // Over-fetch so duplicates do not eat into the limit.
    for (auto& c : corpus->search(tokens, std::numeric_limits<std::size_t>::max(), options.include_unmatched_local))
      push(std::move(c));
  }
  if (remote && result.candidates.size() < limit) {
    try {
      for (auto& c : remote->fetch(topic + " icon", limit)) push(std::move(c));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RemoteUnavailable) throw;
      result.warnings.push_back(std::string("remote image search unavailable: ") + e.what());
    }
  }
  return result;
}

}  // namespace metaglyph
