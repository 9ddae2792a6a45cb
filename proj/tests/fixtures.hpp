#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "metaglyph/dataset.hpp"
#include "metaglyph/metaphor.hpp"
#include "metaglyph/search.hpp"
#include "metaglyph/svg.hpp"

namespace fixtures {

using namespace metaglyph;

inline std::filesystem::path data_dir() { return METAGLYPH_DATA_DIR; }
inline std::filesystem::path corpus_dir() { return data_dir() / "corpus"; }
inline std::filesystem::path table(const std::string& name) { return data_dir() / "tables" / name; }

inline MetaphorCandidate candidate(std::string id, std::string svg) {
  MetaphorCandidate c;
  c.id = std::move(id);
  c.svg_bytes = std::move(svg);
  return c;
}

inline std::string svg_doc(const std::string& body, double w = 100, double h = 100) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << ' ' << h << "\">" << body << "</svg>";
  return os.str();
}

inline std::string rect(double x, double y, double w, double h, const std::string& extra = {}) {
  std::ostringstream os;
  os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h << "\" " << extra << "/>";
  return os.str();
}

inline std::string circle(double cx, double cy, double r, const std::string& extra = {}) {
  std::ostringstream os;
  os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" " << extra << "/>";
  return os.str();
}

/// Concentric rings around (cx, cy), outermost first, wrapped in `transform`.
inline std::string concentric(double cx, double cy, double scale = 1.0, const std::string& transform = {}) {
  std::string body;
  for (double r : {40.0, 30.0, 20.0, 10.0}) body += circle(cx, cy, r * scale);
  if (!transform.empty()) body = "<g transform=\"" + transform + "\">" + body + "</g>";
  return body;
}

inline std::string collinear_squares(double scale = 1.0, double dx = 0, double dy = 0) {
  std::string body;
  for (int i = 0; i < 3; ++i) body += rect(dx + (5 + 30.0 * i) * scale, dy + 40 * scale, 20 * scale, 20 * scale);
  return body;
}

/// `n` disjoint squares on a grid.
inline std::string grid_of_squares(int n, double cell = 10, double size = 6) {
  std::string body;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  for (int i = 0; i < n; ++i) body += rect((i % cols) * cell, (i / cols) * cell, size, size);
  return svg_doc(body, cols * cell, cols * cell);
}

inline Dataset numeric_dataset(const std::vector<std::string>& names, std::size_t rows, std::uint64_t seed = 1,
                               std::string topic = "topic") {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 100);
  std::vector<DataDimension> dims;
  for (const auto& n : names) {
    DataDimension d;
    d.name = n;
    d.type = DataType::Numerical;
    for (std::size_t r = 0; r < rows; ++r) {
      const double v = std::round(u(rng) * 100) / 100;
      d.numeric.push_back(v);
      d.raw.push_back(std::to_string(v));
      d.imputed.push_back(false);
    }
    dims.push_back(std::move(d));
  }
  return Dataset(std::move(topic), std::move(dims));
}

/// Random search instance over a synthetic space: depths with element,
/// axis and ∅ options, random I and S tables.
struct RandomInstance {
  MappingSpace space;
  ScoreTable scores;
};

inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t dims, std::size_t elements,
                                      std::size_t groups = 0) {
  std::uniform_real_distribution<double> u(0, 1);
  RandomInstance inst;
  for (std::size_t d = 0; d < groups + dims; ++d) {
    MappingDepth depth;
    const bool group = d < groups;
    depth.entry = group ? EntryId{EntryId::Kind::Group, d} : EntryId{EntryId::Kind::Dimension, d - groups};
    depth.name = (group ? "g" : "d") + std::to_string(d);
    depth.type = DataType::Numerical;
    for (std::size_t j = 0; j <= elements; ++j) depth.options.push_back(MappingTarget::element(j));
    if (!group) {
      depth.options.push_back(MappingTarget::axis(1));
      depth.options.push_back(MappingTarget::axis(2));
    }
    depth.options.push_back(MappingTarget::none());
    std::vector<double> s;
    for (const auto& o : depth.options) s.push_back(o.is_none() ? 0.0 : u(rng));
    inst.scores.semantic.push_back(std::move(s));
    inst.scores.importance.push_back(u(rng));
    inst.space.depths.push_back(std::move(depth));
  }
  return inst;
}

}  // namespace fixtures
