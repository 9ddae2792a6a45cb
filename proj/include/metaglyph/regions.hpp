#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "metaglyph/geometry.hpp"

namespace metaglyph {

struct Region {
  enum class Kind { Country, Subdivision };
  std::string name;
  Kind kind{Kind::Country};
  double lon{0};
  double lat{0};
};

/// Name → region lookup used for geospatial typing and map placement. Names
/// match case-insensitively after trimming and whitespace collapsing.
class RegionTable {
 public:
  RegionTable() = default;
  explicit RegionTable(std::vector<Region> regions);

  void add(Region r, std::vector<std::string> aliases = {});
  const Region* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const { return regions_.size(); }

  /// Countries plus first-level subdivisions for a handful of federations.
  static const RegionTable& builtin();

 private:
  std::vector<Region> regions_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string normalize_region_key(std::string_view name);

/// Coarse continent outlines in (lon, lat) used as the map backdrop.
const std::vector<std::vector<Point>>& base_map_outlines();

}  // namespace metaglyph
