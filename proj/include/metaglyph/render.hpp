#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaglyph/channels.hpp"
#include "metaglyph/dataset.hpp"
#include "metaglyph/geometry.hpp"
#include "metaglyph/metaphor.hpp"
#include "metaglyph/raster.hpp"
#include "metaglyph/regions.hpp"
#include "metaglyph/search.hpp"

namespace metaglyph {

enum class ChartKind { Pie, Donut, Star, Heatmap };
std::string_view to_string(ChartKind k);
std::optional<ChartKind> chart_from_string(std::string_view s);

/// Linear map from a data domain onto a visual range. Categorical channels
/// keep their sorted category list and map category ranks.
struct Scale {
  double domain_min{0};
  double domain_max{1};
  double range_min{0};
  double range_max{1};
  std::string units;
  std::vector<std::string> categories;

  double map(double v) const;
  friend bool operator==(const Scale&, const Scale&) = default;
};

struct ChannelAssignment {
  std::size_t dimension{0};
  std::size_t element{0};
  Channel channel{Channel::SizeArea};
  Scale scale;
  std::optional<std::size_t> replica;  // member slot when a group replicates its element
  friend bool operator==(const ChannelAssignment&, const ChannelAssignment&) = default;
};

struct ChartAugmentation {
  std::size_t element{0};
  ChartKind chart{ChartKind::Star};
  std::size_t group{0};
  std::vector<std::size_t> series;  // member dimensions, in group order
  double value_min{0};              // over all members and rows
  double value_max{0};
  friend bool operator==(const ChartAugmentation&, const ChartAugmentation&) = default;
};

/// A group on a non-augmentable element: one copy per member, told apart by
/// rotation and color, sized by the member value (the size assignments carry
/// `replica`).
struct GroupReplication {
  std::size_t element{0};
  std::size_t group{0};
  std::vector<std::size_t> members;
  std::vector<double> rotation_deg;
  std::vector<std::string> colors;
  friend bool operator==(const GroupReplication&, const GroupReplication&) = default;
};

struct ChannelPlan {
  std::vector<ChannelAssignment> assignments;
  std::vector<ChartAugmentation> charts;
  std::vector<GroupReplication> replications;
};

struct RenderConfig {
  ChannelTable channels{};
  std::vector<ChartKind> proportional_priority{ChartKind::Pie, ChartKind::Donut, ChartKind::Heatmap};
  double size_floor{0.25};
  double angle_max_deg{90};
  double donut_inner{0.5};
  double canvas_width{1000};
  double canvas_height{1000};
  bool legend{true};
  double legend_width{280};
};

const std::vector<std::string>& categorical_palette();  // 10 hues
const std::vector<std::string>& sequential_ramp();      // 9 steps, light to dark

/// Channels and chart augmentations for a solution. `chart_overrides` picks a
/// specific chart per group (any kind valid for the data). Throws
/// Error{ChannelExhausted}.
ChannelPlan assign_channels(const MappingSolution& solution, const MappingSpace& space, const Dataset& ds,
                            const ElementList& list, const RenderConfig& config = {},
                            const std::map<std::size_t, ChartKind>& chart_overrides = {});

/// Charts that can render a group: star always, the proportional kinds when
/// every member value is non-negative. Config priority order, star last.
std::vector<ChartKind> chart_options(const DataGroup& group, const Dataset& ds, const RenderConfig& config = {});

/// Pie/donut sector sweeps in degrees (non-negative shares of the row sum);
/// empty when the sum is zero.
std::vector<double> pie_sweeps(const std::vector<double>& values);

enum class ReinstateAction { ScaleWithPartner, Delete, KeepOriginal };
std::string_view to_string(ReinstateAction a);

struct Reinstatement {
  std::size_t element{0};
  std::optional<std::size_t> partner;
  ReinstateAction action{ReinstateAction::KeepOriginal};
};

std::vector<Reinstatement> reinstate_removed(const ElementList& list, const ChannelPlan& plan);

enum class PlacementKind { Cartesian, HorizontalAxis, Timeline, Map, Ordered };
std::string_view to_string(PlacementKind k);

struct Placement {
  PlacementKind kind{PlacementKind::Ordered};
  double width{1000};
  double height{1000};
  double base_size{0};
  std::vector<Point> centers;  // per row
  std::vector<bool> located;   // false for rows parked in the unlocated strip
  AxisBinding axes;
  std::vector<std::string> warnings;
};

/// Plot area padding as a fraction of the canvas extent.
inline constexpr double kPlacementPadding = 0.05;

Placement place_glyphs(const AxisBinding& axes, const Dataset& ds, double width, double height,
                       const RegionTable& regions = RegionTable::builtin());

/// Glyph boxes for a placement: the whole-image aspect fitted into a
/// base_size square at each center.
std::vector<Rect> glyph_boxes(const Placement& placement, const ElementList& list);

/// Overlap probe for the reward: places glyphs for each axis binding and
/// returns P_overlap of their boxes.
OverlapProbe make_overlap_probe(const Dataset& ds, const ElementList& list, double width, double height,
                                const RegionTable& regions = RegionTable::builtin());

struct ScenePair {
  EntryId entry;
  std::string name;
  MappingTarget target;
  double product{0};
};

struct GlyphScene {
  std::string topic;
  std::string source_id;
  std::vector<ScenePair> pairs;
  ChannelPlan plan;
  std::vector<Reinstatement> reinstatements;
  Placement placement;
  RewardBreakdown reward;
  RenderConfig config;
};

GlyphScene build_scene(const MappingSolution& solution, const MappingSpace& space, const Dataset& ds,
                       const ElementList& list, const RenderConfig& config = {},
                       const std::map<std::size_t, ChartKind>& chart_overrides = {},
                       const RegionTable& regions = RegionTable::builtin());

/// Standalone SVG with one group per row and a JSON metadata island.
/// Byte-identical for identical inputs.
std::string render_mgv(const GlyphScene& scene, const ElementList& list, const Dataset& ds);

/// Legend rows: non-replica assignments, then charts, then replications.
std::string render_legend(const GlyphScene& scene, const ElementList& list, const Dataset& ds);
std::size_t legend_row_count(const GlyphScene& scene);

/// Standalone SVG of one element (j = 0: the essential elements together),
/// used for thumbnails and export bundles.
std::string render_element_svg(const ElementList& list, std::size_t j);

nlohmann::json scene_metadata(const GlyphScene& scene);
/// Reads the metadata island of a rendered document. Throws Error{ParseError}.
nlohmann::json decode_metadata(std::string_view svg);
std::vector<ChannelAssignment> decode_assignments(std::string_view svg);

nlohmann::json to_json(const ChannelAssignment& a);
ChannelAssignment assignment_from_json(const nlohmann::json& j);

/// Value of a dimension in a row as used by the channel scales: the numeric
/// value, or the category rank for categorical and geospatial columns.
double channel_value(const DataDimension& dim, std::size_t row, const Scale& scale);

}  // namespace metaglyph
