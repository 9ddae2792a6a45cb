#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "metaglyph/channels.hpp"
#include "metaglyph/dataset.hpp"
#include "metaglyph/geometry.hpp"
#include "metaglyph/metaphor.hpp"
#include "metaglyph/semantics.hpp"

namespace metaglyph {

using semantics::EntryId;

struct MappingTarget {
  enum class Kind { Element, Axis, None };
  Kind kind{Kind::None};
  std::size_t index{0};  // element j (0 = whole image) or axis k ∈ {1,2}

  static MappingTarget element(std::size_t j) { return {Kind::Element, j}; }
  static MappingTarget axis(std::size_t k) { return {Kind::Axis, k}; }
  static MappingTarget none() { return {Kind::None, 0}; }

  bool is_element() const { return kind == Kind::Element; }
  bool is_axis() const { return kind == Kind::Axis; }
  bool is_none() const { return kind == Kind::None; }

  std::string str() const;  // "e2", "a1", "none"
  static std::optional<MappingTarget> parse(std::string_view s);
  friend auto operator<=>(const MappingTarget&, const MappingTarget&) = default;
};

/// One tree level: a group or a single dimension and the targets it may take.
struct MappingDepth {
  EntryId entry;
  std::string name;
  DataType type{DataType::Numerical};  // groups are numerical
  std::vector<MappingTarget> options;
  bool is_group() const { return entry.kind == EntryId::Kind::Group; }
};

struct MappingSpace {
  std::vector<MappingDepth> depths;
  /// Number of complete solutions, saturating at SIZE_MAX.
  std::size_t solution_count() const;
  /// Depth answering `entry`, if present.
  std::optional<std::size_t> depth_of(EntryId entry) const;
};

/// Depth order: groups by ranking, then ungrouped dimensions by ranking.
/// Options: e_0, the essential elements, then α_1, α_2 (dimensions only), then ∅.
MappingSpace build_mapping_space(const Dataset& ds, const semantics::ImportanceTable& importance,
                                 const ElementList& list);

/// Restrict depths to pinned targets. Throws Error{UnsatisfiablePin} when a
/// pin names an entry outside the space or a target the depth cannot take.
void apply_pins(MappingSpace& space, const std::map<EntryId, MappingTarget>& pins);

/// I per depth and S per (depth, option). ∅ options carry S = 0.
struct ScoreTable {
  std::vector<double> importance;
  std::vector<std::vector<double>> semantic;
};

struct RewardConfig {
  std::set<std::size_t> valid_axis_counts{0, 1, 2};
  double overlap_threshold{0.30};
  ChannelTable channels{};

  static RewardConfig strict() {
    RewardConfig c;
    c.valid_axis_counts = {0, 1};
    return c;
  }
};

struct RewardBreakdown {
  double R{0};
  std::vector<double> products;  // I·S per depth; 0 for ∅
  int O{1};
  std::size_t n_axes{0};
  double p_overlap{0};
  std::string invalid;  // empty for feasible solutions
};

/// Dimension indices placed on α_1 and α_2, input of the overlap probe.
struct AxisBinding {
  std::optional<std::size_t> x;
  std::optional<std::size_t> y;
  friend auto operator<=>(const AxisBinding&, const AxisBinding&) = default;
};

/// Returns P_overlap for the glyph layout induced by an axis binding.
using OverlapProbe = std::function<double(const AxisBinding&)>;

struct OverlapResult {
  int O{1};
  double p_overlap{0};
};

/// Mean per-glyph overlap fraction of the bounding boxes; O = 1 iff it does
/// not exceed the threshold.
OverlapResult overlap_score(std::span<const Rect> glyph_boxes, double threshold = 0.30);

/// A complete solution as one option index per depth.
using Choice = std::vector<std::uint32_t>;

/// Evaluates the reward of complete solutions. Not thread-safe (the overlap
/// cache is per evaluator); give each search tree its own copy.
class RewardEvaluator {
 public:
  RewardEvaluator(const MappingSpace& space, ScoreTable scores, RewardConfig config = {},
                  StructureInfo structure = {}, OverlapProbe probe = {});

  RewardBreakdown evaluate(std::span<const std::uint32_t> choice);
  const MappingSpace& space() const { return *space_; }
  const ScoreTable& scores() const { return scores_; }
  const RewardConfig& config() const { return config_; }
  std::size_t probe_calls() const { return probe_calls_; }

 private:
  const MappingSpace* space_;
  ScoreTable scores_;
  RewardConfig config_;
  StructureInfo structure_;
  OverlapProbe probe_;
  std::map<AxisBinding, double> overlap_cache_;
  std::size_t probe_calls_{0};
};

/// r/n + c·sqrt(ln N / n); +∞ for an unvisited node.
double uct(double r, std::size_t n, std::size_t parent_n, double c);

struct SearchNode {
  std::uint32_t option{0};  // option index at depth-1; unused for the root
  std::size_t depth{0};     // number of depths fixed on the path to this node
  double r{0};
  std::size_t n{0};
  bool exhausted{false};
  SearchNode* parent{nullptr};
  std::vector<std::unique_ptr<SearchNode>> children;
  std::vector<std::uint32_t> untried;  // option indices not yet expanded, ascending
};

class SearchTree {
 public:
  explicit SearchTree(const MappingSpace& space);
  const SearchNode& root() const { return *root_; }
  SearchNode& root() { return *root_; }
  bool exhausted() const { return root_->exhausted; }
  std::size_t node_count() const { return node_count_; }
  const MappingSpace& space() const { return *space_; }

 private:
  friend struct MctsStepper;
  SearchNode* make_child(SearchNode& parent, std::uint32_t option);
  const MappingSpace* space_;
  std::unique_ptr<SearchNode> root_;
  std::size_t node_count_{1};
};

struct StepResult {
  Choice choice;
  RewardBreakdown reward;
};

/// One selection/expansion/simulation/backpropagation iteration.
/// Throws Error{TreeExhausted}.
StepResult mcts_step(SearchTree& tree, std::mt19937_64& rng, RewardEvaluator& evaluator, double c = 4.0);

struct SearchBudget {
  std::size_t iterations{2000};
  std::optional<std::chrono::milliseconds> wall_clock{std::chrono::milliseconds{2000}};
};

struct MappingSolution {
  std::vector<MappingTarget> pairs;  // one per depth
  Choice choice;
  RewardBreakdown reward;
};

struct SearchOptions {
  SearchBudget budget{};
  std::uint64_t seed{0};
  double exploration{4.0};
  std::size_t top_k{3};
  std::ostream* trace{nullptr};  // JSON lines: iteration, path, reward
};

struct SearchResult {
  MappingSolution best;
  std::vector<MappingSolution> alternatives;  // distinct, reward descending
  std::size_t iterations{0};
  bool exhausted{false};
  std::size_t nodes{0};
};

/// Runs MCTS until the iteration budget, the wall clock or exhaustion.
/// Throws Error{NoValidSolution} when no positive reward was found.
SearchResult search_mapping(RewardEvaluator& evaluator, const SearchOptions& options = {});

/// Every complete solution, lexicographic first among equal maxima.
/// Throws Error{SpaceTooLarge} above `max_solutions`, Error{NoValidSolution}
/// when every reward is 0.
struct ExhaustiveResult {
  MappingSolution best;
  std::size_t evaluated{0};
};
ExhaustiveResult exhaustive_search(RewardEvaluator& evaluator, std::size_t max_solutions = 1'000'000);

MappingSolution make_solution(const MappingSpace& space, Choice choice, RewardBreakdown reward);

}  // namespace metaglyph
