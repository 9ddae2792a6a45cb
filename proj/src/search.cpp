#include "metaglyph/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "metaglyph/error.hpp"
#include "metaglyph/kernels.hpp"

namespace metaglyph {

std::string MappingTarget::str() const {
  switch (kind) {
    case Kind::Element: return "e" + std::to_string(index);
    case Kind::Axis: return "a" + std::to_string(index);
    case Kind::None: return "none";
  }
  return "none";
}

std::optional<MappingTarget> MappingTarget::parse(std::string_view s) {
  if (s == "none") return none();
  if (s.size() < 2 || (s[0] != 'e' && s[0] != 'a')) return std::nullopt;
  std::size_t v = 0;
  for (char ch : s.substr(1)) {
    if (ch < '0' || ch > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(ch - '0');
    if (v > 1'000'000) return std::nullopt;
  }
  if (s[0] == 'a') {
    if (v != 1 && v != 2) return std::nullopt;
    return axis(v);
  }
  return element(v);
}

std::size_t MappingSpace::solution_count() const {
  if (depths.empty()) return 0;
  std::size_t total = 1;
  for (const auto& d : depths) {
    if (d.options.empty()) return 0;
    if (total > std::numeric_limits<std::size_t>::max() / d.options.size())
      return std::numeric_limits<std::size_t>::max();
    total *= d.options.size();
  }
  return total;
}

std::optional<std::size_t> MappingSpace::depth_of(EntryId entry) const {
  for (std::size_t i = 0; i < depths.size(); ++i)
    if (depths[i].entry == entry) return i;
  return std::nullopt;
}

MappingSpace build_mapping_space(const Dataset& ds, const semantics::ImportanceTable& importance,
                                 const ElementList& list) {
  std::vector<MappingTarget> elements{MappingTarget::element(0)};
  for (std::size_t j : list.essential()) elements.push_back(MappingTarget::element(j));

  MappingSpace space;
  auto add = [&](EntryId id) {
    MappingDepth d;
    d.entry = id;
    d.options = elements;
    if (id.kind == EntryId::Kind::Group) {
      d.name = ds.groups().at(id.index).name;
      d.type = DataType::Numerical;
    } else {
      d.name = ds.dimension(id.index).name;
      d.type = ds.dimension(id.index).type;
      d.options.push_back(MappingTarget::axis(1));
      d.options.push_back(MappingTarget::axis(2));
    }
    d.options.push_back(MappingTarget::none());
    space.depths.push_back(std::move(d));
  };
  for (EntryId id : importance.ranking)
    if (id.kind == EntryId::Kind::Group) add(id);
  for (EntryId id : importance.ranking)
    if (id.kind == EntryId::Kind::Dimension && !ds.group_of(id.index)) add(id);
  return space;
}

void apply_pins(MappingSpace& space, const std::map<EntryId, MappingTarget>& pins) {
  for (const auto& [entry, target] : pins) {
    auto depth = space.depth_of(entry);
    if (!depth) throw Error(ErrorCode::UnsatisfiablePin, "pinned entry is not in the mapping space", entry.str());
    auto& options = space.depths[*depth].options;
    if (std::find(options.begin(), options.end(), target) == options.end())
      throw Error(ErrorCode::UnsatisfiablePin, "pinned target is not available for this entry",
                  entry.str() + " -> " + target.str());
    options = {target};
  }
}

OverlapResult overlap_score(std::span<const Rect> glyph_boxes, double threshold) {
  OverlapResult out;
  if (glyph_boxes.empty()) return out;
  auto fractions = kernels::overlap_fractions(glyph_boxes);
  double sum = 0;
  for (double f : fractions) sum += f;
  out.p_overlap = sum / static_cast<double>(fractions.size());
  out.O = out.p_overlap <= threshold ? 1 : 0;
  return out;
}

RewardEvaluator::RewardEvaluator(const MappingSpace& space, ScoreTable scores, RewardConfig config,
                                 StructureInfo structure, OverlapProbe probe)
    : space_(&space),
      scores_(std::move(scores)),
      config_(std::move(config)),
      structure_(structure),
      probe_(std::move(probe)) {
  if (scores_.importance.size() != space.depths.size() || scores_.semantic.size() != space.depths.size())
    throw Error(ErrorCode::Internal, "score table does not match the mapping space");
  for (std::size_t i = 0; i < space.depths.size(); ++i)
    if (scores_.semantic[i].size() != space.depths[i].options.size())
      throw Error(ErrorCode::Internal, "score table does not match the mapping space", "depth " + std::to_string(i));
}

RewardBreakdown RewardEvaluator::evaluate(std::span<const std::uint32_t> choice) {
  const auto& depths = space_->depths;
  if (choice.size() != depths.size()) throw Error(ErrorCode::Internal, "incomplete solution");

  RewardBreakdown out;
  out.products.assign(depths.size(), 0.0);
  double sum = 0;
  std::optional<std::size_t> axis_depth[3];
  std::map<std::size_t, std::vector<std::size_t>> by_element;

  for (std::size_t i = 0; i < depths.size(); ++i) {
    const MappingTarget& t = depths[i].options.at(choice[i]);
    if (t.is_none()) continue;
    out.products[i] = scores_.importance[i] * scores_.semantic[i][choice[i]];
    sum += out.products[i];
    if (t.is_axis()) {
      ++out.n_axes;
      if (depths[i].is_group()) out.invalid = "group on axis";
      if (axis_depth[t.index] && out.invalid.empty()) out.invalid = "duplicate axis";
      axis_depth[t.index] = i;
    } else {
      by_element[t.index].push_back(i);
    }
  }

  auto fail = [&](std::string why) {
    if (out.invalid.empty()) out.invalid = std::move(why);
  };
  if (!config_.valid_axis_counts.contains(out.n_axes)) fail("axis count");
  if (axis_depth[2]) {
    if (depths[*axis_depth[2]].type != DataType::Numerical) fail("non-numerical second axis");
    if (axis_depth[1] && depths[*axis_depth[1]].type == DataType::Geospatial) fail("map with second axis");
  }
  for (const auto& [element, hosted] : by_element) {
    bool has_group = false;
    std::vector<ChannelRequest> requests;
    for (std::size_t i : hosted) {
      if (depths[i].is_group()) has_group = true;
      else requests.push_back({depths[i].type, out.products[i]});
    }
    if (has_group && hosted.size() > 1) fail("element shared with a group");
    if (!requests.empty() && !allocate_channels(config_.channels, structure_, requests)) fail("channels exhausted");
  }
  if (!out.invalid.empty()) return out;
  if (sum <= 0) return out;

  AxisBinding binding;
  if (axis_depth[1]) binding.x = depths[*axis_depth[1]].entry.index;
  if (axis_depth[2]) binding.y = depths[*axis_depth[2]].entry.index;
  if (probe_) {
    auto it = overlap_cache_.find(binding);
    if (it == overlap_cache_.end()) {
      ++probe_calls_;
      it = overlap_cache_.emplace(binding, probe_(binding)).first;
    }
    out.p_overlap = it->second;
  }
  out.O = out.p_overlap <= config_.overlap_threshold ? 1 : 0;
  out.R = out.O * sum / static_cast<double>(depths.size());
  return out;
}

double uct(double r, std::size_t n, std::size_t parent_n, double c) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  const double ln = parent_n > 0 ? std::log(static_cast<double>(parent_n)) : 0.0;
  return r / nn + c * std::sqrt(std::max(0.0, ln) / nn);
}

namespace {

std::vector<std::uint32_t> all_options(const MappingSpace& space, std::size_t depth) {
  std::vector<std::uint32_t> v(space.depths[depth].options.size());
  for (std::uint32_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace

SearchTree::SearchTree(const MappingSpace& space) : space_(&space), root_(std::make_unique<SearchNode>()) {
  // The root counts as visited once so every internal node keeps
  // n = 1 + Σ children n.
  root_->n = 1;
  if (space.depths.empty() || space.solution_count() == 0) root_->exhausted = true;
  else root_->untried = all_options(space, 0);
}

SearchNode* SearchTree::make_child(SearchNode& parent, std::uint32_t option) {
  auto child = std::make_unique<SearchNode>();
  child->option = option;
  child->depth = parent.depth + 1;
  child->parent = &parent;
  if (child->depth < space_->depths.size()) child->untried = all_options(*space_, child->depth);
  else child->exhausted = true;
  parent.children.push_back(std::move(child));
  ++node_count_;
  return parent.children.back().get();
}

struct MctsStepper {
  static StepResult step(SearchTree& tree, std::mt19937_64& rng, RewardEvaluator& evaluator, double c) {
    if (tree.exhausted()) throw Error(ErrorCode::TreeExhausted, "search tree exhausted");
    const MappingSpace& space = tree.space();
    const std::size_t depth_count = space.depths.size();

    SearchNode* node = tree.root_.get();
    while (node->untried.empty()) {
      SearchNode* best = nullptr;
      double best_value = -std::numeric_limits<double>::infinity();
      for (auto& ch : node->children) {
        if (ch->exhausted) continue;
        double v = uct(ch->r, ch->n, node->n, c);
        if (!best || v > best_value || (v == best_value && ch->option < best->option)) {
          best = ch.get();
          best_value = v;
        }
      }
      if (!best) throw Error(ErrorCode::Internal, "non-exhausted node without open children");
      node = best;
    }

    const std::size_t pick = uniform_index(rng, node->untried.size());
    const std::uint32_t option = node->untried[pick];
    node->untried.erase(node->untried.begin() + static_cast<std::ptrdiff_t>(pick));
    SearchNode* child = tree.make_child(*node, option);

    StepResult out;
    out.choice.assign(depth_count, 0);
    for (SearchNode* p = child; p->parent; p = p->parent) out.choice[p->depth - 1] = p->option;
    for (std::size_t d = child->depth; d < depth_count; ++d)
      out.choice[d] = static_cast<std::uint32_t>(uniform_index(rng, space.depths[d].options.size()));

    out.reward = evaluator.evaluate(out.choice);
    const double r = out.reward.R;
    child->r = r;
    child->n = 1;
    for (SearchNode* p = node; p; p = p->parent) {
      p->n += 1;
      p->r = std::max(p->r, r);
    }
    for (SearchNode* p = child->parent; p; p = p->parent) {
      bool done = p->untried.empty() &&
                  std::all_of(p->children.begin(), p->children.end(), [](const auto& ch) { return ch->exhausted; });
      if (!done) break;
      p->exhausted = true;
    }
    return out;
  }
};

StepResult mcts_step(SearchTree& tree, std::mt19937_64& rng, RewardEvaluator& evaluator, double c) {
  return MctsStepper::step(tree, rng, evaluator, c);
}

MappingSolution make_solution(const MappingSpace& space, Choice choice, RewardBreakdown reward) {
  MappingSolution s;
  s.pairs.reserve(choice.size());
  for (std::size_t i = 0; i < choice.size(); ++i) s.pairs.push_back(space.depths.at(i).options.at(choice[i]));
  s.choice = std::move(choice);
  s.reward = std::move(reward);
  return s;
}

SearchResult search_mapping(RewardEvaluator& evaluator, const SearchOptions& options) {
  const MappingSpace& space = evaluator.space();
  SearchTree tree(space);
  std::mt19937_64 rng(options.seed);
  const auto start = std::chrono::steady_clock::now();

  std::map<Choice, RewardBreakdown> seen;
  SearchResult result;
  while (result.iterations < options.budget.iterations && !tree.exhausted()) {
    if (options.budget.wall_clock && std::chrono::steady_clock::now() - start >= *options.budget.wall_clock) break;
    StepResult step = mcts_step(tree, rng, evaluator, options.exploration);
    ++result.iterations;
    if (options.trace) {
      nlohmann::json line;
      line["iteration"] = result.iterations;
      auto& path = line["path"] = nlohmann::json::array();
      for (std::size_t i = 0; i < step.choice.size(); ++i)
        path.push_back(space.depths[i].options[step.choice[i]].str());
      line["reward"] = step.reward.R;
      *options.trace << line.dump() << '\n';
    }
    seen.try_emplace(std::move(step.choice), std::move(step.reward));
  }
  result.exhausted = tree.exhausted();
  result.nodes = tree.node_count();

  std::vector<const std::pair<const Choice, RewardBreakdown>*> ranked;
  for (const auto& entry : seen)
    if (entry.second.R > 0) ranked.push_back(&entry);
  if (ranked.empty())
    throw Error(ErrorCode::NoValidSolution, "no mapping with a positive reward",
                std::to_string(result.iterations) + " iterations");
  // `seen` iterates in lexicographic order, so a stable sort keeps ties lowest-first.
  std::stable_sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) { return a->second.R > b->second.R; });

  result.best = make_solution(space, ranked[0]->first, ranked[0]->second);
  for (std::size_t i = 1; i < ranked.size() && result.alternatives.size() < options.top_k; ++i)
    result.alternatives.push_back(make_solution(space, ranked[i]->first, ranked[i]->second));
  return result;
}

ExhaustiveResult exhaustive_search(RewardEvaluator& evaluator, std::size_t max_solutions) {
  const MappingSpace& space = evaluator.space();
  const std::size_t total = space.solution_count();
  if (total > max_solutions)
    throw Error(ErrorCode::SpaceTooLarge, "mapping space too large for exhaustive search", std::to_string(total));
  ExhaustiveResult out;
  if (total == 0) throw Error(ErrorCode::NoValidSolution, "empty mapping space");

  Choice choice(space.depths.size(), 0);
  std::optional<std::pair<Choice, RewardBreakdown>> best;
  while (true) {
    RewardBreakdown r = evaluator.evaluate(choice);
    ++out.evaluated;
    if (r.R > 0 && (!best || r.R > best->second.R)) best.emplace(choice, std::move(r));
    std::size_t d = choice.size();
    while (d > 0) {
      --d;
      if (++choice[d] < space.depths[d].options.size()) break;
      choice[d] = 0;
      if (d == 0) {
        d = choice.size() + 1;
        break;
      }
    }
    if (d == choice.size() + 1 || choice.empty()) break;
  }
  if (!best) throw Error(ErrorCode::NoValidSolution, "no mapping with a positive reward");
  out.best = make_solution(space, std::move(best->first), std::move(best->second));
  return out;
}

}  // namespace metaglyph
