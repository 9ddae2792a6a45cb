#include "metaglyph/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <mutex>
#include <set>

#include "metaglyph/error.hpp"
#include "metaglyph/kernels.hpp"
#include "metaglyph/svg.hpp"
#include "metaglyph/util.hpp"

namespace metaglyph {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

/// Funnels calls into a relevance backend that cannot run concurrently.
class SerializedRelevance final : public semantics::RelevanceBackend {
 public:
  explicit SerializedRelevance(std::shared_ptr<semantics::RelevanceBackend> inner) : inner_(std::move(inner)) {}
  std::string name() const override { return inner_->name(); }
  semantics::Heatmap relevance(const RgbImage& image, std::string_view text) override {
    std::lock_guard lock(mu_);
    return inner_->relevance(image, text);
  }

 private:
  std::shared_ptr<semantics::RelevanceBackend> inner_;
  std::mutex mu_;
};

std::string source_name(MetaphorCandidate::Source s) {
  return s == MetaphorCandidate::Source::LocalCorpus ? "local" : "remote";
}

void validate_pins(const Dataset& ds, const std::vector<Pin>& pins) {
  std::set<EntryId> seen;
  for (const Pin& p : pins) {
    const bool group = p.entry.kind == EntryId::Kind::Group;
    const std::size_t count = group ? ds.groups().size() : ds.dimensions().size();
    if (p.entry.index >= count) throw Error(ErrorCode::UnsatisfiablePin, "pin names an unknown entry", p.entry.str());
    if (!group && ds.group_of(p.entry.index))
      throw Error(ErrorCode::UnsatisfiablePin, "dimension is mapped through its group", p.entry.str());
    if (group && p.target.is_axis())
      throw Error(ErrorCode::UnsatisfiablePin, "data groups cannot be placed on axes", p.entry.str());
    if (p.target.is_element() && p.target.index > 0 && !p.candidate)
      throw Error(ErrorCode::UnsatisfiablePin, "element pins must name a result", p.entry.str());
    if (!seen.insert(p.entry).second)
      throw Error(ErrorCode::UnsatisfiablePin, "entry pinned twice", p.entry.str());
  }
}

}  // namespace

std::string result_id_for(const std::string& candidate_id) { return "r" + util::hex64(util::fnv1a64(candidate_id)).substr(0, 12); }

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  auto text = config_.text ? config_.text : std::make_shared<semantics::LexicalBackend>();
  text_ = std::make_shared<semantics::CachedEmbeddingBackend>(std::move(text));
  if (config_.vision)
    vision_ = config_.vision->reentrant() ? config_.vision : std::make_shared<SerializedRelevance>(config_.vision);
  regions_ = config_.regions ? config_.regions : &RegionTable::builtin();
}

std::vector<MetaphorCandidate> Engine::find_candidates(const Dataset& ds, const GenerateOptions& options,
                                                       std::vector<std::string>* warnings) {
  std::optional<LocalCorpus> corpus;
  if (config_.corpus_dir) corpus.emplace(*config_.corpus_dir);
  auto keywords = options.keywords;
  for (const auto& t : keyword_tokens(ds.topic())) keywords.push_back(t);
  ImageSearchOptions so;
  so.include_unmatched_local = options.include_unmatched_local;
  auto found = search_images(ds.topic(), keywords, options.candidates, corpus ? &*corpus : nullptr,
                             config_.remote.get(), so);
  if (warnings)
    for (auto& w : found.warnings) warnings->push_back(std::move(w));
  return std::move(found.candidates);
}

RewardConfig Engine::reward_config(const GenerateOptions& options) const {
  RewardConfig rc = options.strict_axis_gate ? RewardConfig::strict() : RewardConfig{};
  rc.channels = options.render.channels;
  return rc;
}

std::shared_ptr<PreparedCandidate> Engine::prepare(const Dataset& ds, const semantics::ImportanceTable& importance,
                                                   const MetaphorCandidate& candidate,
                                                   const GenerateOptions& options) {
  auto out = std::make_shared<PreparedCandidate>();
  out->candidate = candidate;
  out->list = build_element_list(candidate, options.metaphor);
  out->space = build_mapping_space(ds, importance, out->list);

  std::map<EntryId, MappingTarget> pins;
  for (const Pin& p : options.pins) {
    if (p.target.is_element() && p.candidate && *p.candidate != candidate.id) continue;
    pins[p.entry] = p.target;
  }
  apply_pins(out->space, pins);

  semantics::RelevanceScorer scorer(out->list, *text_, vision_.get());
  std::set<std::string> notes;
  for (const auto& depth : out->space.depths) {
    out->scores.importance.push_back(importance.score(depth.entry));
    std::vector<double> s;
    for (const auto& t : depth.options) {
      if (t.is_none()) {
        s.push_back(0.0);
        continue;
      }
      auto target = t.is_axis() ? semantics::RelevanceTarget::axis() : semantics::RelevanceTarget::on_element(t.index);
      auto r = scorer.score(target, depth.name, depth.type);
      if (r.fallback && !r.provenance.empty()) notes.insert(r.provenance);
      s.push_back(std::clamp(r.score, 0.0, 1.0));
    }
    out->scores.semantic.push_back(std::move(s));
  }
  out->notes.assign(notes.begin(), notes.end());
  return out;
}

RewardEvaluator Engine::evaluator(const PreparedCandidate& prepared, const Dataset& ds,
                                  const GenerateOptions& options) const {
  return RewardEvaluator(prepared.space, prepared.scores, reward_config(options), prepared.list.structure,
                         make_overlap_probe(ds, prepared.list, options.render.canvas_width,
                                            options.render.canvas_height, *regions_));
}

GenerateResult Engine::generate(const Dataset& ds, const GenerateOptions& options) {
  std::vector<std::string> warnings;
  validate_pins(ds, options.pins);
  auto candidates = find_candidates(ds, options, &warnings);
  auto result = generate(ds, std::move(candidates), options);
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  result.warnings = std::move(warnings);
  return result;
}

GenerateResult Engine::generate(const Dataset& input, std::vector<MetaphorCandidate> candidates,
                                const GenerateOptions& options) {
  const auto start = Clock::now();
  validate_pins(input, options.pins);
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "image search returned no candidates");

  GenerateResult result;
  result.importance = semantics::importance_score(input, *text_);
  result.dataset = input.with_importance(result.importance.dimensions, result.importance.groups);
  const Dataset& ds = result.dataset;

  std::set<std::string> pinned_candidates;
  for (const Pin& p : options.pins)
    if (p.target.is_element() && p.candidate) pinned_candidates.insert(*p.candidate);
  if (pinned_candidates.size() > 1)
    throw Error(ErrorCode::UnsatisfiablePin, "element pins reference different results");
  if (!pinned_candidates.empty()) {
    const std::string& want = *pinned_candidates.begin();
    auto it = std::find_if(candidates.begin(), candidates.end(), [&](const auto& c) { return c.id == want; });
    if (it == candidates.end())
      throw Error(ErrorCode::UnsatisfiablePin, "pinned result's image is no longer a candidate", want);
  }

  struct Slot {
    CandidateReport report;
    std::optional<GenerateItem> item;
  };
  std::vector<Slot> slots(candidates.size());
  const int threads = options.jobs > 0 ? options.jobs : kernels::max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(candidates.size()); ++ci) {
    const auto t0 = Clock::now();
    const MetaphorCandidate& cand = candidates[static_cast<std::size_t>(ci)];
    Slot& slot = slots[static_cast<std::size_t>(ci)];
    slot.report.candidate_id = cand.id;
    slot.report.source = source_name(cand.source);
    try {
      if (!pinned_candidates.empty() && !pinned_candidates.contains(cand.id))
        throw Error(ErrorCode::UnsatisfiablePin, "excluded by an element pin on another result");
      const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
      if (elapsed >= options.total_wall_clock) throw Error(ErrorCode::NoValidSolution, "total time budget spent");

      std::shared_ptr<const PreparedCandidate> prepared = prepare(ds, result.importance, cand, options);
      slot.report.essential_elements = prepared->list.essential().size();
      slot.report.structure = std::string(to_string(prepared->list.structure.structure));

      RewardEvaluator eval = evaluator(*prepared, ds, options);
      SearchOptions so;
      so.budget = options.budget;
      const auto remaining = options.total_wall_clock - elapsed;
      so.budget.wall_clock = options.budget.wall_clock ? std::min(*options.budget.wall_clock, remaining) : remaining;
      so.seed = options.seed ^ util::fnv1a64(cand.id);
      so.exploration = options.exploration;
      so.top_k = options.top_k;
      SearchResult sr = search_mapping(eval, so);
      slot.report.iterations = sr.iterations;
      slot.report.exhausted = sr.exhausted;

      std::vector<MappingSolution> ordered{sr.best};
      ordered.insert(ordered.end(), sr.alternatives.begin(), sr.alternatives.end());
      std::optional<Error> last;
      for (std::size_t k = 0; k < ordered.size(); ++k) {
        try {
          GenerateItem item;
          item.scene = build_scene(ordered[k], prepared->space, ds, prepared->list, options.render,
                                   options.chart_overrides, *regions_);
          item.svg = render_mgv(item.scene, prepared->list, ds);
          item.solution = ordered[k];
          for (std::size_t a = 0; a < ordered.size(); ++a)
            if (a != k) item.alternatives.push_back(ordered[a]);
          item.prepared = prepared;
          item.id = result_id_for(cand.id);
          item.iterations = sr.iterations;
          slot.item = std::move(item);
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ChannelExhausted) throw;
          last = e;
        }
      }
      if (!slot.item) throw *last;
      slot.report.ok = true;
      slot.report.reward = slot.item->solution.reward.R;
    } catch (const Error& e) {
      slot.report.ok = false;
      slot.report.error_code = std::string(to_string(e.code()));
      slot.report.message = e.what();
      if (!e.detail().empty()) slot.report.message += " (" + e.detail() + ")";
    } catch (const std::exception& e) {
      slot.report.ok = false;
      slot.report.error_code = std::string(to_string(ErrorCode::Internal));
      slot.report.message = e.what();
    }
    slot.report.elapsed_ms = ms_since(t0);
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    result.candidates.push_back(slots[i].report);
    if (slots[i].item) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return slots[a].item->solution.reward.R > slots[b].item->solution.reward.R;
  });
  for (std::size_t i : order) {
    GenerateItem item = std::move(*slots[i].item);
    item.rank = result.results.size() + 1;
    for (const auto& w : item.scene.placement.warnings) result.warnings.push_back(item.id + ": " + w);
    result.results.push_back(std::move(item));
  }
  result.elapsed_ms = ms_since(start);
  return result;
}

nlohmann::json to_json(const MappingSolution& s, const MappingSpace& space) {
  nlohmann::json j;
  auto& pairs = j["pairs"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    const auto& d = space.depths.at(i);
    pairs.push_back({{"entry", d.entry.str()},
                     {"name", d.name},
                     {"type", std::string(to_string(d.type))},
                     {"target", s.pairs[i].str()},
                     {"product", i < s.reward.products.size() ? s.reward.products[i] : 0.0}});
  }
  j["reward"] = {{"R", s.reward.R},
                 {"O", s.reward.O},
                 {"n_axes", s.reward.n_axes},
                 {"p_overlap", s.reward.p_overlap}};
  return j;
}

nlohmann::json to_json(const CandidateReport& r) {
  return {{"candidate", r.candidate_id}, {"source", r.source},   {"ok", r.ok},
          {"error", r.error_code},       {"message", r.message}, {"essential_elements", r.essential_elements},
          {"structure", r.structure},    {"reward", r.reward},   {"iterations", r.iterations},
          {"exhausted", r.exhausted},    {"elapsed_ms", r.elapsed_ms}};
}

nlohmann::json result_summary(const GenerateItem& item) {
  const auto& space = item.prepared->space;
  nlohmann::json j = to_json(item.solution, space);
  j["id"] = item.id;
  j["rank"] = item.rank;
  j["candidate"] = item.prepared->candidate.id;
  j["placement"] = std::string(to_string(item.scene.placement.kind));
  j["iterations"] = item.iterations;
  j["elements"] = nlohmann::json::array();
  for (std::size_t e : item.prepared->list.essential()) {
    const auto& el = item.prepared->list.element(e);
    j["elements"].push_back({{"index", e}, {"label", el.label ? nlohmann::json(*el.label) : nlohmann::json(nullptr)},
                             {"augmentable", el.augmentable}});
  }
  auto& alts = j["alternatives"] = nlohmann::json::array();
  for (const auto& a : item.alternatives) alts.push_back(to_json(a, space));
  j["notes"] = item.prepared->notes;
  return j;
}

nlohmann::json mapping_document(const GenerateItem& item, const Dataset& ds) {
  nlohmann::json j = scene_metadata(item.scene);
  j["id"] = item.id;
  j["candidate"] = item.prepared->candidate.id;
  auto& dims = j["dimensions"] = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.dimensions().size(); ++i) {
    const auto& d = ds.dimension(i);
    dims.push_back({{"id", EntryId{EntryId::Kind::Dimension, i}.str()},
                    {"name", d.name},
                    {"type", std::string(to_string(d.type))},
                    {"importance", d.importance.value_or(0.0)}});
  }
  auto& space = j["mapping_space"] = nlohmann::json::array();
  for (const auto& d : item.prepared->space.depths) {
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& o : d.options) opts.push_back(o.str());
    space.push_back({{"entry", d.entry.str()}, {"name", d.name}, {"options", opts}});
  }
  auto& alts = j["alternatives"] = nlohmann::json::array();
  for (const auto& a : item.alternatives) alts.push_back(to_json(a, item.prepared->space));
  return j;
}

std::vector<std::pair<std::string, std::string>> bundle_files(const GenerateItem& item, const Dataset& ds) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("scene.svg", item.svg);
  const double w = item.scene.config.legend_width;
  const double h = item.scene.placement.height;
  std::string legend = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
                       "version=\"1.1\" width=\"" +
                       svg::fmt_num(w) + "\" height=\"" + svg::fmt_num(h) + "\" viewBox=\"" +
                       svg::fmt_num(item.scene.placement.width) + " 0 " + svg::fmt_num(w) + " " + svg::fmt_num(h) +
                       "\">\n" + render_legend(item.scene, item.prepared->list, ds) + "\n</svg>\n";
  files.emplace_back("legend.svg", std::move(legend));
  files.emplace_back("mapping.json", mapping_document(item, ds).dump(2) + "\n");
  for (std::size_t e : item.prepared->list.essential())
    files.emplace_back("elements/element-" + std::to_string(e) + ".svg", render_element_svg(item.prepared->list, e));
  return files;
}

std::string make_tar(const std::vector<std::pair<std::string, std::string>>& files) {
  std::string out;
  auto octal = [](char* field, std::size_t width, std::uint64_t v) {
    std::snprintf(field, width, "%0*llo", static_cast<int>(width - 1), static_cast<unsigned long long>(v));
  };
  for (const auto& [name, data] : files) {
    if (name.size() >= 100) throw Error(ErrorCode::Internal, "archive member name too long", name);
    char h[512];
    std::memset(h, 0, sizeof h);
    std::memcpy(h, name.data(), name.size());
    octal(h + 100, 8, 0644);
    octal(h + 108, 8, 0);
    octal(h + 116, 8, 0);
    octal(h + 124, 12, data.size());
    octal(h + 136, 12, 0);
    std::memset(h + 148, ' ', 8);
    h[156] = '0';
    std::memcpy(h + 257, "ustar", 6);
    std::memcpy(h + 263, "00", 2);
    unsigned sum = 0;
    for (unsigned char c : h) sum += c;
    std::snprintf(h + 148, 8, "%06o", sum);
    h[155] = ' ';
    out.append(h, sizeof h);
    out += data;
    out.append((512 - data.size() % 512) % 512, '\0');
  }
  out.append(1024, '\0');
  return out;
}

}  // namespace metaglyph
