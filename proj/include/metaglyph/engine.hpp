#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaglyph/dataset.hpp"
#include "metaglyph/metaphor.hpp"
#include "metaglyph/render.hpp"
#include "metaglyph/search.hpp"
#include "metaglyph/semantics.hpp"

namespace metaglyph {

/// A user constraint on one dimension or group. Element targets only make
/// sense for one candidate image, so they name it; axis and ∅ pins apply to
/// every candidate.
struct Pin {
  EntryId entry;
  MappingTarget target;
  std::optional<std::string> candidate;
  friend bool operator==(const Pin&, const Pin&) = default;
};

struct EngineConfig {
  std::optional<std::filesystem::path> corpus_dir;
  std::shared_ptr<RemoteFetcher> remote;
  std::shared_ptr<semantics::TextEmbeddingBackend> text;  // lexical when null
  std::shared_ptr<semantics::RelevanceBackend> vision;    // label fallback when null
  const RegionTable* regions{nullptr};                    // builtin when null
};

struct GenerateOptions {
  std::size_t candidates{5};
  SearchBudget budget{};
  std::chrono::milliseconds total_wall_clock{10000};
  std::uint64_t seed{0};
  double exploration{4.0};
  std::size_t top_k{3};
  bool strict_axis_gate{false};
  int jobs{0};  // 0 = OpenMP default
  RenderConfig render{};
  MetaphorOptions metaphor{};
  std::vector<Pin> pins;
  std::map<std::size_t, ChartKind> chart_overrides;  // group index → chart
  std::vector<std::string> keywords;                 // extra image-search keywords
  bool include_unmatched_local{true};
};

/// Everything the search needs for one candidate image.
struct PreparedCandidate {
  MetaphorCandidate candidate;
  ElementList list;
  MappingSpace space;
  ScoreTable scores;
  std::vector<std::string> notes;  // relevance fallbacks and similar
};

struct CandidateReport {
  std::string candidate_id;
  std::string source;
  bool ok{false};
  std::string error_code;
  std::string message;
  std::size_t essential_elements{0};
  std::string structure;
  double reward{0};
  std::size_t iterations{0};
  bool exhausted{false};
  double elapsed_ms{0};
};

struct GenerateItem {
  std::string id;
  std::size_t rank{0};  // 1-based
  std::shared_ptr<const PreparedCandidate> prepared;
  MappingSolution solution;
  std::vector<MappingSolution> alternatives;
  GlyphScene scene;
  std::string svg;
  std::size_t iterations{0};
};

struct GenerateResult {
  Dataset dataset;  // with importance scores
  semantics::ImportanceTable importance;
  std::vector<GenerateItem> results;  // reward descending
  std::vector<CandidateReport> candidates;
  std::vector<std::string> warnings;
  double elapsed_ms{0};
};

/// Stable result id for a candidate image.
std::string result_id_for(const std::string& candidate_id);

class Engine {
 public:
  explicit Engine(EngineConfig config = {});

  /// Image search, then the per-candidate pipeline. Throws Error{NoSource |
  /// NoCandidates | UnsatisfiablePin}; an empty result list means every
  /// candidate was rejected (see `candidates` for reasons).
  GenerateResult generate(const Dataset& ds, const GenerateOptions& options = {});
  GenerateResult generate(const Dataset& ds, std::vector<MetaphorCandidate> candidates,
                          const GenerateOptions& options);

  std::vector<MetaphorCandidate> find_candidates(const Dataset& ds, const GenerateOptions& options,
                                                 std::vector<std::string>* warnings = nullptr);

  /// Element list, mapping space (pins applied) and score table for one
  /// image. Throws the metaphor errors and Error{UnsatisfiablePin}.
  std::shared_ptr<PreparedCandidate> prepare(const Dataset& ds, const semantics::ImportanceTable& importance,
                                             const MetaphorCandidate& candidate, const GenerateOptions& options);

  RewardConfig reward_config(const GenerateOptions& options) const;
  RewardEvaluator evaluator(const PreparedCandidate& prepared, const Dataset& ds,
                            const GenerateOptions& options) const;

  semantics::TextEmbeddingBackend& text() { return *text_; }
  const RegionTable& regions() const { return *regions_; }
  const EngineConfig& config() const { return config_; }

 private:
  EngineConfig config_;
  std::shared_ptr<semantics::TextEmbeddingBackend> text_;
  std::shared_ptr<semantics::RelevanceBackend> vision_;
  const RegionTable* regions_;
};

nlohmann::json to_json(const MappingSolution& s, const MappingSpace& space);
nlohmann::json to_json(const CandidateReport& r);
/// Summary of a result without the SVG: pairs, reward breakdown, alternatives.
nlohmann::json result_summary(const GenerateItem& item);
/// Mapping document written next to exported scenes.
nlohmann::json mapping_document(const GenerateItem& item, const Dataset& ds);

/// Files of an export bundle in a fixed order: scene.svg, legend.svg,
/// mapping.json, then elements/element-<j>.svg per essential element.
std::vector<std::pair<std::string, std::string>> bundle_files(const GenerateItem& item, const Dataset& ds);

/// POSIX ustar archive of the given files.
std::string make_tar(const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace metaglyph
