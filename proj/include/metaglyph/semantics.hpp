#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "metaglyph/dataset.hpp"
#include "metaglyph/raster.hpp"

namespace metaglyph {
struct ElementList;
}

namespace metaglyph::semantics {

using Vector = std::vector<double>;

/// Cosine similarity; 0 when either vector is zero.
double cosine(const Vector& a, const Vector& b);

/// Lowercase + ASCII-fold, split on non-alphanumerics, camelCase and
/// snake_case. Throws Error{InvalidRequest} when nothing remains.
std::vector<std::string> normalize_tokens(std::string_view text);

class TextEmbeddingBackend {
 public:
  virtual ~TextEmbeddingBackend() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimensionality() const = 0;
  virtual Vector embed(std::string_view text) = 0;
  /// Backends that cannot take concurrent calls return false; callers then
  /// funnel requests through a per-backend lock.
  virtual bool reentrant() const { return true; }
};

/// Deterministic bag-of-tokens embedding. Each token contributes a unit
/// vector built from a hashed word feature plus hashed character trigrams;
/// the last content token (the head of an English noun compound) is weighted
/// up so "math score" and "music score" land close together.
class LexicalBackend final : public TextEmbeddingBackend {
 public:
  explicit LexicalBackend(std::size_t dims = 512, double head_weight = 2.5);
  std::string name() const override { return "lexical-v1"; }
  std::size_t dimensionality() const override { return dims_; }
  Vector embed(std::string_view text) override;

 private:
  std::size_t dims_;
  double head_weight_;
};

/// Word vectors from a text file with lines "token v1 v2 ... vD"; a phrase is
/// the mean of its known word vectors. All-OOV phrases embed to the zero
/// vector and bump oov_warnings().
class EmbeddingTableBackend final : public TextEmbeddingBackend {
 public:
  static EmbeddingTableBackend from_file(const std::filesystem::path& path);
  static EmbeddingTableBackend from_string(std::string_view text, std::string name = "table");

  std::string name() const override { return name_; }
  std::size_t dimensionality() const override { return dims_; }
  Vector embed(std::string_view text) override;
  std::size_t oov_warnings() const { return oov_warnings_; }

 private:
  EmbeddingTableBackend() = default;
  std::string name_;
  std::size_t dims_{0};
  std::unordered_map<std::string, Vector> table_;
  std::size_t oov_warnings_{0};
};

struct RemoteConfig {
  std::string url;  // http://host:port/path
  std::chrono::milliseconds timeout{5000};
  std::string api_key_env;
};

/// POST {"text": ...} → {"vector": [...]}. Throws Error{BackendUnavailable}.
class RemoteEmbeddingBackend final : public TextEmbeddingBackend {
 public:
  explicit RemoteEmbeddingBackend(RemoteConfig config, std::size_t dims = 0);
  std::string name() const override { return "remote:" + config_.url; }
  std::size_t dimensionality() const override { return dims_; }
  Vector embed(std::string_view text) override;

 private:
  RemoteConfig config_;
  std::size_t dims_;
};

/// Memoizes another backend keyed by (backend name, text hash). Safe for
/// concurrent use; calls into a non-reentrant inner backend are serialized.
class CachedEmbeddingBackend final : public TextEmbeddingBackend {
 public:
  explicit CachedEmbeddingBackend(std::shared_ptr<TextEmbeddingBackend> inner);
  std::string name() const override { return inner_->name(); }
  std::size_t dimensionality() const override { return inner_->dimensionality(); }
  Vector embed(std::string_view text) override;
  std::size_t cache_size() const;

 private:
  std::shared_ptr<TextEmbeddingBackend> inner_;
  mutable std::shared_mutex mu_;
  std::mutex call_mu_;
  std::unordered_map<std::uint64_t, Vector> cache_;
};

/// lexical | table:PATH | remote:URL
std::shared_ptr<TextEmbeddingBackend> make_text_backend(std::string_view spec);

double text_similarity(TextEmbeddingBackend& backend, std::string_view a, std::string_view b);

// ---------------------------------------------------------------------------
// Importance

/// A tree depth: either one dimension or one group.
struct EntryId {
  enum class Kind { Dimension, Group };
  Kind kind{Kind::Dimension};
  std::size_t index{0};

  std::string str() const;  // "d3" / "g0"
  static std::optional<EntryId> parse(std::string_view s);
  friend auto operator<=>(const EntryId&, const EntryId&) = default;
};

struct ImportanceTable {
  std::vector<double> dimensions;  // normalized, per column
  std::vector<double> groups;      // normalized, per group
  std::vector<double> raw_dimensions;
  std::vector<double> raw_groups;
  std::vector<EntryId> ranking;  // every dimension and group, score descending

  double score(EntryId id) const {
    return id.kind == EntryId::Kind::Dimension ? dimensions.at(id.index) : groups.at(id.index);
  }
};

/// Raw score = cosine(name, topic); groups take the mean of their members;
/// everything is min-max normalized together. A single entry, or entries
/// that all tie, get 1.
ImportanceTable importance_score(const Dataset& ds, TextEmbeddingBackend& backend);

/// Min-max normalization used by importance_score, exposed for testing.
std::vector<double> min_max_normalize(const std::vector<double>& raw);

// ---------------------------------------------------------------------------
// Relevance

struct Heatmap {
  std::size_t width{0};
  std::size_t height{0};
  std::vector<float> values;  // row-major, [0,1]

  static Heatmap uniform(std::size_t w, std::size_t h, float v) { return {w, h, std::vector<float>(w * h, v)}; }
};

class RelevanceBackend {
 public:
  virtual ~RelevanceBackend() = default;
  virtual std::string name() const = 0;
  /// Relevance of every pixel of `image` to `text`; any grid size.
  virtual Heatmap relevance(const RgbImage& image, std::string_view text) = 0;
  virtual bool reentrant() const { return true; }
};

/// POST {"text", "image_png" (base64)} → {"width", "height", "values"}.
/// Throws Error{BackendUnavailable}.
class RemoteRelevanceBackend final : public RelevanceBackend {
 public:
  explicit RemoteRelevanceBackend(RemoteConfig config) : config_(std::move(config)) {}
  std::string name() const override { return "remote:" + config_.url; }
  Heatmap relevance(const RgbImage& image, std::string_view text) override;

 private:
  RemoteConfig config_;
};

struct RelevanceTarget {
  enum class Kind { Element, Axis };
  Kind kind{Kind::Element};
  std::size_t element{0};  // Element only; 0 is the whole image

  static RelevanceTarget on_element(std::size_t j) { return {Kind::Element, j}; }
  static RelevanceTarget axis() { return {Kind::Axis, 0}; }
};

struct RelevanceResult {
  double score{0};
  bool fallback{false};
  std::string provenance;
};

/// Per-candidate relevance scorer. Element masks are rasterized once at
/// `resolution`² over the whole-image bbox; heatmaps are cached per
/// description. Without a vision backend (or when it fails) scores fall back
/// to label similarity, or 0.5 for unlabeled elements.
class RelevanceScorer {
 public:
  RelevanceScorer(const ElementList& list, TextEmbeddingBackend& text, RelevanceBackend* vision = nullptr,
                  std::size_t resolution = 256);

  RelevanceResult score(RelevanceTarget target, std::string_view description, DataType type);

  /// Mean of `heatmap` (resampled to the mask grid) over element j's mask.
  double mean_over_element(const Heatmap& heatmap, std::size_t element);
  const std::vector<std::uint8_t>& mask(std::size_t element);
  std::size_t resolution() const { return resolution_; }

 private:
  RelevanceResult fallback_score(std::size_t element, std::string_view description, std::string provenance);

  const ElementList& list_;
  TextEmbeddingBackend& text_;
  RelevanceBackend* vision_;
  std::size_t resolution_;
  std::mutex mu_;
  std::map<std::size_t, std::vector<std::uint8_t>> masks_;
  std::map<std::string, std::vector<float>, std::less<>> heatmaps_;  // resampled to resolution²
  std::optional<std::string> vision_failure_;
};

}  // namespace metaglyph::semantics
