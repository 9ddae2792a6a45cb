#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "metaglyph/geometry.hpp"
#include "metaglyph/svg.hpp"

namespace metaglyph {

struct MetaphorCandidate {
  enum class Source { LocalCorpus, Remote };
  std::string id;  // file name for local candidates, provider id for remote ones
  Source source{Source::LocalCorpus};
  std::string svg_bytes;
  std::vector<std::string> keywords;
};

struct Element {
  std::size_t index{0};  // 0 is the whole image
  svg::ShapeKind kind{svg::ShapeKind::Path};
  svg::Path path;
  svg::Style style;
  std::vector<Polyline> outline;  // flattened
  Point center{};                 // bbox centroid
  double area{0};
  Rect bbox;
  bool augmentable{false};
  std::optional<std::string> label;
  bool removed{false};
  std::optional<std::pair<double, double>> radii;
};

enum class Structure { Radial, NonRadial };
std::string_view to_string(Structure s);

struct StructureInfo {
  Structure structure{Structure::NonRadial};
  double slope{0};          // non-radial only; +inf for a vertical arrangement
  double max_deviation{0};  // perpendicular deviation of centers from the fitted line
  bool low_collinearity{false};
};

struct ElementList {
  std::vector<Element> elements;  // indices 1..n, removed ones included
  Element whole_image;            // index 0
  StructureInfo structure;
  std::string source_id;
  Rect canvas;

  /// j = 0 returns the whole image.
  const Element& element(std::size_t j) const { return j == 0 ? whole_image : elements.at(j - 1); }
  std::vector<std::size_t> essential() const;
  std::vector<std::size_t> removed() const;
  std::size_t size() const { return elements.size(); }
};

struct Segmentation {
  std::vector<Element> elements;
  Element whole_image;
  Rect canvas;
};

struct MetaphorOptions {
  double min_area_fraction{0.005};
  std::size_t min_essential{2};
  std::size_t max_essential{8};
  double max_background_fraction{0.9};
  double flatten_tolerance{0.1};
  double proximity_fraction{0.05};  // of the whole-image bbox diagonal
};

/// One element per drawable leaf, transforms flattened into absolute
/// coordinates. Throws Error{ParseError | UnsupportedFeature}.
Segmentation segment(const MetaphorCandidate& candidate, double flatten_tolerance = 0.1);

/// Area of a flattened outline: closed rings by the shoelace formula with
/// nested rings subtracted, open subpaths as length × stroke width.
double outline_area(const std::vector<Polyline>& outline, double stroke_width);

struct PruneResult {
  std::vector<std::size_t> essential;  // element indices (1-based)
  std::vector<std::size_t> removed;
};

/// Marks tiny overlapped elements removed. Throws Error{AllPruned}.
PruneResult prune(std::vector<Element>& elements, const Element& whole_image, double min_area_fraction);

StructureInfo detect_structure(const std::vector<const Element*>& essential, const Element& whole_image,
                               double proximity_fraction = 0.05);

/// True iff the element passes the circularity test.
bool is_circular(const Element& e);
void tag_augmentable(std::vector<Element*> essential);

/// segment → prune → detect_structure → tag_augmentable, then the
/// essential-count and background guards.
ElementList build_element_list(const MetaphorCandidate& candidate, const MetaphorOptions& options = {});

// ---------------------------------------------------------------------------
// Candidate acquisition

/// A directory of .svg files with an optional tags.json sidecar mapping
/// file name → keyword list.
class LocalCorpus {
 public:
  explicit LocalCorpus(std::filesystem::path dir);

  struct Entry {
    std::string file;
    std::vector<std::string> tags;
  };

  const std::filesystem::path& dir() const { return dir_; }
  std::vector<Entry> entries() const;
  MetaphorCandidate load(const std::string& file) const;

  /// Candidates whose tags or file-name tokens overlap the query tokens,
  /// best overlap first. With include_unmatched the rest follow in file order.
  std::vector<MetaphorCandidate> search(const std::vector<std::string>& query_tokens, std::size_t limit,
                                        bool include_unmatched) const;

  void add(const std::filesystem::path& svg_file, const std::vector<std::string>& tags);
  void set_tags(const std::string& file, const std::vector<std::string>& tags);

 private:
  std::filesystem::path dir_;
};

class RemoteFetcher {
 public:
  virtual ~RemoteFetcher() = default;
  /// Throws Error{RemoteUnavailable} when the provider cannot be reached.
  virtual std::vector<MetaphorCandidate> fetch(const std::string& query, std::size_t limit) = 0;
};

struct HttpFetcherConfig {
  std::string base_url;  // e.g. http://host:port
  std::string search_path{"/search"};
  std::string api_key_env{"METAGLYPH_IMG_API_KEY"};
  std::optional<std::filesystem::path> cache_dir;
  std::chrono::milliseconds timeout{5000};
  std::chrono::milliseconds min_interval{200};
};

/// Keyword-search client for an SVG repository REST endpoint:
///   GET {search_path}?q=<query>&limit=<n>  →  {"results":[{"id","svg","keywords"}]}
/// Responses are cached on disk keyed by query hash.
class HttpSvgFetcher : public RemoteFetcher {
 public:
  explicit HttpSvgFetcher(HttpFetcherConfig config);
  std::vector<MetaphorCandidate> fetch(const std::string& query, std::size_t limit) override;

 private:
  HttpFetcherConfig config_;
  std::mutex mu_;  // one request at a time per host
  std::chrono::steady_clock::time_point last_request_{};
};

struct ImageSearchResult {
  std::vector<MetaphorCandidate> candidates;
  std::vector<std::string> warnings;
};

struct ImageSearchOptions {
  bool include_unmatched_local{true};
};

/// Local candidates first, then remote ones queried with "<topic> icon";
/// byte-identical documents are deduplicated. Throws Error{NoSource}.
ImageSearchResult search_images(const std::string& topic, const std::vector<std::string>& keywords, std::size_t limit,
                                const LocalCorpus* corpus, RemoteFetcher* remote,
                                const ImageSearchOptions& options = {});

/// Lowercased alphanumeric tokens, camelCase and snake_case split.
std::vector<std::string> keyword_tokens(std::string_view text);

}  // namespace metaglyph
