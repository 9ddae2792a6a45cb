#include "metaglyph/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "metaglyph/error.hpp"
#include "metaglyph/kernels.hpp"
#include "metaglyph/metaphor.hpp"
#include "metaglyph/util.hpp"

namespace metaglyph::semantics {

namespace {

const char* const kStopwords[] = {"a", "an", "and", "at", "by", "for", "in", "of", "on", "or", "per", "the", "to", "with"};

bool is_stopword(const std::string& t) {
  return std::any_of(std::begin(kStopwords), std::end(kStopwords), [&](const char* s) { return t == s; });
}

// Folds two-byte UTF-8 Latin-1 letters onto ASCII; other multibyte input is dropped.
std::string ascii_fold(std::string_view text) {
  static constexpr const char* kFold =
      "AAAAAAACEEEEIIII"  // C3 80-8F
      "DNOOOOOxOUUUUYPs"  // C3 90-9F
      "aaaaaaaceeeeiiii"  // C3 A0-AF
      "dnooooo/ouuuuypy";  // C3 B0-BF
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c == 0xC3 && i + 1 < text.size()) {
      const auto d = static_cast<unsigned char>(text[i + 1]);
      if (d >= 0x80 && d <= 0xBF) out += kFold[d - 0x80];
      ++i;
    } else {
      out += ' ';
      while (i + 1 < text.size() && (static_cast<unsigned char>(text[i + 1]) & 0xC0) == 0x80) ++i;
    }
  }
  return out;
}

std::string stem(std::string t) {
  if (t.size() > 3 && t.back() == 's' && t[t.size() - 2] != 's') t.pop_back();
  return t;
}

void add_feature(Vector& v, std::string_view feature, double weight) {
  const std::uint64_t h = util::fnv1a64(feature);
  const double sign = (h >> 63) ? -1.0 : 1.0;
  v[h % v.size()] += sign * weight;
}

Vector normalized(Vector v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0)
    for (double& x : v) x /= n;
  return v;
}

}  // namespace

double cosine(const Vector& a, const Vector& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0 || nb <= 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<std::string> normalize_tokens(std::string_view text) {
  const std::string folded = ascii_fold(text);
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < folded.size(); ++i) {
    const auto c = static_cast<unsigned char>(folded[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (i > 0 && !cur.empty()) {
      const auto p = static_cast<unsigned char>(folded[i - 1]);
      const bool camel = std::isupper(c) && std::islower(p);
      const bool acronym_end = std::isupper(c) && std::isupper(p) && i + 1 < folded.size() &&
                               std::islower(static_cast<unsigned char>(folded[i + 1]));
      const bool digit_edge = (std::isdigit(c) != 0) != (std::isdigit(p) != 0);
      if (camel || acronym_end || digit_edge) flush();
    }
    cur += static_cast<char>(std::tolower(c));
  }
  flush();
  if (out.empty()) throw Error(ErrorCode::InvalidRequest, "text is empty after normalization");
  return out;
}

LexicalBackend::LexicalBackend(std::size_t dims, double head_weight) : dims_(dims), head_weight_(head_weight) {}

Vector LexicalBackend::embed(std::string_view text) {
  auto tokens = normalize_tokens(text);
  std::vector<std::string> content;
  for (auto& t : tokens)
    if (!is_stopword(t)) content.push_back(stem(t));
  if (content.empty())
    for (auto& t : tokens) content.push_back(stem(t));

  Vector out(dims_, 0.0);
  for (std::size_t k = 0; k < content.size(); ++k) {
    const std::string& tok = content[k];
    Vector tv(dims_, 0.0);
    add_feature(tv, "w|" + tok, 1.0);
    const std::string padded = "^" + tok + "$";
    if (padded.size() >= 3) {
      const std::size_t n = padded.size() - 2;
      const double w = 0.8 / std::sqrt(static_cast<double>(n));
      for (std::size_t i = 0; i < n; ++i) add_feature(tv, "t|" + padded.substr(i, 3), w);
    }
    tv = normalized(std::move(tv));
    const double weight = k + 1 == content.size() ? head_weight_ : 1.0;
    for (std::size_t i = 0; i < dims_; ++i) out[i] += weight * tv[i];
  }
  return normalized(std::move(out));
}

EmbeddingTableBackend EmbeddingTableBackend::from_file(const std::filesystem::path& path) {
  return from_string(util::read_file(path), "table:" + path.filename().string());
}

EmbeddingTableBackend EmbeddingTableBackend::from_string(std::string_view text, std::string name) {
  EmbeddingTableBackend b;
  b.name_ = std::move(name);
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    Vector v;
    double x;
    while (ls >> x) v.push_back(x);
    // word2vec text files may start with a "<count> <dims>" header.
    if (first && v.size() == 1 && std::all_of(token.begin(), token.end(), ::isdigit)) {
      first = false;
      continue;
    }
    first = false;
    if (v.empty()) continue;
    if (b.dims_ == 0) b.dims_ = v.size();
    if (v.size() != b.dims_)
      throw Error(ErrorCode::ParseError, "embedding table row for '" + token + "' has the wrong dimensionality");
    for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    b.table_.emplace(std::move(token), std::move(v));
  }
  if (b.dims_ == 0) throw Error(ErrorCode::ParseError, "embedding table is empty");
  return b;
}

Vector EmbeddingTableBackend::embed(std::string_view text) {
  Vector out(dims_, 0.0);
  std::size_t known = 0;
  for (const auto& tok : normalize_tokens(text)) {
    auto it = table_.find(tok);
    if (it == table_.end()) it = table_.find(stem(tok));
    if (it == table_.end()) continue;
    for (std::size_t i = 0; i < dims_; ++i) out[i] += it->second[i];
    ++known;
  }
  if (known == 0) {
    ++oov_warnings_;
    return out;
  }
  for (double& x : out) x /= static_cast<double>(known);
  return out;
}

CachedEmbeddingBackend::CachedEmbeddingBackend(std::shared_ptr<TextEmbeddingBackend> inner)
    : inner_(std::move(inner)) {}

Vector CachedEmbeddingBackend::embed(std::string_view text) {
  const std::uint64_t key = util::fnv1a64(text, util::fnv1a64(inner_->name()));
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  Vector v;
  if (inner_->reentrant()) {
    v = inner_->embed(text);
  } else {
    std::lock_guard call(call_mu_);
    v = inner_->embed(text);
  }
  std::unique_lock lock(mu_);
  return cache_.emplace(key, std::move(v)).first->second;
}

std::size_t CachedEmbeddingBackend::cache_size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

std::shared_ptr<TextEmbeddingBackend> make_text_backend(std::string_view spec) {
  std::shared_ptr<TextEmbeddingBackend> inner;
  if (spec.empty() || spec == "lexical") {
    inner = std::make_shared<LexicalBackend>();
  } else if (spec.rfind("table:", 0) == 0) {
    inner = std::make_shared<EmbeddingTableBackend>(EmbeddingTableBackend::from_file(std::string(spec.substr(6))));
  } else if (spec.rfind("remote:", 0) == 0) {
    inner = std::make_shared<RemoteEmbeddingBackend>(RemoteConfig{std::string(spec.substr(7)), std::chrono::milliseconds(5000), "METAGLYPH_EMBED_API_KEY"});
  } else {
    throw Error(ErrorCode::InvalidRequest, "unknown text backend '" + std::string(spec) + "'");
  }
  return std::make_shared<CachedEmbeddingBackend>(std::move(inner));
}

double text_similarity(TextEmbeddingBackend& backend, std::string_view a, std::string_view b) {
  return cosine(backend.embed(a), backend.embed(b));
}

// ---------------------------------------------------------------------------

std::string EntryId::str() const { return (kind == Kind::Dimension ? "d" : "g") + std::to_string(index); }

std::optional<EntryId> EntryId::parse(std::string_view s) {
  if (s.size() < 2 || (s[0] != 'd' && s[0] != 'g')) return std::nullopt;
  std::size_t v = 0;
  for (char c : s.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return EntryId{s[0] == 'd' ? Kind::Dimension : Kind::Group, v};
}

std::vector<double> min_max_normalize(const std::vector<double>& raw) {
  if (raw.empty()) return {};
  auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  std::vector<double> out(raw.size(), 1.0);
  if (raw.size() < 2 || range <= 0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::clamp((raw[i] - *lo) / range, 0.0, 1.0);
  return out;
}

ImportanceTable importance_score(const Dataset& ds, TextEmbeddingBackend& backend) {
  ImportanceTable t;
  const Vector topic = backend.embed(ds.topic());
  for (const auto& d : ds.dimensions()) t.raw_dimensions.push_back(cosine(backend.embed(d.name), topic));
  for (const auto& g : ds.groups()) {
    double sum = 0.0;
    for (auto m : g.members) sum += t.raw_dimensions.at(m);
    t.raw_groups.push_back(sum / static_cast<double>(g.members.size()));
  }
  std::vector<double> all = t.raw_dimensions;
  all.insert(all.end(), t.raw_groups.begin(), t.raw_groups.end());
  const auto norm = min_max_normalize(all);
  t.dimensions.assign(norm.begin(), norm.begin() + static_cast<std::ptrdiff_t>(t.raw_dimensions.size()));
  t.groups.assign(norm.begin() + static_cast<std::ptrdiff_t>(t.raw_dimensions.size()), norm.end());

  struct Key {
    EntryId id;
    double score;
    std::size_t column;
  };
  std::vector<Key> keys;
  for (std::size_t i = 0; i < t.dimensions.size(); ++i) keys.push_back({{EntryId::Kind::Dimension, i}, t.dimensions[i], i});
  for (std::size_t g = 0; g < t.groups.size(); ++g) {
    const auto& m = ds.groups()[g].members;
    keys.push_back({{EntryId::Kind::Group, g}, t.groups[g], *std::min_element(m.begin(), m.end())});
  }
  std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.column != b.column) return a.column < b.column;
    return a.id < b.id;
  });
  for (const auto& k : keys) t.ranking.push_back(k.id);
  return t;
}

// ---------------------------------------------------------------------------

RelevanceScorer::RelevanceScorer(const ElementList& list, TextEmbeddingBackend& text, RelevanceBackend* vision,
                                 std::size_t resolution)
    : list_(list), text_(text), vision_(vision), resolution_(resolution) {}

const std::vector<std::uint8_t>& RelevanceScorer::mask(std::size_t element) {
  std::lock_guard lock(mu_);
  if (auto it = masks_.find(element); it != masks_.end()) return it->second;
  const Rect frame = list_.whole_image.bbox;
  std::vector<std::uint8_t> m;
  if (element == 0) {
    m.assign(resolution_ * resolution_, 0);
    for (const auto& e : list_.elements) {
      const auto part = kernels::fill_mask(e.outline, {frame, resolution_, resolution_, e.style.stroke_width});
      for (std::size_t i = 0; i < m.size(); ++i) m[i] |= part[i];
    }
  } else {
    const Element& e = list_.element(element);
    m = kernels::fill_mask(e.outline, {frame, resolution_, resolution_, e.style.stroke_width});
  }
  return masks_.emplace(element, std::move(m)).first->second;
}

double RelevanceScorer::mean_over_element(const Heatmap& heatmap, std::size_t element) {
  const auto field = kernels::resample_bilinear(heatmap.values, heatmap.width, heatmap.height, resolution_, resolution_);
  const double v = kernels::masked_mean(field, mask(element));
  return std::isnan(v) ? kernels::masked_mean(field, mask(0)) : v;
}

RelevanceResult RelevanceScorer::fallback_score(std::size_t element, std::string_view description,
                                                std::string provenance) {
  const Element& e = list_.element(element);
  if (e.label && !e.label->empty()) {
    double s = 0.5;
    try {
      s = std::clamp(text_similarity(text_, description, *e.label), 0.0, 1.0);
    } catch (const Error&) {
      // labels made only of punctuation normalize to nothing; keep the prior
    }
    return {s, true, provenance + "label-similarity"};
  }
  return {0.5, true, provenance + "uniform-prior"};
}

RelevanceResult RelevanceScorer::score(RelevanceTarget target, std::string_view description, DataType type) {
  std::size_t element = target.element;
  if (target.kind == RelevanceTarget::Kind::Axis) {
    if (type == DataType::Temporal || type == DataType::Geospatial) return {1.0, false, "axis:semantic-placement"};
    element = 0;
  }
  if (!vision_) return fallback_score(element, description, "fallback:");

  std::vector<float> field;
  {
    std::unique_lock lock(mu_);
    if (vision_failure_) {
      lock.unlock();
      return fallback_score(element, description, "fallback(" + *vision_failure_ + "):");
    }
    if (auto it = heatmaps_.find(description); it != heatmaps_.end()) field = it->second;
  }
  if (field.empty()) {
    try {
      const RgbImage img = rasterize(list_, resolution_, resolution_);
      Heatmap h = vision_->relevance(img, description);
      if (h.width == 0 || h.height == 0 || h.values.size() != h.width * h.height)
        throw Error(ErrorCode::BackendUnavailable, "relevance backend returned an empty grid");
      for (auto& v : h.values) v = std::clamp(std::isfinite(v) ? v : 0.0f, 0.0f, 1.0f);
      field = kernels::resample_bilinear(h.values, h.width, h.height, resolution_, resolution_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BackendUnavailable) throw;
      std::lock_guard lock(mu_);
      vision_failure_ = e.what();
      return fallback_score(element, description, "fallback(" + std::string(e.what()) + "):");
    }
    std::lock_guard lock(mu_);
    heatmaps_.emplace(std::string(description), field);
  }
  double v = kernels::masked_mean(field, mask(element));
  if (std::isnan(v)) v = kernels::masked_mean(field, mask(0));
  if (std::isnan(v)) v = 0.0;
  return {std::clamp(v, 0.0, 1.0), false, vision_->name()};
}

}  // namespace metaglyph::semantics
