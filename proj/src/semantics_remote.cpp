#include <httplib.h>

#include <cstdlib>

#include <json.hpp>

#include "metaglyph/error.hpp"
#include "metaglyph/semantics.hpp"
#include "metaglyph/util.hpp"

namespace metaglyph::semantics {

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_json(const RemoteConfig& config, const nlohmann::json& body) {
  const auto [origin, path] = split_url(config.url);
  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!config.api_key_env.empty())
    if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw Error(ErrorCode::BackendUnavailable, "backend request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(ErrorCode::BackendUnavailable, "backend returned HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, std::string("malformed backend response: ") + e.what());
  }
}

}  // namespace

RemoteEmbeddingBackend::RemoteEmbeddingBackend(RemoteConfig config, std::size_t dims)
    : config_(std::move(config)), dims_(dims) {}

Vector RemoteEmbeddingBackend::embed(std::string_view text) {
  normalize_tokens(text);  // same precondition as the local backends
  const auto j = post_json(config_, {{"text", std::string(text)}});
  if (!j.contains("vector") || !j["vector"].is_array())
    throw Error(ErrorCode::BackendUnavailable, "embedding response has no vector");
  Vector v = j["vector"].get<Vector>();
  if (dims_ == 0) dims_ = v.size();
  if (v.size() != dims_) throw Error(ErrorCode::BackendUnavailable, "embedding response has the wrong dimensionality");
  return v;
}

Heatmap RemoteRelevanceBackend::relevance(const RgbImage& image, std::string_view text) {
  const auto j = post_json(config_, {{"text", std::string(text)}, {"image_png", util::base64_encode(encode_png(image))}});
  Heatmap h;
  try {
    h.width = j.at("width").get<std::size_t>();
    h.height = j.at("height").get<std::size_t>();
    h.values = j.at("values").get<std::vector<float>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, std::string("malformed relevance response: ") + e.what());
  }
  return h;
}

}  // namespace metaglyph::semantics
