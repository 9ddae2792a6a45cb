#include <httplib.h>

#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "metaglyph/error.hpp"
#include "metaglyph/metaphor.hpp"
#include "metaglyph/util.hpp"

namespace metaglyph {

namespace {

std::vector<MetaphorCandidate> parse_results(const std::string& body, std::size_t limit) {
  std::vector<MetaphorCandidate> out;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::RemoteUnavailable, std::string("malformed image search response: ") + e.what());
  }
  if (!j.contains("results") || !j["results"].is_array()) return out;
  for (const auto& r : j["results"]) {
    if (out.size() >= limit) break;
    if (!r.contains("svg") || !r["svg"].is_string()) continue;
    MetaphorCandidate c;
    c.source = MetaphorCandidate::Source::Remote;
    c.id = r.value("id", std::string{});
    c.svg_bytes = r["svg"].get<std::string>();
    if (c.id.empty()) c.id = "remote-" + util::hex64(util::fnv1a64(c.svg_bytes));
    if (r.contains("keywords")) c.keywords = r["keywords"].get<std::vector<std::string>>();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

HttpSvgFetcher::HttpSvgFetcher(HttpFetcherConfig config) : config_(std::move(config)) {}

std::vector<MetaphorCandidate> HttpSvgFetcher::fetch(const std::string& query, std::size_t limit) {
  const std::string key = util::hex64(util::fnv1a64(config_.base_url + "\n" + query + "\n" + std::to_string(limit)));
  std::optional<std::filesystem::path> cache_file;
  if (config_.cache_dir) {
    cache_file = *config_.cache_dir / (key + ".json");
    if (std::filesystem::exists(*cache_file)) return parse_results(util::read_file(*cache_file), limit);
  }

  std::string body;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    if (last_request_ != std::chrono::steady_clock::time_point{} && now - last_request_ < config_.min_interval)
      std::this_thread::sleep_for(config_.min_interval - (now - last_request_));
    last_request_ = std::chrono::steady_clock::now();

    httplib::Client client(config_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (const char* api_key = std::getenv(config_.api_key_env.c_str()); api_key && *api_key)
      headers.emplace("Authorization", std::string("Bearer ") + api_key);
    httplib::Params params{{"q", query}, {"limit", std::to_string(limit)}};
    auto res = client.Get(config_.search_path, params, headers);
    if (!res) throw Error(ErrorCode::RemoteUnavailable, "image search request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(ErrorCode::RemoteUnavailable, "image search returned HTTP " + std::to_string(res->status));
    body = res->body;
  }
  auto results = parse_results(body, limit);
  if (cache_file) util::write_file(*cache_file, body);
  return results;
}

}  // namespace metaglyph
