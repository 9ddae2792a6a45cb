#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaglyph/engine.hpp"
#include "metaglyph/error.hpp"

namespace httplib {
class Server;
}

namespace metaglyph::service {

struct GenerateLimits {
  std::size_t candidates{5};
  std::size_t iterations{2000};
  std::chrono::milliseconds per_candidate{2000};
  std::chrono::milliseconds total{10000};
};

struct StoredResult {
  std::string id;
  std::size_t rank{0};
  std::string candidate;
  double reward{0};
  nlohmann::json summary;
  std::string svg;
  std::vector<std::pair<std::string, std::string>> files;  // bundle members
  std::vector<std::size_t> elements;                        // essential element indices
};

struct Session {
  std::string id;
  std::uint64_t revision{0};
  std::uint64_t seed{0};
  Dataset dataset;
  std::vector<DataGroup> proposed_groups;
  std::vector<Pin> pins;
  GenerateLimits limits;
  bool generated{false};
  std::vector<StoredResult> results;  // reward descending
  nlohmann::json candidates = nlohmann::json::array();
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const Session& s);
Session session_from_json(const nlohmann::json& j);

/// Revisioned key-value storage for serialized sessions.
class SessionStore {
 public:
  virtual ~SessionStore() = default;
  virtual std::optional<std::string> load(const std::string& id) = 0;
  virtual void insert(const std::string& id, std::uint64_t revision, const std::string& data) = 0;
  /// Replace the record only if it is still at `expected`; false otherwise.
  virtual bool compare_and_set(const std::string& id, std::uint64_t expected, std::uint64_t revision,
                               const std::string& data) = 0;
  virtual std::size_t purge_expired() = 0;
};

class MemorySessionStore final : public SessionStore {
 public:
  explicit MemorySessionStore(std::chrono::seconds ttl = std::chrono::hours(24)) : ttl_(ttl) {}
  std::optional<std::string> load(const std::string& id) override;
  void insert(const std::string& id, std::uint64_t revision, const std::string& data) override;
  bool compare_and_set(const std::string& id, std::uint64_t expected, std::uint64_t revision,
                       const std::string& data) override;
  std::size_t purge_expired() override;

 private:
  struct Record {
    std::uint64_t revision;
    std::string data;
    std::chrono::system_clock::time_point expires;
  };
  std::chrono::seconds ttl_;
  std::mutex mu_;
  std::map<std::string, Record> records_;
};

/// SQLite-backed store: one table keyed by session id with an expiry column.
class SqliteSessionStore final : public SessionStore {
 public:
  explicit SqliteSessionStore(const std::filesystem::path& path, std::chrono::seconds ttl = std::chrono::hours(24));
  ~SqliteSessionStore() override;
  SqliteSessionStore(const SqliteSessionStore&) = delete;
  SqliteSessionStore& operator=(const SqliteSessionStore&) = delete;

  std::optional<std::string> load(const std::string& id) override;
  void insert(const std::string& id, std::uint64_t revision, const std::string& data) override;
  bool compare_and_set(const std::string& id, std::uint64_t expected, std::uint64_t revision,
                       const std::string& data) override;
  std::size_t purge_expired() override;

 private:
  void exec(const char* sql);
  struct Db;
  std::unique_ptr<Db> db_;
  std::chrono::seconds ttl_;
  std::mutex mu_;
};

struct ServiceConfig {
  std::string host{"127.0.0.1"};
  int port{8080};
  std::string cors_origin{"*"};
  std::optional<std::filesystem::path> corpus_dir;
  std::optional<std::string> image_api_url;
  std::string text_backend{"lexical"};
  std::optional<std::string> vision_url;
  std::optional<std::filesystem::path> store_path;  // in-memory when unset
  std::chrono::seconds session_ttl{std::chrono::hours(24)};
  std::uint64_t default_seed{0};
  GenerateLimits limits{};
  std::ptrdiff_t max_concurrent_generations{2};
  std::size_t max_upload_bytes{16u << 20};
};

/// Reads an optional JSON config file, then applies METAGLYPH_CORPUS_DIR,
/// METAGLYPH_SEED and METAGLYPH_IMG_API_URL overrides. The image API key is
/// read by the fetcher from METAGLYPH_IMG_API_KEY.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file);

/// Engine wired with the configured corpus, backends and image API.
std::shared_ptr<Engine> make_engine(const ServiceConfig& config);
std::shared_ptr<SessionStore> make_store(const ServiceConfig& config);

/// Transport-independent session API. Mutations take an optional expected
/// revision ("revision" in the body) and fail with Error{StaleRevision} when
/// it no longer matches.
class Service {
 public:
  Service(std::shared_ptr<Engine> engine, std::shared_ptr<SessionStore> store, ServiceConfig config = {});

  nlohmann::json create_session(std::string_view bytes, const std::string& filename);
  nlohmann::json generate(const std::string& id, const nlohmann::json& body);
  nlohmann::json results(const std::string& id);
  nlohmann::json edit_mappings(const std::string& id, const nlohmann::json& body);
  nlohmann::json set_groups(const std::string& id, const nlohmann::json& body);

  struct Export {
    std::string content_type;
    std::string filename;
    std::string body;
  };
  Export export_result(const std::string& id, const std::string& result_id, const std::string& format);

  Session load(const std::string& id);
  const ServiceConfig& config() const { return config_; }

 private:
  std::shared_ptr<std::mutex> session_lock(const std::string& id);
  void check_revision(const Session& s, const nlohmann::json& body) const;
  void commit(Session& s, std::uint64_t expected);
  void run_generation(Session& s);
  nlohmann::json results_json(const Session& s) const;

  std::shared_ptr<Engine> engine_;
  std::shared_ptr<SessionStore> store_;
  ServiceConfig config_;
  std::mutex locks_mu_;
  std::map<std::string, std::weak_ptr<std::mutex>> locks_;
  std::counting_semaphore<64> generation_slots_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);
nlohmann::json error_body(const Error& e);

/// Registers the REST routes (and CORS handling) on `server`.
void install_routes(httplib::Server& server, Service& service);

}  // namespace metaglyph::service
