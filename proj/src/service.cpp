#include "metaglyph/service.hpp"

#include <cstdlib>
#include <random>

#include <sqlite3.h>

#include "metaglyph/util.hpp"

namespace metaglyph::service {

namespace {

using SysClock = std::chrono::system_clock;

std::int64_t epoch_seconds(SysClock::time_point t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}() ^
                             static_cast<std::uint64_t>(SysClock::now().time_since_epoch().count())};
  std::lock_guard lock(mu);
  return util::hex64(rng()) + util::hex64(rng());
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

nlohmann::json pin_json(const Pin& p) {
  return {{"entry", p.entry.str()},
          {"target", p.target.str()},
          {"candidate", p.candidate ? nlohmann::json(*p.candidate) : nlohmann::json(nullptr)}};
}

Pin pin_from_json(const nlohmann::json& j) {
  Pin p;
  auto entry = EntryId::parse(j.at("entry").get<std::string>());
  auto target = MappingTarget::parse(j.at("target").get<std::string>());
  if (!entry || !target) throw Error(ErrorCode::InvalidRequest, "malformed pin");
  p.entry = *entry;
  p.target = *target;
  if (j.contains("candidate") && !j["candidate"].is_null()) p.candidate = j["candidate"].get<std::string>();
  return p;
}

nlohmann::json groups_json(const std::vector<DataGroup>& groups) {
  auto out = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t m : g.members) members.push_back("d" + std::to_string(m));
    out.push_back({{"name", g.name}, {"members", members}});
  }
  return out;
}

std::vector<DataGroup> groups_from_json(const nlohmann::json& arr) {
  std::vector<DataGroup> out;
  for (const auto& g : arr) {
    DataGroup grp;
    for (const auto& m : g.at("members")) {
      std::optional<EntryId> id;
      if (m.is_number_unsigned()) id = EntryId{EntryId::Kind::Dimension, m.get<std::size_t>()};
      else id = EntryId::parse(m.get<std::string>());
      if (!id || id->kind != EntryId::Kind::Dimension)
        throw Error(ErrorCode::InvalidGroup, "group members must be dimension ids", m.dump());
      grp.members.push_back(id->index);
    }
    grp.name = g.value("name", std::string{});
    out.push_back(std::move(grp));
  }
  return out;
}

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidRequest, std::string("missing field '") + key + "'");
  return j[key];
}

}  // namespace

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const Session& s) {
  nlohmann::json j;
  j["id"] = s.id;
  j["revision"] = s.revision;
  j["seed"] = s.seed;
  j["dataset"] = metaglyph::to_json(s.dataset);
  j["proposed_groups"] = groups_json(s.proposed_groups);
  auto& pins = j["pins"] = nlohmann::json::array();
  for (const auto& p : s.pins) pins.push_back(pin_json(p));
  j["limits"] = {{"candidates", s.limits.candidates},
                 {"iterations", s.limits.iterations},
                 {"per_candidate_ms", s.limits.per_candidate.count()},
                 {"total_ms", s.limits.total.count()}};
  j["generated"] = s.generated;
  auto& results = j["results"] = nlohmann::json::array();
  for (const auto& r : s.results) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, data] : r.files) files.push_back({name, data});
    results.push_back({{"id", r.id},
                       {"rank", r.rank},
                       {"candidate", r.candidate},
                       {"reward", r.reward},
                       {"summary", r.summary},
                       {"svg", r.svg},
                       {"files", files},
                       {"elements", r.elements}});
  }
  j["candidates"] = s.candidates;
  j["warnings"] = s.warnings;
  return j;
}

Session session_from_json(const nlohmann::json& j) {
  try {
    Session s;
    s.id = j.at("id").get<std::string>();
    s.revision = j.at("revision").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.dataset = dataset_from_json(j.at("dataset"));
    s.proposed_groups = groups_from_json(j.at("proposed_groups"));
    for (std::size_t i = 0; i < s.proposed_groups.size(); ++i)
      s.proposed_groups[i].name = j["proposed_groups"][i].at("name").get<std::string>();
    for (const auto& p : j.at("pins")) s.pins.push_back(pin_from_json(p));
    const auto& l = j.at("limits");
    s.limits.candidates = l.at("candidates").get<std::size_t>();
    s.limits.iterations = l.at("iterations").get<std::size_t>();
    s.limits.per_candidate = std::chrono::milliseconds(l.at("per_candidate_ms").get<std::int64_t>());
    s.limits.total = std::chrono::milliseconds(l.at("total_ms").get<std::int64_t>());
    s.generated = j.at("generated").get<bool>();
    for (const auto& r : j.at("results")) {
      StoredResult sr;
      sr.id = r.at("id").get<std::string>();
      sr.rank = r.at("rank").get<std::size_t>();
      sr.candidate = r.at("candidate").get<std::string>();
      sr.reward = r.at("reward").get<double>();
      sr.summary = r.at("summary");
      sr.svg = r.at("svg").get<std::string>();
      for (const auto& f : r.at("files")) sr.files.emplace_back(f.at(0).get<std::string>(), f.at(1).get<std::string>());
      sr.elements = r.at("elements").get<std::vector<std::size_t>>();
      s.results.push_back(std::move(sr));
    }
    s.candidates = j.at("candidates");
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Internal, "corrupt session record", e.what());
  }
}

// ---------------------------------------------------------------------------
// Stores

std::optional<std::string> MemorySessionStore::load(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  if (it->second.expires <= SysClock::now()) {
    records_.erase(it);
    return std::nullopt;
  }
  return it->second.data;
}

void MemorySessionStore::insert(const std::string& id, std::uint64_t revision, const std::string& data) {
  std::lock_guard lock(mu_);
  records_[id] = {revision, data, SysClock::now() + ttl_};
}

bool MemorySessionStore::compare_and_set(const std::string& id, std::uint64_t expected, std::uint64_t revision,
                                         const std::string& data) {
  std::lock_guard lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end() || it->second.revision != expected) return false;
  it->second = {revision, data, SysClock::now() + ttl_};
  return true;
}

std::size_t MemorySessionStore::purge_expired() {
  std::lock_guard lock(mu_);
  return std::erase_if(records_, [now = SysClock::now()](const auto& kv) { return kv.second.expires <= now; });
}

struct SqliteSessionStore::Db {
  sqlite3* handle{nullptr};
};

namespace {

struct Stmt {
  sqlite3_stmt* s{nullptr};
  Stmt(sqlite3* db, const char* sql) {
    if (sqlite3_prepare_v2(db, sql, -1, &s, nullptr) != SQLITE_OK)
      throw Error(ErrorCode::Internal, "session store query failed", sqlite3_errmsg(db));
  }
  ~Stmt() { sqlite3_finalize(s); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;
  void text(int i, const std::string& v) { sqlite3_bind_text(s, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT); }
  void integer(int i, std::int64_t v) { sqlite3_bind_int64(s, i, v); }
};

}  // namespace

SqliteSessionStore::SqliteSessionStore(const std::filesystem::path& path, std::chrono::seconds ttl)
    : db_(std::make_unique<Db>()), ttl_(ttl) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (sqlite3_open(path.string().c_str(), &db_->handle) != SQLITE_OK) {
    std::string msg = db_->handle ? sqlite3_errmsg(db_->handle) : "out of memory";
    sqlite3_close(db_->handle);
    throw Error(ErrorCode::Internal, "cannot open session store", msg);
  }
  sqlite3_busy_timeout(db_->handle, 5000);
  exec("PRAGMA journal_mode=WAL");
  exec("CREATE TABLE IF NOT EXISTS sessions (id TEXT PRIMARY KEY, revision INTEGER NOT NULL, "
       "data TEXT NOT NULL, expires INTEGER NOT NULL)");
}

SqliteSessionStore::~SqliteSessionStore() { sqlite3_close(db_->handle); }

void SqliteSessionStore::exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_->handle, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(ErrorCode::Internal, "session store statement failed", msg);
  }
}

std::optional<std::string> SqliteSessionStore::load(const std::string& id) {
  std::lock_guard lock(mu_);
  Stmt st(db_->handle, "SELECT data FROM sessions WHERE id = ?1 AND expires > ?2");
  st.text(1, id);
  st.integer(2, epoch_seconds(SysClock::now()));
  if (sqlite3_step(st.s) != SQLITE_ROW) return std::nullopt;
  const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st.s, 0));
  return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st.s, 0)));
}

void SqliteSessionStore::insert(const std::string& id, std::uint64_t revision, const std::string& data) {
  std::lock_guard lock(mu_);
  Stmt st(db_->handle, "INSERT OR REPLACE INTO sessions (id, revision, data, expires) VALUES (?1, ?2, ?3, ?4)");
  st.text(1, id);
  st.integer(2, static_cast<std::int64_t>(revision));
  st.text(3, data);
  st.integer(4, epoch_seconds(SysClock::now() + ttl_));
  if (sqlite3_step(st.s) != SQLITE_DONE)
    throw Error(ErrorCode::Internal, "session store write failed", sqlite3_errmsg(db_->handle));
}

bool SqliteSessionStore::compare_and_set(const std::string& id, std::uint64_t expected, std::uint64_t revision,
                                         const std::string& data) {
  std::lock_guard lock(mu_);
  Stmt st(db_->handle, "UPDATE sessions SET revision = ?1, data = ?2, expires = ?3 WHERE id = ?4 AND revision = ?5");
  st.integer(1, static_cast<std::int64_t>(revision));
  st.text(2, data);
  st.integer(3, epoch_seconds(SysClock::now() + ttl_));
  st.text(4, id);
  st.integer(5, static_cast<std::int64_t>(expected));
  if (sqlite3_step(st.s) != SQLITE_DONE)
    throw Error(ErrorCode::Internal, "session store write failed", sqlite3_errmsg(db_->handle));
  return sqlite3_changes(db_->handle) == 1;
}

std::size_t SqliteSessionStore::purge_expired() {
  std::lock_guard lock(mu_);
  Stmt st(db_->handle, "DELETE FROM sessions WHERE expires <= ?1");
  st.integer(1, epoch_seconds(SysClock::now()));
  sqlite3_step(st.s);
  return static_cast<std::size_t>(sqlite3_changes(db_->handle));
}

// ---------------------------------------------------------------------------
// Configuration

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig c;
  if (file) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(util::read_file(*file));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidRequest, "config file is not valid JSON", e.what());
    }
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.cors_origin = j.value("cors_origin", c.cors_origin);
    if (j.contains("corpus_dir")) c.corpus_dir = j["corpus_dir"].get<std::string>();
    if (j.contains("image_api_url")) c.image_api_url = j["image_api_url"].get<std::string>();
    c.text_backend = j.value("text_backend", c.text_backend);
    if (j.contains("vision_url")) c.vision_url = j["vision_url"].get<std::string>();
    if (j.contains("store_path")) c.store_path = j["store_path"].get<std::string>();
    c.session_ttl = std::chrono::seconds(j.value("session_ttl_s", c.session_ttl.count()));
    c.default_seed = j.value("seed", c.default_seed);
    c.limits.candidates = j.value("candidates", c.limits.candidates);
    c.limits.iterations = j.value("iterations", c.limits.iterations);
    c.limits.per_candidate = std::chrono::milliseconds(j.value("time_budget_ms", c.limits.per_candidate.count()));
    c.limits.total = std::chrono::milliseconds(j.value("total_budget_ms", c.limits.total.count()));
    c.max_concurrent_generations = j.value("max_concurrent_generations", c.max_concurrent_generations);
  }
  if (const char* v = std::getenv("METAGLYPH_CORPUS_DIR"); v && *v) c.corpus_dir = v;
  if (const char* v = std::getenv("METAGLYPH_IMG_API_URL"); v && *v) c.image_api_url = v;
  if (const char* v = std::getenv("METAGLYPH_SEED"); v && *v) {
    char* end = nullptr;
    auto seed = std::strtoull(v, &end, 10);
    if (!end || *end) throw Error(ErrorCode::InvalidRequest, "METAGLYPH_SEED must be an unsigned integer", v);
    c.default_seed = seed;
  }
  c.max_concurrent_generations = std::clamp<std::ptrdiff_t>(c.max_concurrent_generations, 1, 64);
  return c;
}

std::shared_ptr<Engine> make_engine(const ServiceConfig& config) {
  EngineConfig ec;
  ec.corpus_dir = config.corpus_dir;
  if (config.image_api_url) {
    HttpFetcherConfig fc;
    fc.base_url = *config.image_api_url;
    ec.remote = std::make_shared<HttpSvgFetcher>(fc);
  }
  ec.text = semantics::make_text_backend(config.text_backend);
  if (config.vision_url) {
    semantics::RemoteConfig rc;
    rc.url = *config.vision_url;
    ec.vision = std::make_shared<semantics::RemoteRelevanceBackend>(rc);
  }
  return std::make_shared<Engine>(std::move(ec));
}

std::shared_ptr<SessionStore> make_store(const ServiceConfig& config) {
  if (config.store_path) return std::make_shared<SqliteSessionStore>(*config.store_path, config.session_ttl);
  return std::make_shared<MemorySessionStore>(config.session_ttl);
}

// ---------------------------------------------------------------------------
// Service

Service::Service(std::shared_ptr<Engine> engine, std::shared_ptr<SessionStore> store, ServiceConfig config)
    : engine_(std::move(engine)),
      store_(std::move(store)),
      config_(std::move(config)),
      generation_slots_(config_.max_concurrent_generations) {}

std::shared_ptr<std::mutex> Service::session_lock(const std::string& id) {
  std::lock_guard lock(locks_mu_);
  std::erase_if(locks_, [](const auto& kv) { return kv.second.expired(); });
  auto& slot = locks_[id];
  auto m = slot.lock();
  if (!m) {
    m = std::make_shared<std::mutex>();
    slot = m;
  }
  return m;
}

Session Service::load(const std::string& id) {
  auto data = store_->load(id);
  if (!data) throw Error(ErrorCode::UnknownSession, "no such session", id);
  try {
    return session_from_json(nlohmann::json::parse(*data));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Internal, "corrupt session record", e.what());
  }
}

void Service::check_revision(const Session& s, const nlohmann::json& body) const {
  if (!body.is_object() || !body.contains("revision") || body["revision"].is_null()) return;
  const auto& rev = body["revision"];
  if (!rev.is_number_integer() || (!rev.is_number_unsigned() && rev.get<std::int64_t>() < 0))
    throw Error(ErrorCode::InvalidRequest, "revision must be an unsigned integer");
  const auto want = body["revision"].get<std::uint64_t>();
  if (want != s.revision)
    throw Error(ErrorCode::StaleRevision, "session changed since revision " + std::to_string(want),
                "current revision " + std::to_string(s.revision));
}

void Service::commit(Session& s, std::uint64_t expected) {
  s.revision = expected + 1;
  if (!store_->compare_and_set(s.id, expected, s.revision, to_json(s).dump()))
    throw Error(ErrorCode::StaleRevision, "session was modified concurrently");
}

void Service::run_generation(Session& s) {
  GenerateOptions opts;
  opts.candidates = s.limits.candidates;
  opts.budget.iterations = s.limits.iterations;
  opts.budget.wall_clock = s.limits.per_candidate;
  opts.total_wall_clock = s.limits.total;
  opts.seed = s.seed;
  opts.pins = s.pins;

  generation_slots_.acquire();
  std::optional<GenerateResult> gr;
  try {
    gr = engine_->generate(s.dataset, opts);
  } catch (...) {
    generation_slots_.release();
    throw;
  }
  generation_slots_.release();

  s.generated = true;
  s.results.clear();
  for (const auto& item : gr->results) {
    StoredResult r;
    r.id = item.id;
    r.rank = item.rank;
    r.candidate = item.prepared->candidate.id;
    r.reward = item.solution.reward.R;
    r.summary = result_summary(item);
    r.svg = item.svg;
    r.files = bundle_files(item, gr->dataset);
    r.elements = item.prepared->list.essential();
    s.results.push_back(std::move(r));
  }
  s.candidates = nlohmann::json::array();
  for (const auto& c : gr->candidates) s.candidates.push_back(metaglyph::to_json(c));
  s.warnings = gr->warnings;
}

nlohmann::json Service::results_json(const Session& s) const {
  nlohmann::json j;
  j["session"] = s.id;
  j["revision"] = s.revision;
  j["seed"] = s.seed;
  j["generated"] = s.generated;
  auto& results = j["results"] = nlohmann::json::array();
  for (const auto& r : s.results) {
    nlohmann::json item = r.summary;
    item["svg"] = r.svg;
    results.push_back(std::move(item));
  }
  auto& pins = j["pins"] = nlohmann::json::array();
  for (const auto& p : s.pins) pins.push_back(pin_json(p));
  j["candidates"] = s.candidates;
  j["warnings"] = s.warnings;
  if (s.generated && s.results.empty())
    j["error"] = error_body(Error(ErrorCode::NoValidSolution, "every candidate image was rejected"));
  return j;
}

nlohmann::json Service::create_session(std::string_view bytes, const std::string& filename) {
  if (bytes.size() > config_.max_upload_bytes)
    throw Error(ErrorCode::InvalidRequest, "upload too large", std::to_string(bytes.size()) + " bytes");
  Session s;
  s.id = new_session_id();
  s.seed = config_.default_seed;
  s.limits = config_.limits;
  s.dataset = load_spreadsheet(bytes, filename.empty() ? "dataset" : filename, engine_->regions());
  s.proposed_groups = propose_groups(s.dataset, engine_->text());
  store_->insert(s.id, s.revision, to_json(s).dump());

  nlohmann::json j;
  j["session"] = s.id;
  j["revision"] = s.revision;
  j["topic"] = s.dataset.topic();
  j["rows"] = s.dataset.rows();
  auto& dims = j["dimensions"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.dataset.dimensions().size(); ++i) {
    const auto& d = s.dataset.dimension(i);
    std::size_t imputed = 0;
    for (bool b : d.imputed) imputed += b;
    dims.push_back({{"id", "d" + std::to_string(i)},
                    {"name", d.name},
                    {"type", std::string(to_string(d.type))},
                    {"imputed", imputed}});
  }
  j["proposed_groups"] = groups_json(s.proposed_groups);
  return j;
}

nlohmann::json Service::generate(const std::string& id, const nlohmann::json& body) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  Session s = load(id);
  check_revision(s, body);
  const std::uint64_t expected = s.revision;
  if (body.is_object()) {
    if (body.contains("candidates")) s.limits.candidates = body["candidates"].get<std::size_t>();
    if (body.contains("iterations")) s.limits.iterations = body["iterations"].get<std::size_t>();
    if (body.contains("time_budget_ms"))
      s.limits.per_candidate = std::chrono::milliseconds(body["time_budget_ms"].get<std::int64_t>());
    if (body.contains("seed")) s.seed = body["seed"].get<std::uint64_t>();
    if (body.value("shuffle", false)) s.seed = splitmix64(s.seed ^ (s.revision + 1));
  }
  if (s.limits.candidates == 0 || s.limits.candidates > 50)
    throw Error(ErrorCode::InvalidRequest, "candidates must be in [1, 50]");
  run_generation(s);
  commit(s, expected);
  return results_json(s);
}

nlohmann::json Service::results(const std::string& id) { return results_json(load(id)); }

nlohmann::json Service::edit_mappings(const std::string& id, const nlohmann::json& body) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  Session s = load(id);
  check_revision(s, body);
  const std::uint64_t expected = s.revision;

  std::vector<Pin> pins = s.pins;
  if (body.value("clear", false)) pins.clear();
  const auto& edits = body.contains("edits") ? body["edits"] : nlohmann::json::array();
  if (!edits.is_array()) throw Error(ErrorCode::InvalidRequest, "edits must be an array");
  for (const auto& e : edits) {
    auto entry = EntryId::parse(field(e, "entry").get<std::string>());
    if (!entry) throw Error(ErrorCode::InvalidRequest, "malformed entry id", e["entry"].dump());
    const std::string pin = field(e, "pin").get<std::string>();
    std::erase_if(pins, [&](const Pin& p) { return p.entry == *entry; });
    if (pin == "unpin") continue;
    auto target = MappingTarget::parse(pin);
    if (!target) throw Error(ErrorCode::InvalidRequest, "malformed pin target", pin);
    Pin p{*entry, *target, std::nullopt};
    if (target->is_element() && target->index > 0) {
      const std::string rid = field(e, "result").get<std::string>();
      auto it = std::find_if(s.results.begin(), s.results.end(), [&](const auto& r) { return r.id == rid; });
      if (it == s.results.end()) throw Error(ErrorCode::UnknownResult, "no such result", rid);
      if (std::find(it->elements.begin(), it->elements.end(), target->index) == it->elements.end())
        throw Error(ErrorCode::UnsatisfiablePin, "element not in this result's image", pin);
      p.candidate = it->candidate;
    }
    pins.push_back(std::move(p));
  }
  std::sort(pins.begin(), pins.end(), [](const Pin& a, const Pin& b) { return a.entry < b.entry; });
  s.pins = std::move(pins);
  // Validates the pins before anything is stored.
  run_generation(s);
  commit(s, expected);
  return results_json(s);
}

nlohmann::json Service::set_groups(const std::string& id, const nlohmann::json& body) {
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  Session s = load(id);
  check_revision(s, body);
  const std::uint64_t expected = s.revision;

  std::vector<DataGroup> groups;
  if (body.value("accept_proposed", false)) groups = s.proposed_groups;
  else groups = groups_from_json(field(body, "groups"));
  for (auto& g : groups)
    if (g.name.empty()) {
      for (std::size_t m : g.members) {
        if (m >= s.dataset.dimensions().size()) break;
        g.name += (g.name.empty() ? "" : " + ") + s.dataset.dimension(m).name;
      }
    }
  s.dataset = s.dataset.with_groups(std::move(groups));
  // Group indices changed, so group pins and pins on newly grouped dimensions go.
  std::erase_if(s.pins, [&](const Pin& p) {
    return p.entry.kind == EntryId::Kind::Group || s.dataset.group_of(p.entry.index).has_value();
  });
  s.results.clear();
  s.candidates = nlohmann::json::array();
  s.warnings.clear();
  s.generated = false;
  commit(s, expected);

  nlohmann::json j;
  j["session"] = s.id;
  j["revision"] = s.revision;
  j["groups"] = groups_json(s.dataset.groups());
  return j;
}

Service::Export Service::export_result(const std::string& id, const std::string& result_id, const std::string& format) {
  Session s = load(id);
  auto it = std::find_if(s.results.begin(), s.results.end(), [&](const auto& r) { return r.id == result_id; });
  if (it == s.results.end()) throw Error(ErrorCode::UnknownResult, "no such result", result_id);
  if (format.empty() || format == "svg") return {"image/svg+xml", result_id + ".svg", it->svg};
  if (format == "bundle") return {"application/x-tar", result_id + ".tar", make_tar(it->files)};
  throw Error(ErrorCode::InvalidRequest, "format must be svg or bundle", format);
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownResult: return 404;
    case ErrorCode::StaleRevision: return 409;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::RemoteUnavailable: return 502;
    case ErrorCode::Internal: return 500;
    case ErrorCode::EmptyFile:
    case ErrorCode::RaggedRows:
    case ErrorCode::ZeroRows:
    case ErrorCode::AllEmpty:
    case ErrorCode::ParseError:
    case ErrorCode::InvalidRequest: return 400;
    default: return 422;
  }
}

nlohmann::json error_body(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"detail", e.detail()}};
}

}  // namespace metaglyph::service
