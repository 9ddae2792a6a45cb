#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <thread>

#include "fixtures.hpp"
#include "metaglyph/render.hpp"
#include "metaglyph/service.hpp"
#include "metaglyph/util.hpp"

using namespace metaglyph;
using namespace metaglyph::service;
using nlohmann::json;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("metaglyph-test-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

ServiceConfig test_config() {
  ServiceConfig c;
  c.corpus_dir = fixtures::corpus_dir();
  c.default_seed = 7;
  c.limits.iterations = 300;
  c.limits.per_candidate = std::chrono::minutes(1);
  c.limits.total = std::chrono::minutes(5);
  return c;
}

std::unique_ptr<Service> make_service(std::shared_ptr<SessionStore> store = nullptr) {
  auto cfg = test_config();
  if (!store) store = std::make_shared<MemorySessionStore>();
  return std::make_unique<Service>(make_engine(cfg), std::move(store), cfg);
}

std::string burger_csv() { return util::read_file(fixtures::table("burger.csv")); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

std::string target_in(const json& result, const std::string& entry) {
  for (const auto& p : result.at("pairs"))
    if (p.at("entry") == entry) return p.at("target");
  FAIL("entry " << entry << " missing");
  return {};
}

std::string target_in_svg(const std::string& svg, const std::string& entry) {
  const json meta = decode_metadata(svg);
  for (const auto& p : meta.at("pairs"))
    if (p.at("entry") == entry) return p.at("target");
  FAIL("entry " << entry << " missing from metadata");
  return {};
}

void exercise_store(SessionStore& store) {
  CHECK_FALSE(store.load("nope"));
  store.insert("s1", 0, "zero");
  CHECK(store.load("s1") == std::optional<std::string>("zero"));
  CHECK(store.compare_and_set("s1", 0, 1, "one"));
  CHECK(store.load("s1") == std::optional<std::string>("one"));
  CHECK_FALSE(store.compare_and_set("s1", 0, 2, "stale"));
  CHECK(store.load("s1") == std::optional<std::string>("one"));
  CHECK_FALSE(store.compare_and_set("missing", 0, 1, "x"));
  CHECK(store.purge_expired() == 0);
}

}  // namespace

TEST_CASE("memory store: revisions and expiry") {
  MemorySessionStore store;
  exercise_store(store);
  MemorySessionStore expired(std::chrono::seconds(0));
  expired.insert("s", 0, "x");
  CHECK_FALSE(expired.load("s"));
  expired.insert("t", 0, "y");
  CHECK(expired.purge_expired() == 1);
}

TEST_CASE("sqlite store: revisions, expiry and persistence") {
  const auto path = temp_path("sessions.db");
  std::filesystem::remove(path);
  {
    SqliteSessionStore store(path);
    exercise_store(store);
  }
  {
    SqliteSessionStore reopened(path);
    CHECK(reopened.load("s1") == std::optional<std::string>("one"));
  }
  SqliteSessionStore expired(temp_path("expired.db"), std::chrono::seconds(-1));
  expired.insert("s", 0, "x");
  CHECK_FALSE(expired.load("s"));
  CHECK(expired.purge_expired() >= 1);
}

TEST_CASE("session JSON round trip") {
  auto svc = make_service();
  auto created = svc->create_session(burger_csv(), "burger.csv");
  svc->generate(created.at("session"), json::object());
  Session s = svc->load(created.at("session"));
  Session back = session_from_json(to_json(s));
  CHECK(to_json(back) == to_json(s));
  CHECK(back.dataset == s.dataset);
  CHECK(back.results.size() == s.results.size());
}

TEST_CASE("create_session describes the upload") {
  auto svc = make_service();
  auto j = svc->create_session(burger_csv(), "burger.csv");
  CHECK(j.at("topic") == "burger");
  CHECK(j.at("rows") == 10);
  CHECK(j.at("revision") == 0);
  REQUIRE(j.at("dimensions").size() == 6);
  CHECK(j.at("dimensions")[0].at("type") == "categorical");
  CHECK(j.at("dimensions")[1].at("id") == "d1");
  CHECK(code_of([&] { svc->create_session("", "x.csv"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([&] { svc->results("ffff"); }) == ErrorCode::UnknownSession);
}

TEST_CASE("stale revisions are rejected") {
  auto svc = make_service();
  const std::string id = svc->create_session(burger_csv(), "burger.csv").at("session");
  auto g = svc->generate(id, {{"revision", 0}});
  CHECK(g.at("revision") == 1);
  CHECK(code_of([&] { svc->generate(id, {{"revision", 0}}); }) == ErrorCode::StaleRevision);
  CHECK(code_of([&] { svc->edit_mappings(id, {{"revision", 0}, {"edits", json::array()}}); }) ==
        ErrorCode::StaleRevision);
  CHECK(svc->results(id).at("revision") == 1);
  CHECK(code_of([&] { svc->generate(id, {{"revision", -3}}); }) == ErrorCode::InvalidRequest);
}

TEST_CASE("pins are honored and unpinning restores the fresh result") {
  auto svc = make_service();
  const std::string id = svc->create_session(burger_csv(), "burger.csv").at("session");
  auto fresh = svc->generate(id, json::object());
  REQUIRE_FALSE(fresh.at("results").empty());

  auto pinned = svc->edit_mappings(id, {{"edits", {{{"entry", "d1"}, {"pin", "a1"}}}}});
  REQUIRE_FALSE(pinned.at("results").empty());
  for (const auto& r : pinned.at("results")) {
    CHECK(target_in(r, "d1") == "a1");
    CHECK(target_in_svg(r.at("svg"), "d1") == "a1");
  }
  CHECK(pinned.at("pins").size() == 1);

  const std::string rid = fresh.at("results")[0].at("id");
  auto element = svc->edit_mappings(id, {{"edits", {{{"entry", "d2"}, {"pin", "e1"}, {"result", rid}}}}});
  REQUIRE(element.at("results").size() == 1);
  CHECK(element.at("results")[0].at("id") == rid);
  CHECK(target_in(element.at("results")[0], "d2") == "e1");
  CHECK(target_in(element.at("results")[0], "d1") == "a1");

  CHECK(code_of([&] {
          svc->edit_mappings(id, {{"edits", {{{"entry", "d3"}, {"pin", "e42"}, {"result", rid}}}}});
        }) == ErrorCode::UnsatisfiablePin);
  CHECK(code_of([&] {
          svc->edit_mappings(id, {{"edits", {{{"entry", "d3"}, {"pin", "e1"}, {"result", "rnope"}}}}});
        }) == ErrorCode::UnknownResult);

  auto unpinned = svc->edit_mappings(id, {{"edits", {{{"entry", "d1"}, {"pin", "unpin"}},
                                                     {{"entry", "d2"}, {"pin", "unpin"}}}}});
  CHECK(unpinned.at("pins").empty());
  REQUIRE(unpinned.at("results").size() == fresh.at("results").size());
  for (std::size_t i = 0; i < fresh.at("results").size(); ++i)
    CHECK(unpinned.at("results")[i].at("svg") == fresh.at("results")[i].at("svg"));
}

TEST_CASE("groups reset results and drop affected pins") {
  auto svc = make_service();
  const std::string id =
      svc->create_session(util::read_file(fixtures::table("burger_nutrients.csv")), "burger_nutrients.csv")
          .at("session");
  svc->edit_mappings(id, {{"edits", {{{"entry", "d3"}, {"pin", "none"}}, {{"entry", "d1"}, {"pin", "none"}}}}});
  auto g = svc->set_groups(id, {{"groups", {{{"name", "vitamins"}, {"members", {"d3", "d4", "d5", "d6"}}}}}});
  CHECK(g.at("groups").size() == 1);
  Session s = svc->load(id);
  CHECK_FALSE(s.generated);
  CHECK(s.results.empty());
  REQUIRE(s.pins.size() == 1);
  CHECK(s.pins[0].entry.str() == "d1");
  auto r = svc->generate(id, json::object());
  CHECK_FALSE(r.at("results").empty());
  CHECK(code_of([&] { svc->set_groups(id, {{"groups", {{{"members", {"d0", "d1"}}}}}}); }) ==
        ErrorCode::InvalidGroup);
}

TEST_CASE("export returns the stored scene and a complete bundle") {
  auto svc = make_service();
  const std::string id = svc->create_session(burger_csv(), "burger.csv").at("session");
  auto g = svc->generate(id, json::object());
  const auto& top = g.at("results")[0];
  auto svg = svc->export_result(id, top.at("id"), "svg");
  CHECK(svg.content_type == "image/svg+xml");
  CHECK(svg.body == top.at("svg"));
  auto bundle = svc->export_result(id, top.at("id"), "bundle");
  CHECK(bundle.content_type == "application/x-tar");
  // One header block per member: scene, legend, mapping and one per element.
  std::size_t members = 0;
  for (std::size_t at = 0; at + 512 <= bundle.body.size(); at += 512)
    if (bundle.body.compare(at + 257, 5, "ustar") == 0) ++members;
  CHECK(members == 3 + top.at("elements").size());
  CHECK(code_of([&] { svc->export_result(id, top.at("id"), "png"); }) == ErrorCode::InvalidRequest);
  CHECK(code_of([&] { svc->export_result(id, "rmissing", "svg"); }) == ErrorCode::UnknownResult);
}

TEST_CASE("sqlite-backed service survives a restart") {
  const auto path = temp_path("service.db");
  std::filesystem::remove(path);
  std::string id, svg;
  {
    auto svc = make_service(std::make_shared<SqliteSessionStore>(path));
    id = svc->create_session(burger_csv(), "burger.csv").at("session");
    svg = svc->generate(id, json::object()).at("results")[0].at("svg");
  }
  auto svc = make_service(std::make_shared<SqliteSessionStore>(path));
  CHECK(svc->results(id).at("results")[0].at("svg") == svg);
}

TEST_CASE("error codes map to HTTP statuses") {
  CHECK(http_status(ErrorCode::UnknownSession) == 404);
  CHECK(http_status(ErrorCode::StaleRevision) == 409);
  CHECK(http_status(ErrorCode::RaggedRows) == 400);
  CHECK(http_status(ErrorCode::UnsatisfiablePin) == 422);
  CHECK(http_status(ErrorCode::Internal) == 500);
  auto body = error_body(Error(ErrorCode::StaleRevision, "changed", "rev 3"));
  CHECK(body.at("code") == "StaleRevision");
  CHECK(body.at("detail") == "rev 3");
}

TEST_CASE("config file and environment overrides") {
  const auto path = temp_path("config.json");
  util::write_file(path, R"({"port": 9123, "seed": 5, "iterations": 77, "corpus_dir": "/tmp/c"})");
  auto c = load_service_config(path);
  CHECK(c.port == 9123);
  CHECK(c.limits.iterations == 77);
  CHECK(c.corpus_dir == std::filesystem::path("/tmp/c"));
  ::setenv("METAGLYPH_SEED", "42", 1);
  CHECK(load_service_config(path).default_seed == 42);
  ::setenv("METAGLYPH_SEED", "x", 1);
  CHECK(code_of([&] { load_service_config(path); }) == ErrorCode::InvalidRequest);
  ::unsetenv("METAGLYPH_SEED");
  util::write_file(path, "{not json");
  CHECK(code_of([&] { load_service_config(path); }) == ErrorCode::InvalidRequest);
}

TEST_CASE("HTTP round trip: upload, generate, pin, update, export") {
  auto svc = make_service();
  httplib::Server server;
  install_routes(server, *svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(60, 0);

  auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  httplib::MultipartFormDataItems form{{"file", burger_csv(), "burger.csv", "text/csv"}};
  auto created = client.Post("/sessions", form);
  REQUIRE(created);
  REQUIRE(created->status == 201);
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  const json c = json::parse(created->body);
  const std::string id = c.at("session");
  CHECK(c.at("topic") == "burger");

  auto gen = client.Post("/sessions/" + id + "/generate", json{{"revision", 0}}.dump(), "application/json");
  REQUIRE(gen);
  REQUIRE(gen->status == 200);
  const json g = json::parse(gen->body);
  REQUIRE_FALSE(g.at("results").empty());

  auto stale = client.Post("/sessions/" + id + "/generate", json{{"revision", 0}}.dump(), "application/json");
  REQUIRE(stale);
  CHECK(stale->status == 409);
  CHECK(json::parse(stale->body).at("code") == "StaleRevision");

  const json edit{{"revision", 1}, {"edits", {{{"entry", "d1"}, {"pin", "a1"}}}}};
  auto patched = client.Patch("/sessions/" + id + "/mappings", edit.dump(), "application/json");
  REQUIRE(patched);
  REQUIRE(patched->status == 200);
  const json p = json::parse(patched->body);
  const auto& center = p.at("results")[0];
  CHECK(target_in_svg(center.at("svg"), "d1") == "a1");

  auto fetched = client.Get("/sessions/" + id + "/results");
  REQUIRE(fetched);
  CHECK(json::parse(fetched->body).at("revision") == 2);

  const std::string rid = center.at("id");
  auto exported = client.Get("/sessions/" + id + "/results/" + rid + "/export?format=svg");
  REQUIRE(exported);
  CHECK(exported->status == 200);
  CHECK(exported->get_header_value("Content-Type") == "image/svg+xml");
  CHECK(exported->body == svc->export_result(id, rid, "svg").body);
  CHECK(exported->body == center.at("svg").get<std::string>());
  auto bundle = client.Get("/sessions/" + id + "/results/" + rid + "/export?format=bundle");
  REQUIRE(bundle);
  CHECK(bundle->body == svc->export_result(id, rid, "bundle").body);
  CHECK(bundle->get_header_value("Content-Disposition").find(rid + ".tar") != std::string::npos);

  auto missing = client.Get("/sessions/abcdef/results");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto bad = client.Post("/sessions/" + id + "/generate", "{oops", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto ragged = client.Post("/sessions?name=r.csv", "a,b\n1\n", "text/csv");
  REQUIRE(ragged);
  CHECK(ragged->status == 400);
  CHECK(json::parse(ragged->body).at("code") == "RaggedRows");
  auto preflight = client.Options("/sessions");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);

  server.stop();
  listener.join();
}
