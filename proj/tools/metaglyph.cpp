// metaglyph: batch generation, brute-force oracle, corpus management and the
// HTTP service.

#include <csignal>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "metaglyph/engine.hpp"
#include "metaglyph/error.hpp"
#include "metaglyph/service.hpp"
#include "metaglyph/util.hpp"

namespace fs = std::filesystem;
using namespace metaglyph;

namespace {

enum Exit { kOk = 0, kInput = 1, kNoResult = 2, kInternal = 3 };

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoValidSolution:
    case ErrorCode::NoCandidates:
    case ErrorCode::TreeExhausted: return kNoResult;
    case ErrorCode::Internal: return kInternal;
    default: return kInput;
  }
}

struct CommonFlags {
  std::uint64_t seed{0};
  std::size_t iterations{2000};
  long time_budget_ms{2000};
  std::size_t candidates{5};
  bool strict_axis_gate{false};
  std::string backend{"lexical"};
  int jobs{0};
  std::string vision;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--iterations", f.iterations, "MCTS iterations per candidate")->capture_default_str();
  cmd->add_option("--time-budget-ms", f.time_budget_ms, "Wall-clock ceiling per candidate")->capture_default_str();
  cmd->add_option("--candidates", f.candidates, "Candidate images to consider")->capture_default_str();
  cmd->add_flag("--strict-axis-gate", f.strict_axis_gate, "Accept only 0 or 1 axes");
  cmd->add_option("--backend", f.backend, "Text embedding backend: lexical | table:PATH | remote:URL")
      ->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Candidates searched in parallel (0 = all cores)")->capture_default_str();
  cmd->add_option("--vision", f.vision, "Relevance service URL (label fallback when unset)");
}

GenerateOptions options_from(const CommonFlags& f) {
  GenerateOptions o;
  o.seed = f.seed;
  o.budget.iterations = f.iterations;
  o.budget.wall_clock = std::chrono::milliseconds(f.time_budget_ms);
  o.total_wall_clock = std::chrono::milliseconds(std::max<long>(f.time_budget_ms, 1) * static_cast<long>(std::max<std::size_t>(f.candidates, 1)));
  o.candidates = f.candidates;
  o.strict_axis_gate = f.strict_axis_gate;
  o.jobs = f.jobs;
  return o;
}

EngineConfig engine_config(const CommonFlags& f) {
  EngineConfig ec;
  ec.text = semantics::make_text_backend(f.backend);
  if (!f.vision.empty()) {
    semantics::RemoteConfig rc;
    rc.url = f.vision;
    ec.vision = std::make_shared<semantics::RemoteRelevanceBackend>(rc);
  }
  return ec;
}

Dataset read_dataset(const fs::path& csv) {
  if (!fs::exists(csv)) throw Error(ErrorCode::InvalidRequest, "no such file", csv.string());
  return load_spreadsheet(util::read_file(csv), csv.filename().string());
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Pin> parse_pins(const std::vector<std::string>& specs, const Dataset& ds) {
  std::vector<Pin> pins;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidRequest, "pin must be ENTRY=TARGET[@IMAGE]", spec);
    std::string lhs = spec.substr(0, eq), rhs = spec.substr(eq + 1);
    Pin p;
    if (auto at = rhs.find('@'); at != std::string::npos) {
      p.candidate = rhs.substr(at + 1);
      rhs = rhs.substr(0, at);
    }
    auto entry = semantics::EntryId::parse(lhs);
    if (!entry) {
      for (std::size_t i = 0; i < ds.dimensions().size(); ++i)
        if (ds.dimension(i).name == lhs) entry = semantics::EntryId{semantics::EntryId::Kind::Dimension, i};
    }
    auto target = MappingTarget::parse(rhs);
    if (!entry || !target) throw Error(ErrorCode::InvalidRequest, "malformed pin", spec);
    p.entry = *entry;
    p.target = *target;
    pins.push_back(std::move(p));
  }
  return pins;
}

int cmd_generate(const fs::path& csv, const fs::path& corpus, const fs::path& out, const CommonFlags& flags,
                 const std::vector<std::string>& pin_specs, const std::string& image_api) {
  Dataset ds = read_dataset(csv);
  if (!fs::is_directory(corpus)) throw Error(ErrorCode::NoSource, "corpus directory not found", corpus.string());
  EngineConfig ec = engine_config(flags);
  ec.corpus_dir = corpus;
  if (!image_api.empty()) {
    HttpFetcherConfig fc;
    fc.base_url = image_api;
    fc.cache_dir = out / ".cache";
    ec.remote = std::make_shared<HttpSvgFetcher>(fc);
  }
  Engine engine(std::move(ec));
  GenerateOptions opts = options_from(flags);
  opts.pins = parse_pins(pin_specs, ds);
  GenerateResult result = engine.generate(ds, opts);

  fs::create_directories(out);
  nlohmann::json report;
  report["topic"] = ds.topic();
  report["seed"] = flags.seed;
  report["budget"] = {{"iterations", flags.iterations},
                      {"time_budget_ms", flags.time_budget_ms},
                      {"candidates", flags.candidates},
                      {"strict_axis_gate", flags.strict_axis_gate},
                      {"backend", flags.backend}};
  report["elapsed_ms"] = result.elapsed_ms;
  auto& results = report["results"] = nlohmann::json::array();
  for (const auto& item : result.results) {
    const std::string stem = "rank" + std::to_string(item.rank);
    auto files = bundle_files(item, result.dataset);
    util::write_file(out / (stem + ".svg"), item.svg);
    util::write_file(out / (stem + ".legend.svg"), files[1].second);
    util::write_file(out / (stem + ".mapping.json"), files[2].second);
    nlohmann::json r = result_summary(item);
    r["files"] = {stem + ".svg", stem + ".legend.svg", stem + ".mapping.json"};
    results.push_back(std::move(r));
  }
  auto& cands = report["candidates"] = nlohmann::json::array();
  for (const auto& c : result.candidates) cands.push_back(to_json(c));
  report["warnings"] = result.warnings;
  util::write_file(out / "report.json", report.dump(2) + "\n");

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& c : result.candidates) {
    if (c.ok) std::cout << c.candidate_id << ": reward " << c.reward << " (" << c.iterations << " iterations)\n";
    else std::cout << c.candidate_id << ": rejected " << c.error_code << ": " << c.message << "\n";
  }
  if (result.results.empty()) {
    std::cerr << "no result: every candidate was rejected\n";
    return kNoResult;
  }
  std::cout << result.results.size() << " result(s) written to " << out.string() << "\n";
  return kOk;
}

int cmd_oracle(const fs::path& csv, const fs::path& svg_path, const CommonFlags& flags, std::size_t max_solutions,
               bool compare) {
  Dataset ds = read_dataset(csv);
  if (!fs::exists(svg_path)) throw Error(ErrorCode::InvalidRequest, "no such file", svg_path.string());
  MetaphorCandidate cand;
  cand.id = svg_path.filename().string();
  cand.svg_bytes = util::read_file(svg_path);
  Engine engine(engine_config(flags));
  GenerateOptions opts = options_from(flags);
  auto importance = semantics::importance_score(ds, engine.text());
  Dataset scored = ds.with_importance(importance.dimensions, importance.groups);
  auto prepared = engine.prepare(scored, importance, cand, opts);
  RewardEvaluator eval = engine.evaluator(*prepared, scored, opts);
  ExhaustiveResult ex = exhaustive_search(eval, max_solutions);

  nlohmann::json j = to_json(ex.best, prepared->space);
  j["solutions"] = prepared->space.solution_count();
  j["evaluated"] = ex.evaluated;
  if (compare) {
    SearchOptions so;
    so.budget.iterations = flags.iterations;
    so.budget.wall_clock.reset();
    so.seed = flags.seed;
    SearchResult sr = search_mapping(eval, so);
    j["mcts"] = to_json(sr.best, prepared->space);
    j["mcts"]["iterations"] = sr.iterations;
    j["mcts"]["matches"] = sr.best.reward.R == ex.best.reward.R;
  }
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_corpus_add(const fs::path& dir, const std::vector<std::string>& files, const std::string& tags) {
  fs::create_directories(dir);
  LocalCorpus corpus(dir);
  std::size_t accepted = 0;
  for (const auto& f : files) {
    try {
      MetaphorCandidate c;
      c.id = fs::path(f).filename().string();
      c.svg_bytes = util::read_file(f);
      ElementList list = build_element_list(c);
      corpus.add(f, split_csv_list(tags));
      std::cout << c.id << ": accepted, " << list.essential().size() << " elements ("
                << to_string(list.structure.structure) << ")\n";
      ++accepted;
    } catch (const Error& e) {
      std::cout << f << ": rejected " << to_string(e.code()) << ": " << e.what() << "\n";
    }
  }
  return accepted > 0 || files.empty() ? kOk : kInput;
}

int cmd_corpus_list(const fs::path& dir) {
  LocalCorpus corpus(dir);
  for (const auto& e : corpus.entries()) {
    std::string info;
    try {
      ElementList list = build_element_list(corpus.load(e.file));
      info = std::to_string(list.essential().size()) + " elements";
    } catch (const Error& err) {
      info = std::string("invalid: ") + std::string(to_string(err.code()));
    }
    std::string tags;
    for (const auto& t : e.tags) tags += (tags.empty() ? "" : ",") + t;
    std::cout << e.file << "\t" << (tags.empty() ? "-" : tags) << "\t" << info << "\n";
  }
  return kOk;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const std::string& config_file, const std::string& host, int port, const std::string& store,
              const std::string& corpus) {
  auto config = service::load_service_config(config_file.empty() ? std::nullopt
                                                                 : std::optional<fs::path>(config_file));
  if (!host.empty()) config.host = host;
  if (port > 0) config.port = port;
  if (!store.empty()) config.store_path = store;
  if (!corpus.empty()) config.corpus_dir = corpus;
  service::Service svc(service::make_engine(config), service::make_store(config), config);
  httplib::Server server;
  service::install_routes(server, svc);
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cout << "listening on http://" << config.host << ":" << config.port << "\n" << std::flush;
  if (!server.listen(config.host, config.port)) {
    std::cerr << "cannot listen on " << config.host << ":" << config.port << "\n";
    return kInput;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate metaphoric glyph visualizations from tables and SVG images"};
  app.require_subcommand(1);

  CommonFlags gen_flags;
  std::string gen_csv, gen_corpus, gen_out = "out", gen_api;
  std::vector<std::string> gen_pins;
  auto* gen = app.add_subcommand("generate", "Generate ranked glyph visualizations");
  gen->add_option("csv", gen_csv, "Spreadsheet (CSV/TSV)")->required();
  gen->add_option("--corpus", gen_corpus, "SVG corpus directory")->required();
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--pin", gen_pins, "Pin ENTRY=TARGET[@IMAGE], e.g. d2=a1 or Sugars=e3@burger.svg");
  gen->add_option("--image-api", gen_api, "Remote SVG search endpoint base URL");
  add_common(gen, gen_flags);

  CommonFlags or_flags;
  std::string or_csv, or_svg;
  std::size_t or_max = 1'000'000;
  bool or_compare = false;
  auto* oracle = app.add_subcommand("oracle", "Enumerate every mapping for one image and print the optimum");
  oracle->add_option("csv", or_csv, "Spreadsheet")->required();
  oracle->add_option("svg", or_svg, "SVG image")->required();
  oracle->add_option("--max-solutions", or_max, "Refuse larger spaces")->capture_default_str();
  oracle->add_flag("--compare", or_compare, "Also run MCTS and report whether it matches");
  add_common(oracle, or_flags);

  auto* corpus = app.add_subcommand("corpus", "Manage an SVG corpus");
  corpus->require_subcommand(1);
  std::string c_dir, c_tags;
  std::vector<std::string> c_files;
  auto* c_add = corpus->add_subcommand("add", "Validate and copy SVG files into the corpus");
  c_add->add_option("dir", c_dir, "Corpus directory")->required();
  c_add->add_option("files", c_files, "SVG files")->required();
  c_add->add_option("--tags", c_tags, "Comma-separated keywords");
  std::string t_file;
  std::vector<std::string> t_tags;
  auto* c_tag = corpus->add_subcommand("tag", "Set keywords for a corpus file");
  c_tag->add_option("dir", c_dir, "Corpus directory")->required();
  c_tag->add_option("file", t_file, "File name inside the corpus")->required();
  c_tag->add_option("tags", t_tags, "Keywords")->required();
  auto* c_list = corpus->add_subcommand("list", "List files, tags and element counts");
  c_list->add_option("dir", c_dir, "Corpus directory")->required();

  std::string s_config, s_host, s_store, s_corpus;
  int s_port = 0;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", s_config, "JSON config file");
  serve->add_option("--host", s_host, "Bind address");
  serve->add_option("--port", s_port, "Port");
  serve->add_option("--store", s_store, "SQLite session store path (in-memory when unset)");
  serve->add_option("--corpus", s_corpus, "SVG corpus directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }

  try {
    if (*gen) return cmd_generate(gen_csv, gen_corpus, gen_out, gen_flags, gen_pins, gen_api);
    if (*oracle) return cmd_oracle(or_csv, or_svg, or_flags, or_max, or_compare);
    if (*c_add) return cmd_corpus_add(c_dir, c_files, c_tags);
    if (*c_tag) {
      LocalCorpus(c_dir).set_tags(t_file, t_tags);
      return kOk;
    }
    if (*c_list) return cmd_corpus_list(c_dir);
    if (*serve) return cmd_serve(s_config, s_host, s_port, s_store, s_corpus);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
    std::cerr << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
