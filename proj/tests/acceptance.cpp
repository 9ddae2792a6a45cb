// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit when any
// primary criterion fails.

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "metaglyph/engine.hpp"
#include "metaglyph/error.hpp"
#include "metaglyph/render.hpp"
#include "metaglyph/service.hpp"
#include "metaglyph/util.hpp"

using namespace metaglyph;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

/// Collects named sub-checks; the first failure becomes the detail line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  Outcome outcome(std::string summary) const {
    if (!failure_.empty()) return {false, failure_};
    return {true, std::move(summary)};
  }

 private:
  std::string failure_;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Dataset table(const std::string& name) { return load_spreadsheet(util::read_file(fixtures::table(name)), name); }

ElementList corpus_list(const std::string& file) {
  return build_element_list(fixtures::candidate(file, util::read_file(fixtures::corpus_dir() / file)));
}

std::size_t element_named(const ElementList& list, const std::string& label) {
  for (const auto& e : list.elements)
    if (e.label == label) return e.index;
  throw std::runtime_error("no element " + label);
}

std::size_t option_of(const MappingDepth& d, MappingTarget t) {
  for (std::size_t i = 0; i < d.options.size(); ++i)
    if (d.options[i] == t) return i;
  throw std::runtime_error("option missing");
}

/// One-pair solution space that maps `entry` to `target` with product 1.
struct Manual {
  MappingSpace space;
  MappingSolution solution;
};

Manual manual(const Dataset& ds, EntryId entry, MappingTarget target) {
  Manual m;
  MappingDepth d;
  d.entry = entry;
  d.name = entry.kind == EntryId::Kind::Group ? ds.groups().at(entry.index).name : ds.dimension(entry.index).name;
  d.type = entry.kind == EntryId::Kind::Group ? DataType::Numerical : ds.dimension(entry.index).type;
  d.options = {target, MappingTarget::none()};
  m.space.depths.push_back(d);
  m.solution.pairs.push_back(target);
  m.solution.choice.push_back(0);
  m.solution.reward.products.push_back(1.0);
  m.solution.reward.R = 1;
  return m;
}

std::string glyph_line(const std::string& svg, std::size_t row) {
  const std::string key = "<g class=\"glyph\" data-row=\"" + std::to_string(row) + "\"";
  const auto at = svg.find(key);
  if (at == std::string::npos) throw std::runtime_error("glyph row missing");
  return svg.substr(at, svg.find('\n', at) - at);
}

std::vector<std::string> tags(const std::string& text, const std::string& name) {
  std::vector<std::string> out;
  const std::string open = "<" + name + " ";
  for (std::size_t at = text.find(open); at != std::string::npos; at = text.find(open, at + 1))
    out.push_back(text.substr(at, text.find('>', at) - at + 1));
  return out;
}

std::optional<std::string> attr(const std::string& tag, const std::string& name) {
  const std::string key = " " + name + "=\"";
  const auto at = tag.find(key);
  if (at == std::string::npos) return std::nullopt;
  const auto start = at + key.size();
  return tag.substr(start, tag.find('"', start) - start);
}

/// Height of element `j` as emitted in glyph `row`, measured from the path.
double emitted_height(const std::string& svg, std::size_t row, std::size_t j) {
  for (const auto& t : tags(glyph_line(svg, row), "path")) {
    if (attr(t, "data-element") != std::to_string(j)) continue;
    svg::Path p = svg::parse_path_data(*attr(t, "d"));
    if (auto tr = attr(t, "transform")) p = p.transformed(svg::parse_transform(*tr));
    return bounds(svg::flatten(p)).height();
  }
  throw std::runtime_error("element not emitted");
}

Engine corpus_engine() {
  EngineConfig c;
  c.corpus_dir = fixtures::corpus_dir();
  return Engine(c);
}

GenerateOptions iteration_budget(std::uint64_t seed) {
  GenerateOptions o;
  o.seed = seed;
  o.budget.iterations = 400;
  o.budget.wall_clock.reset();
  o.total_wall_clock = std::chrono::minutes(5);
  return o;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

// --- criteria -------------------------------------------------------------------

Outcome mcts_oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::size_t matched = 0, instances = 0;
  std::vector<std::string> misses;
  const auto t0 = Clock::now();
  while (instances < 50) {
    auto inst = fixtures::random_instance(rng, 2 + rng() % 3, 2 + rng() % 3);
    RewardEvaluator eval(inst.space, inst.scores);
    const double oracle = exhaustive_search(eval).best.reward.R;
    SearchOptions opts;
    opts.budget.iterations = 10 * inst.space.solution_count();
    opts.budget.wall_clock.reset();
    opts.seed = rng();
    const double got = search_mapping(eval, opts).best.reward.R;
    if (std::abs(got - oracle) <= 1e-9) ++matched;
    else misses.push_back(fmt(got) + " vs " + fmt(oracle));
    ++instances;
  }
  const double secs = seconds_since(t0);
  std::string detail = std::to_string(matched) + "/50 matched, " + fmt(secs, 3) + " s";
  if (!misses.empty()) detail += ", first miss " + misses.front();
  return {matched >= 49 && secs < 5.0, detail};
}

Outcome uct_formula() {
  const double want = 1 + 4 * std::sqrt(std::log(4.0) / 2);
  const double got = uct(2, 2, 4, 4);
  Checks c;
  c.expect(std::abs(got - want) <= 1e-9, "uct(2,2,4,4) = " + fmt(got, 12) + ", want " + fmt(want, 12));
  c.expect(SearchOptions{}.exploration == 4.0, "default exploration constant is not 4");
  c.expect(GenerateOptions{}.exploration == 4.0, "default generate exploration is not 4");
  return c.outcome("uct(2,2,4,4) = " + fmt(got, 12) + ", c = 4");
}

Outcome pruning_boundary() {
  // Union bbox 100×100: 5×8 is 0.4%, 6×10 is 0.6%, both inside the body.
  using fixtures::rect;
  const std::string body = rect(0, 0, 100, 80) + rect(0, 80, 100, 20) + rect(10, 10, 5, 8) + rect(40, 10, 6, 10);
  auto list = build_element_list(fixtures::candidate("prune.svg", fixtures::svg_doc(body)));
  std::vector<std::size_t> removed;
  for (const auto& e : list.elements)
    if (e.removed) removed.push_back(e.index);
  Checks c;
  c.expect(removed == std::vector<std::size_t>{3}, "removed set is not exactly the 0.4% element");
  const auto ess = list.essential();
  c.expect(std::find(ess.begin(), ess.end(), 4) != ess.end(), "0.6% element was not kept");
  return c.outcome("0.4% element removed, 0.6% element kept");
}

Outcome overlap_gate() {
  Checks c;
  const std::vector<std::pair<double, double>> cases{{2.0, 0.0}, {0.8, 0.2}, {0.5, 0.5}, {0.0, 1.0}};
  const int want_o[] = {1, 1, 0, 0};
  std::string got;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::vector<Rect> boxes{Rect::from_xywh(0, 0, 1, 1), Rect::from_xywh(cases[i].first, 0, 1, 1)};
    auto s = overlap_score(boxes);
    c.expect(std::abs(s.p_overlap - cases[i].second) <= 1e-12, "P_overlap " + fmt(s.p_overlap) + " at offset " +
                                                                    fmt(cases[i].first));
    c.expect(s.O == want_o[i], "O wrong for P_overlap " + fmt(cases[i].second));
    got += (i ? "," : "") + std::to_string(s.O);
  }
  return c.outcome("P {0, 0.2, 0.5, 1.0} -> O {" + got + "}");
}

Outcome reward_gate() {
  MappingSpace space;
  for (std::size_t i = 0; i < 2; ++i) {
    MappingDepth d;
    d.entry = {EntryId::Kind::Dimension, i};
    d.name = "d" + std::to_string(i);
    d.type = DataType::Numerical;
    d.options = {MappingTarget::element(0), MappingTarget::element(1), MappingTarget::element(2),
                 MappingTarget::axis(1), MappingTarget::axis(2), MappingTarget::none()};
    space.depths.push_back(d);
  }
  ScoreTable s;
  for (const auto& d : space.depths) {
    s.importance.push_back(1.0);
    std::vector<double> row;
    for (const auto& o : d.options) row.push_back(o.is_none() ? 0.0 : 1.0);
    s.semantic.push_back(row);
  }
  s.semantic[1][option_of(space.depths[1], MappingTarget::element(2))] = 0.5;
  RewardEvaluator eval(space, s);
  RewardEvaluator strict(space, s, RewardConfig::strict());
  auto pick = [&](std::size_t d, MappingTarget t) { return static_cast<std::uint32_t>(option_of(space.depths[d], t)); };

  Checks c;
  const auto hand = eval.evaluate(Choice{pick(0, MappingTarget::element(1)), pick(1, MappingTarget::element(2))});
  c.expect(hand.O == 1, "hand example is overlap-gated");
  c.expect(std::abs(hand.R - 0.75) <= 1e-12, "hand example R = " + fmt(hand.R, 15));
  c.expect(eval.evaluate(Choice{pick(0, MappingTarget::none()), pick(1, MappingTarget::none())}).R == 0.0,
           "all-empty solution scores above 0");
  c.expect(eval.evaluate(Choice{pick(0, MappingTarget::axis(1)), pick(1, MappingTarget::axis(1))}).R == 0.0,
           "duplicate axes score above 0");
  c.expect(strict.evaluate(Choice{pick(0, MappingTarget::axis(1)), pick(1, MappingTarget::axis(2))}).R == 0.0,
           "two axes under the strict gate score above 0");
  c.expect(eval.evaluate(Choice{pick(0, MappingTarget::axis(1)), pick(1, MappingTarget::axis(2))}).R > 0.0,
           "two axes under the default gate score 0");
  return c.outcome("invalid solutions score 0, hand example R = " + fmt(hand.R, 15));
}

Outcome structure_detection() {
  auto doc = [](const std::string& transform, const std::string& body) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\"><g transform=\"" + transform + "\">" + body + "</g></svg>";
  };
  Checks c;
  double worst = 0;
  for (const char* t : {"scale(1)", "scale(10)", "translate(37,-12)", "translate(5,5) scale(10)"}) {
    auto radial = build_element_list(fixtures::candidate("r.svg", doc(t, fixtures::concentric(50, 50))));
    c.expect(radial.structure.structure == Structure::Radial, std::string("concentric not radial under ") + t);
    auto line = build_element_list(fixtures::candidate("l.svg", doc(t, fixtures::collinear_squares())));
    c.expect(line.structure.structure == Structure::NonRadial, std::string("collinear not non-radial under ") + t);
    c.expect(std::abs(line.structure.slope) < 1e-9, std::string("slope ") + fmt(line.structure.slope) + " under " + t);
    worst = std::max(worst, std::abs(line.structure.slope));
  }
  return c.outcome("radial and non-radial under 4 transforms, max |k| = " + fmt(worst));
}

Outcome element_count_gate() {
  Checks c;
  c.expect(code_of([] { build_element_list(fixtures::candidate("one", fixtures::grid_of_squares(1))); }) ==
               ErrorCode::TooSimple,
           "1 element not rejected as TooSimple");
  c.expect(code_of([] { build_element_list(fixtures::candidate("forty", fixtures::grid_of_squares(40))); }) ==
               ErrorCode::TooComplex,
           "40 elements not rejected as TooComplex");
  for (int n = 2; n <= 8; ++n) {
    bool ok = false;
    try {
      ok = build_element_list(fixtures::candidate("n", fixtures::grid_of_squares(n))).essential().size() ==
           static_cast<std::size_t>(n);
    } catch (const Error&) {
    }
    c.expect(ok, std::to_string(n) + " elements not accepted");
  }
  return c.outcome("1 and 40 rejected, 2..8 accepted");
}

Outcome determinism() {
  Dataset ds = table("burger.csv");
  auto a = corpus_engine().generate(ds, iteration_budget(7));
  auto b = corpus_engine().generate(ds, iteration_budget(7));
  Checks c;
  c.expect(!a.results.empty(), "no results");
  c.expect(a.results.size() == b.results.size(), "result counts differ");
  for (std::size_t i = 0; i < std::min(a.results.size(), b.results.size()); ++i) {
    c.expect(a.results[i].id == b.results[i].id, "rankings differ at " + std::to_string(i + 1));
    c.expect(a.results[i].svg == b.results[i].svg, "SVG bytes differ at rank " + std::to_string(i + 1));
  }
  return c.outcome(std::to_string(a.results.size()) + " ranked SVGs byte-identical across runs");
}

Outcome encoding() {
  Checks c;
  ElementList burger = corpus_list("burger.svg");
  const std::size_t bread = element_named(burger, "upper-bread"), patty = element_named(burger, "patty");
  Dataset nutrients = table("burger_nutrients.csv").with_groups({DataGroup{"nutrients", {3, 4, 5, 6}, {}}});

  // Pie sectors close in every glyph.
  auto pie = manual(nutrients, {EntryId::Kind::Group, 0}, MappingTarget::element(bread));
  const std::string pie_svg = render_mgv(build_scene(pie.solution, pie.space, nutrients, burger), burger, nutrients);
  double worst = 0;
  for (std::size_t row = 0; row < nutrients.rows(); ++row) {
    double total = 0;
    for (const auto& t : tags(glyph_line(pie_svg, row), "path"))
      if (auto s = attr(t, "data-sweep")) total += std::stod(*s);
    worst = std::max(worst, std::abs(total - 360.0));
  }
  c.expect(worst <= 1e-6, "pie sectors miss 360 by " + fmt(worst));

  // Emitted sizes strictly increase with the data.
  Dataset ds = table("burger.csv");
  auto sized = manual(ds, {EntryId::Kind::Dimension, 2}, MappingTarget::element(bread));
  const std::string size_svg = render_mgv(build_scene(sized.solution, sized.space, ds, burger), burger, ds);
  const auto& values = ds.dimension(2).numeric;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return values[x] < values[y]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!(values[order[k]] > values[order[k - 1]])) continue;
    c.expect(emitted_height(size_svg, order[k], bread) > emitted_height(size_svg, order[k - 1], bread),
             "size not strictly monotone between rows " + std::to_string(order[k - 1]) + " and " +
                 std::to_string(order[k]));
  }

  // A group on a non-augmentable element replicates it per member.
  auto rep = manual(nutrients, {EntryId::Kind::Group, 0}, MappingTarget::element(patty));
  auto scene = build_scene(rep.solution, rep.space, nutrients, burger);
  c.expect(scene.plan.replications.size() == 1, "no replication planned");
  if (scene.plan.replications.size() == 1) {
    const auto& r = scene.plan.replications[0];
    const std::size_t k = r.members.size();
    c.expect(k == 4, "replica count is not the member count");
    c.expect(r.rotation_deg.size() == k && std::set<double>(r.rotation_deg.begin(), r.rotation_deg.end()).size() == k,
             "replicas lack distinct rotations");
    c.expect(r.colors.size() == k && std::set<std::string>(r.colors.begin(), r.colors.end()).size() == k,
             "replicas lack distinct colors");
    std::set<std::size_t> sized_members;
    for (const auto& a : scene.plan.assignments)
      if (a.replica && is_size_channel(a.channel) && a.dimension == r.members[*a.replica])
        sized_members.insert(*a.replica);
    c.expect(sized_members.size() == k, "not every replica carries a size channel for its member");
  }
  return c.outcome("pie closes within " + fmt(worst) + ", sizes strictly monotone, 4 replicas with rotation/color/size");
}

Outcome end_to_end() {
  std::ostringstream csv;
  csv << "fruit,Sugar,Fiber,Water,Calories,Price\n";
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1, 100);
  for (int r = 0; r < 10; ++r) {
    csv << "fruit" << r;
    for (int c = 0; c < 5; ++c) csv << ',' << std::round(u(rng) * 10) / 10;
    csv << '\n';
  }
  const auto t0 = Clock::now();
  Dataset ds = load_spreadsheet(csv.str(), "fruit.csv");
  auto result = corpus_engine().generate(ds, GenerateOptions{});
  const double secs = seconds_since(t0);
  Checks c;
  c.expect(ds.rows() == 10 && ds.dimensions().size() == 6, "table shape is not 10x6");
  c.expect(result.candidates.size() == 3, "corpus did not yield 3 candidates");
  c.expect(!result.results.empty(), "no ranked MGV");
  c.expect(secs < 10.0, "took " + fmt(secs, 3) + " s");
  return c.outcome(std::to_string(result.results.size()) + " ranked MGVs in " + fmt(secs, 3) + " s");
}

Outcome studio_round_trip() {
  service::ServiceConfig cfg;
  cfg.corpus_dir = fixtures::corpus_dir();
  cfg.default_seed = 7;
  cfg.limits.iterations = 300;
  cfg.limits.per_candidate = std::chrono::minutes(1);
  cfg.limits.total = std::chrono::minutes(5);
  service::Service svc(service::make_engine(cfg), std::make_shared<service::MemorySessionStore>(), cfg);
  httplib::Server server;
  service::install_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  Checks c;
  try {
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);
    httplib::MultipartFormDataItems form{
        {"file", util::read_file(fixtures::table("burger.csv")), "burger.csv", "text/csv"}};
    auto created = client.Post("/sessions", form);
    c.expect(created && created->status == 201, "upload failed");
    const std::string id = json::parse(created->body).at("session");
    auto gen = client.Post("/sessions/" + id + "/generate", json{{"revision", 0}}.dump(), "application/json");
    c.expect(gen && gen->status == 200, "generate failed");
    const json edit{{"revision", 1}, {"edits", {{{"entry", "d1"}, {"pin", "a1"}}}}};
    auto patched = client.Patch("/sessions/" + id + "/mappings", edit.dump(), "application/json");
    c.expect(patched && patched->status == 200, "update failed");
    const json center = json::parse(patched->body).at("results")[0];
    const std::string svg = center.at("svg");
    bool honored = false;
    const json meta = decode_metadata(svg);
    for (const auto& p : meta.at("pairs"))
      if (p.at("entry") == "d1") honored = p.at("target") == "a1";
    c.expect(honored, "center MGV metadata does not honor the pin");
    auto exported = client.Get("/sessions/" + id + "/results/" + center.at("id").get<std::string>() +
                               "/export?format=svg");
    c.expect(exported && exported->status == 200 && exported->body == svg, "export bytes differ from the result");
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  server.stop();
  listener.join();
  return c.outcome("upload, generate, pin, update and export agree");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool primary;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"mcts-oracle-equivalence", true, mcts_oracle_equivalence},
      {"uct-formula", true, uct_formula},
      {"pruning-boundary", true, pruning_boundary},
      {"overlap-gate", true, overlap_gate},
      {"reward-gate", true, reward_gate},
      {"structure-detection", true, structure_detection},
      {"element-count-gate", true, element_count_gate},
      {"determinism", true, determinism},
      {"encoding-correctness", true, encoding},
      {"end-to-end-desk-run", true, end_to_end},
      {"studio-round-trip", false, studio_round_trip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << (c.primary ? "[primary]   " : "[secondary] ") << c.name << ": "
              << o.detail << std::endl;
    if (!o.pass && c.primary) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " primary criteria failed" : "all primary criteria passed") << "\n";
  return failed ? 1 : 0;
}
