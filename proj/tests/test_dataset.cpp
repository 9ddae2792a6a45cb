#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "metaglyph/dataset.hpp"
#include "metaglyph/error.hpp"
#include "metaglyph/semantics.hpp"
#include "metaglyph/util.hpp"

using namespace metaglyph;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("load_spreadsheet builds typed dimensions and a topic") {
  const std::string csv = "hp,attack,defense\n45,49,49\n60,62,63\n80,82,83\n39,52,43\n58,64,58\n";
  Dataset ds = load_spreadsheet(csv, "pokemon.csv");
  CHECK(ds.topic() == "pokemon");
  CHECK(ds.dimensions().size() == 3);
  CHECK(ds.rows() == 5);
  CHECK(ds.groups().empty());
  for (const auto& d : ds.dimensions()) CHECK(d.type == DataType::Numerical);
  CHECK(ds.dimension(1).numeric[2] == doctest::Approx(82));
}

TEST_CASE("topic strips directories and extensions and replaces separators") {
  CHECK(topic_from_name("data/world_forest-area.csv") == "world forest area");
  CHECK(topic_from_name("burger.tsv") == "burger");
}

TEST_CASE("loader errors") {
  CHECK(code_of([] { load_spreadsheet("", "x.csv"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { load_spreadsheet("   \n", "x.csv"); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { load_spreadsheet("a,b,c\n", "x.csv"); }) == ErrorCode::ZeroRows);
  CHECK(code_of([] { load_spreadsheet("a,b\n1,2\n3\n", "x.csv"); }) == ErrorCode::RaggedRows);
}

TEST_CASE("delimiters are detected from the header row") {
  CHECK(load_spreadsheet("a\tb\n1\t2\n", "t.tsv").dimensions().size() == 2);
  CHECK(load_spreadsheet("a;b;c\n1;2;3\n", "t.csv").dimensions().size() == 3);
}

TEST_CASE("quoted fields keep delimiters, quotes and newlines") {
  Dataset ds = load_spreadsheet("name,v\n\"Smith, J\",1\n\"say \"\"hi\"\"\",2\n\"two\nlines\",3\n", "q.csv");
  CHECK(ds.rows() == 3);
  CHECK(ds.dimension(0).raw[0] == "Smith, J");
  CHECK(ds.dimension(0).raw[1] == "say \"hi\"");
  CHECK(ds.dimension(0).raw[2] == "two\nlines");
}

TEST_CASE("infer_dimension_type") {
  std::vector<std::string> nums{"1", "2", "3.5"};
  CHECK(infer_dimension_type(nums) == DataType::Numerical);
  std::vector<std::string> dates{"2001-02-03", "2004-05-06"};
  CHECK(infer_dimension_type(dates) == DataType::Temporal);
  std::vector<std::string> words{"red", "green", "red"};
  CHECK(infer_dimension_type(words) == DataType::Categorical);
  std::vector<std::string> countries{"France", "Japan", "Brazil"};
  CHECK(infer_dimension_type(countries) == DataType::Geospatial);
  std::vector<std::string> blank{"", " ", ""};
  CHECK(code_of([&] { infer_dimension_type(blank); }) == ErrorCode::AllEmpty);
}

TEST_CASE("city names follow the region table") {
  std::vector<std::string> cities{"Tokyo", "Paris", "Tokyo"};
  CHECK_FALSE(RegionTable::builtin().contains("Tokyo"));
  CHECK(infer_dimension_type(cities) == DataType::Categorical);

  RegionTable cities_table;
  cities_table.add({"Tokyo", Region::Kind::Subdivision, 139.7, 35.7});
  cities_table.add({"Paris", Region::Kind::Subdivision, 2.35, 48.86});
  CHECK(infer_dimension_type(cities, cities_table) == DataType::Geospatial);
}

TEST_CASE("the 95% rule tolerates a stray cell") {
  std::vector<std::string> cells;
  for (int i = 0; i < 19; ++i) cells.push_back(std::to_string(i));
  cells.push_back("n/a?");
  CHECK(infer_dimension_type(cells) == DataType::Numerical);
  cells.push_back("oops");
  CHECK(infer_dimension_type(cells) == DataType::Categorical);
}

TEST_CASE("year-like integers stay numerical, full dates are temporal") {
  std::vector<std::string> years{"1990", "2000", "2010"};
  CHECK(infer_dimension_type(years) == DataType::Numerical);
  std::vector<std::string> stamps{"2020-01-01T10:00:00", "2020-01-02 11:30"};
  CHECK(infer_dimension_type(stamps) == DataType::Temporal);
}

TEST_CASE("inference is a function of the multiset of cells") {
  std::mt19937_64 rng(3);
  std::vector<std::string> pool{"1", "2.5", "x", "2001-01-01", "France", "", "7", "-3", "1e3"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> cells;
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i) cells.push_back(pool[rng() % pool.size()]);
    bool all_blank = true;
    for (const auto& c : cells) all_blank = all_blank && is_missing(c);
    if (all_blank) continue;
    const DataType t = infer_dimension_type(cells);
    for (int p = 0; p < 5; ++p) {
      std::shuffle(cells.begin(), cells.end(), rng);
      CHECK(infer_dimension_type(cells) == t);
    }
  }
}

TEST_CASE("missing numerical cells are imputed with the column mean") {
  Dataset ds = load_spreadsheet("a,b\n1,x\n,y\n5,z\n", "m.csv");
  const auto& a = ds.dimension(0);
  REQUIRE(a.type == DataType::Numerical);
  CHECK(a.numeric[1] == doctest::Approx(3.0));
  CHECK(a.imputed[1]);
  CHECK_FALSE(a.imputed[0]);
}

TEST_CASE("CSV round trip reproduces the dataset") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pool{"1", "2.25", "a b", "x,y", "q\"t", "2001-01-01", "France", "", "-7"};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cols = 1 + rng() % 4, rows = 1 + rng() % 6;
    std::string csv;
    for (std::size_t c = 0; c < cols; ++c) csv += (c ? "," : "") + std::string("col") + std::to_string(c);
    csv += "\n";
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        std::string cell = pool[rng() % pool.size()];
        std::string q = "\"";
        for (char ch : cell) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        csv += (c ? "," : "") + q + "\"";
      }
      csv += "\n";
    }
    Dataset a = load_spreadsheet(csv, "round.csv");
    Dataset b = load_spreadsheet(to_csv(a), "round.csv");
    CHECK(a == b);
    CHECK(dataset_from_json(to_json(a)) == a);
  }
}

TEST_CASE("groups validate membership") {
  Dataset ds = fixtures::numeric_dataset({"a", "b", "c"}, 3);
  CHECK_NOTHROW(ds.with_groups({DataGroup{"ab", {0, 1}, {}}}));
  CHECK(code_of([&] { ds.with_groups({DataGroup{"a", {0}, {}}}); }) == ErrorCode::InvalidGroup);
  CHECK(code_of([&] {
          ds.with_groups({DataGroup{"ab", {0, 1}, {}}, DataGroup{"bc", {1, 2}, {}}});
        }) == ErrorCode::InvalidGroup);
  Dataset mixed = load_spreadsheet("n,v,w\nx,1,2\ny,3,4\n", "m.csv");
  CHECK(code_of([&] { mixed.with_groups({DataGroup{"nv", {0, 1}, {}}}); }) == ErrorCode::InvalidGroup);
  Dataset grouped = ds.with_groups({DataGroup{"ab", {0, 1}, {}}});
  CHECK(grouped.group_of(1) == std::optional<std::size_t>(0));
  CHECK(grouped.ungrouped() == std::vector<std::size_t>{2});
}

TEST_CASE("group importance is the mean of member importances") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Dataset ds = fixtures::numeric_dataset({"a", "b", "c", "d"}, 2).with_groups({DataGroup{"g", {0, 2, 3}, {}}});
    std::vector<double> scores{u(rng), u(rng), u(rng), u(rng)};
    Dataset scored = ds.with_importance(scores, {});
    const double mean = (scores[0] + scores[2] + scores[3]) / 3.0;
    CHECK(std::abs(*scored.groups()[0].importance - mean) <= 1e-12);
  }
}

TEST_CASE("propose_groups uses pairwise name similarity") {
  semantics::LexicalBackend lex;
  Dataset ds = fixtures::numeric_dataset({"math score", "music score", "age"}, 4);
  const double ms = semantics::text_similarity(lex, "math score", "music score");
  const double ma = semantics::text_similarity(lex, "math score", "age");
  const double sa = semantics::text_similarity(lex, "music score", "age");
  CHECK(ms >= 0.8);
  CHECK(ma < 0.8);
  CHECK(sa < 0.8);
  auto groups = propose_groups(ds, lex, 0.8);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].members == std::vector<std::size_t>{0, 1});

  CHECK(propose_groups(fixtures::numeric_dataset({"alone"}, 3), lex, 0.8).empty());
  CHECK(propose_groups(fixtures::numeric_dataset({"apple", "pear", "plum"}, 3), lex, 1.0).empty());
}

TEST_CASE("proposals only contain numerical columns") {
  semantics::LexicalBackend lex;
  Dataset ds = load_spreadsheet("math score,music score,art score\n1,2,a\n3,4,b\n", "s.csv");
  auto groups = propose_groups(ds, lex, 0.8);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].members == std::vector<std::size_t>{0, 1});
}

TEST_CASE("shipped burger table loads with six typed columns") {
  Dataset ds = load_spreadsheet(util::read_file(fixtures::table("burger.csv")), "burger.csv");
  CHECK(ds.topic() == "burger");
  CHECK(ds.rows() == 10);
  REQUIRE(ds.dimensions().size() == 6);
  CHECK(ds.dimension(0).type == DataType::Categorical);
  for (std::size_t i = 1; i < 6; ++i) CHECK(ds.dimension(i).type == DataType::Numerical);
}
