#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "bnkit/dataset.hpp"
#include "bnkit/stats.hpp"
#include "oracles.hpp"

using namespace bnkit;

namespace {

Schema abc_schema() {
  return {{"AREA", {NodeKind::Discrete, false}},
          {"SCORE", {NodeKind::Continuous, false}},
          {"RATE", {NodeKind::Continuous, true}}};
}

MixedTable read_string(const std::string& csv, const Schema& schema,
                       const CsvOptions& opt = {}) {
  std::istringstream in(csv);
  return read_csv(in, schema, opt);
}

}  // namespace

TEST_CASE("csv reading with sorted level codes") {
  const MixedTable t = read_string(
      "AREA,SCORE,RATE\n"
      "South,1.5,10\n"
      "North,2.5,20\n"
      "Centre,NA,30\n"
      "North,,40\n",
      abc_schema());
  REQUIRE(t.n_rows() == 4);
  REQUIRE(t.n_cols() == 3);

  const Column& area = t.column(t.index_of("AREA"));
  // labels coded in sorted order regardless of file order
  REQUIRE(area.levels == std::vector<std::string>{"Centre", "North", "South"});
  REQUIRE(area.codes[0] == 2);
  REQUIRE(area.codes[1] == 1);
  REQUIRE(area.codes[2] == 0);

  const Column& score = t.column(t.index_of("SCORE"));
  REQUIRE(score.values[0] == 1.5);
  REQUIRE(score.is_missing(2));  // sentinel
  REQUIRE(score.is_missing(3));  // empty field
  REQUIRE(t.missing_count() == 2);
  REQUIRE_FALSE(t.complete());
  REQUIRE(t.column(t.index_of("RATE")).percent_scale);
}

TEST_CASE("csv quoting, comments, and crlf") {
  const MixedTable t = read_string(
      "# produced by an earlier run\n"
      "AREA,SCORE,RATE\r\n"
      "\"North, West\",\"1.25\",5\n"
      "\"He said \"\"hi\"\"\",2,6\r\n",
      abc_schema());
  REQUIRE(t.n_rows() == 2);
  const Column& area = t.column(0);
  REQUIRE(area.levels == std::vector<std::string>{"He said \"hi\"", "North, West"});
  REQUIRE(t.column(1).values[0] == 1.25);
}

TEST_CASE("csv schema and shape errors") {
  REQUIRE_THROWS_AS(read_string("AREA,EXTRA\nNorth,1\n", abc_schema()), data_error);
  REQUIRE_THROWS_AS(read_string("AREA,SCORE\nNorth,1\n", abc_schema()), data_error);

  try {
    read_string("AREA,SCORE,RATE\nNorth,1\n", abc_schema());
    FAIL("expected field-count error");
  } catch (const data_error& e) {
    REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
  }

  REQUIRE_THROWS_AS(read_string("AREA,SCORE,RATE\n\"North,1,2\n", abc_schema()), data_error);
  REQUIRE_THROWS_AS(read_string("AREA,SCORE,RATE\nNorth,abc,2\n", abc_schema()), data_error);
  REQUIRE_THROWS_AS(read_csv_file("/nonexistent/file.csv", abc_schema()), data_error);
}

TEST_CASE("csv custom sentinel") {
  CsvOptions opt;
  opt.na_sentinel = "?";
  const MixedTable t = read_string("AREA,SCORE,RATE\n?,1,2\nNorth,?,3\n", abc_schema(), opt);
  REQUIRE(t.column(0).is_missing(0));
  REQUIRE(t.column(1).is_missing(1));
  // with "?" as the sentinel, "NA" is a real level
  const MixedTable u =
      read_string("AREA,SCORE,RATE\nNA,1,2\n", abc_schema(), opt);
  REQUIRE(u.column(0).levels == std::vector<std::string>{"NA"});
}

TEST_CASE("csv write round-trip preserves every cell") {
  const MixedTable t = read_string(
      "AREA,SCORE,RATE\n"
      "South,0.1,10\n"
      "North,-1.7976931348623157e308,20\n"
      "Centre,NA,0.30000000000000004\n"
      "North,3.333333333333333e-5,\n",
      abc_schema());
  std::ostringstream out;
  write_csv(out, t, {"written by a test"});
  const std::string text = out.str();
  REQUIRE(text.rfind("# written by a test\n", 0) == 0);

  const MixedTable back = read_string(text, abc_schema());
  REQUIRE(oracle::tables_equal(t, back));
}

TEST_CASE("shortest round-trip double formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.30000000000000004, -0.0, 12345.678901}) {
    const std::string s = detail::format_double(v);
    REQUIRE(detail::parse_double(s, "test") == v);
    REQUIRE(s.find('\n') == std::string::npos);
  }
  REQUIRE(detail::format_double(2.0) == "2");
}

TEST_CASE("select_rows resamples with dictionaries intact") {
  const MixedTable t = read_string(
      "AREA,SCORE,RATE\nSouth,1,4\nNorth,2,5\nCentre,3,6\n", abc_schema());
  const MixedTable s = t.select_rows({2, 0, 2});
  REQUIRE(s.n_rows() == 3);
  REQUIRE(s.column(0).levels == t.column(0).levels);
  REQUIRE(s.column(0).codes[0] == 0);   // Centre
  REQUIRE(s.column(0).codes[1] == 2);   // South
  REQUIRE(s.column(1).values[2] == 3);
  REQUIRE_THROWS_AS(t.select_rows({3}), data_error);
}

TEST_CASE("table mutation guards") {
  MixedTable t;
  const int d = t.add_column("D", NodeKind::Discrete);
  const int c = t.add_column("C", NodeKind::Continuous);
  REQUIRE_THROWS_AS(t.add_column("D", NodeKind::Continuous), data_error);

  const std::size_t r = t.add_row();
  REQUIRE_THROWS_AS(t.set_continuous(d, r, 1.0), data_error);
  REQUIRE_THROWS_AS(t.set_discrete(c, r, 0), data_error);
  REQUIRE_THROWS_AS(t.set_continuous(c, r, std::nan("")), data_error);
  REQUIRE_THROWS_AS(t.set_discrete(d, r, 0), data_error);  // no levels yet

  REQUIRE(t.level_code(d, "x") == 0);
  REQUIRE(t.level_code(d, "x") == 0);  // get, not re-add
  t.set_discrete(d, r, 0);
  t.set_continuous(c, r, 2.0);
  REQUIRE(t.complete());

  t.set_missing(d, r);
  REQUIRE(t.missing_count() == 1);
  REQUIRE(t.column(d).codes[r] == -1);
}

TEST_CASE("schema_nodes reflects column order and kinds") {
  const MixedTable t = read_string("AREA,SCORE,RATE\nNorth,1,2\n", abc_schema());
  const auto nodes = t.schema_nodes();
  REQUIRE(nodes.size() == 3);
  REQUIRE(nodes[0].name == "AREA");
  REQUIRE(nodes[0].kind == NodeKind::Discrete);
  REQUIRE(nodes[1].kind == NodeKind::Continuous);
}

TEST_CASE("summary statistics") {
  REQUIRE(median({3, 1, 2}) == 2.0);
  REQUIRE(median({4, 1, 3, 2}) == 2.5);
  REQUIRE_THROWS_AS(median({}), argument_error);

  REQUIRE(mode_code({1, 1, 2, 2, 0}) == 1);  // tie between 1 and 2 -> lowest
  REQUIRE(mode_code({2, 2, 0, 1}) == 2);
  REQUIRE_THROWS_AS(mode_code({}), argument_error);

  const std::vector<double> x{1, 2, 3, 4};
  REQUIRE(mean(x) == 2.5);
  REQUIRE(variance_mle(x) == Catch::Approx(1.25));
  REQUIRE(variance_sample(x) == Catch::Approx(5.0 / 3.0));

  REQUIRE(normal_cdf(0.0) == Catch::Approx(0.5));
  REQUIRE(normal_quantile(0.975) == Catch::Approx(1.9599639845).margin(1e-9));
  REQUIRE(normal_quantile(normal_cdf(1.234)) == Catch::Approx(1.234).margin(1e-9));
  REQUIRE_THROWS_AS(normal_quantile(0.0), argument_error);
  REQUIRE_THROWS_AS(normal_quantile(1.0), argument_error);
}
