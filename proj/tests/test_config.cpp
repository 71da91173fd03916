#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bnkit/config.hpp"
#include "bnkit/dataset.hpp"

using namespace bnkit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

// Each test writes its config to a fresh path so failures stay inspectable.
std::string write_config(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/bnkit_cfg_" + name + ".ini";
  std::ofstream out(path);
  out << text;
  out.close();
  return path;
}

const char* kFullConfig =
    "# pipeline run\n"
    "; alternate comment style\n"
    "[data]\n"
    "csv = data/run.csv\n"
    "na = ?\n"
    "\n"
    "[schema]\n"
    "AREA = discrete\n"
    "SCORE = continuous\n"
    "RATE = continuous, percent\n"
    "\n"
    "[recode]\n"
    "AREA = N:North, S:South\n"
    "\n"
    "[constraints]\n"
    "strategy = 2\n"
    "blacklist = bl.csv\n"
    "whitelist = wl.csv\n"
    "domains = dom.csv\n"
    "\n"
    "[search]\n"
    "score = aic\n"
    "  restarts   =   4  \n"
    "perturbation = 3\n"
    "seed = 99\n"
    "max_parents = 5\n"
    "\n"
    "[averaging]\n"
    "replicates = 250\n"
    "strength_threshold = 0.9\n"
    "direction_threshold = 0.75\n"
    "seed = 7\n"
    "\n"
    "[cv]\n"
    "folds = 5\n"
    "seed = 11\n"
    "standardize = yes\n"
    "mode = relearn\n"
    "average = on\n"
    "\n"
    "[preprocess]\n"
    "impute = false\n"
    "k = 3\n"
    "apply_transforms = true\n"
    "transforms = none, log, boxcox\n"
    "\n"
    "[analyze]\n"
    "influence = AREA, SCORE\n"
    "\n"
    "[output]\n"
    "dir = out/run1\n";

}  // namespace

TEST_CASE("run config parses every section") {
  const std::string path = write_config("full", kFullConfig);
  const RunConfig cfg = parse_run_config(path);

  CHECK(cfg.csv == "data/run.csv");
  CHECK(cfg.na == "?");

  REQUIRE(cfg.schema_order == std::vector<std::string>{"AREA", "SCORE", "RATE"});
  CHECK(cfg.schema.at("AREA").kind == NodeKind::Discrete);
  CHECK(cfg.schema.at("SCORE").kind == NodeKind::Continuous);
  CHECK_FALSE(cfg.schema.at("SCORE").percent_scale);
  CHECK(cfg.schema.at("RATE").percent_scale);

  REQUIRE(cfg.recode.count("AREA"));
  const auto& mapping = cfg.recode.at("AREA");
  REQUIRE(mapping.size() == 2);
  CHECK(mapping[0] == std::pair<std::string, std::string>("N", "North"));
  CHECK(mapping[1] == std::pair<std::string, std::string>("S", "South"));

  CHECK(cfg.strategy == 2);
  CHECK(cfg.blacklist_file == "bl.csv");
  CHECK(cfg.whitelist_file == "wl.csv");
  CHECK(cfg.domains_file == "dom.csv");

  CHECK(cfg.score == ScoreType::AIC);
  CHECK(cfg.restarts == 4);  // whitespace around key and value is trimmed
  CHECK(cfg.perturbation == 3);
  CHECK(cfg.seed == 99);
  CHECK(cfg.max_parents == 5);

  CHECK(cfg.replicates == 250);
  CHECK(cfg.strength_threshold == 0.9);
  CHECK(cfg.direction_threshold == 0.75);
  CHECK(cfg.averaging_seed == 7);

  CHECK(cfg.folds == 5);
  CHECK(cfg.cv_seed == 11);
  CHECK(cfg.standardize);
  CHECK(cfg.cv_mode == "relearn");
  CHECK(cfg.cv_average);

  CHECK_FALSE(cfg.impute);
  CHECK(cfg.knn_k == 3);
  CHECK(cfg.apply_transforms);
  CHECK(cfg.battery == std::vector<TransformKind>{TransformKind::None, TransformKind::Log,
                                                  TransformKind::BoxCox});

  CHECK(cfg.influence == std::vector<std::string>{"AREA", "SCORE"});
  CHECK(cfg.out_dir == "out/run1");
}

TEST_CASE("minimal config keeps documented defaults") {
  const std::string path = write_config(
      "minimal", "[data]\ncsv = x.csv\n[schema]\nA = continuous\n");
  const RunConfig cfg = parse_run_config(path);

  CHECK(cfg.na == "NA");
  CHECK(cfg.recode.empty());
  CHECK(cfg.strategy == 1);
  CHECK(cfg.blacklist_file.empty());
  CHECK(cfg.score == ScoreType::BIC);
  CHECK(cfg.restarts == 2);
  CHECK(cfg.perturbation == 5);
  CHECK(cfg.seed == 1);
  CHECK(cfg.max_parents == 0);
  CHECK(cfg.replicates == 1000);
  CHECK(cfg.strength_threshold == 0.85);
  CHECK(cfg.direction_threshold == 0.7);
  CHECK(cfg.averaging_seed == 1);
  CHECK(cfg.folds == 10);
  CHECK(cfg.cv_seed == 1);
  CHECK_FALSE(cfg.standardize);
  CHECK(cfg.cv_mode == "fixed");
  CHECK_FALSE(cfg.cv_average);
  CHECK(cfg.impute);
  CHECK(cfg.knn_k == 10);
  CHECK(cfg.apply_transforms);
  CHECK(cfg.battery == default_battery());
  CHECK(cfg.influence.empty());
  CHECK(cfg.out_dir == ".");
}

TEST_CASE("parse errors carry file and line positions") {
  auto expect = [](const std::string& name, const std::string& text,
                   const std::string& needle) {
    const std::string path = write_config(name, text);
    CHECK_THROWS_MATCHES(parse_run_config(path), config_error, MessageMatches(ContainsSubstring(needle)));
  };

  expect("noeq", "[data]\ncsv = x\noops\n", ":3: expected key = value");
  expect("stray", "csv = x\n", ":1: key 'csv' outside any section");
  expect("badsec", "[data\ncsv = x\n", ":1: malformed section header");
  expect("emptysec", "[]\n", ":1: empty section name");
  expect("unknownsec", "[nope]\nx = 1\n", ":2: unknown section [nope]");
  expect("emptykey", "[data]\n= x\n", ":2: empty key");
  expect("unknownkey", "[search]\nfoo = 1\n", "unknown key 'foo' in section [search]");
  expect("badint", "[search]\nrestarts = many\n", "expected an integer, got 'many'");
  expect("badseed", "[search]\nseed = -1\n", "expected a non-negative integer seed");
  expect("badreal", "[averaging]\nstrength_threshold = high\n", "expected a number");
  expect("badbool", "[cv]\nstandardize = maybe\n", "expected a boolean");
  expect("badscore", "[search]\nscore = mdl\n", "score must be bic or aic");
  expect("badmode", "[cv]\nmode = loocv\n", "cv mode must be fixed or relearn");
  expect("badstrategy", "[constraints]\nstrategy = 3\n", "strategy must be 1 or 2");

  expect("badschema1", "[schema]\nA = fuzzy\n", "unknown schema token 'fuzzy'");
  expect("badschema2", "[schema]\nA = percent\n", "needs 'continuous' or 'discrete'");
  expect("badschema3", "[schema]\nA = discrete, percent\n",
         "'percent' applies to continuous columns only");
  expect("badschema4", "[schema]\nA = continuous\nA = discrete\n", "declared twice");

  expect("badrecode1", "[recode]\nA = NorthSouth\n", "recode entries must be old:new");
  expect("badrecode2", "[recode]\nA =\n", "empty recode map");

  expect("badtransform", "[preprocess]\ntransforms = warp\n", "unknown transform name: warp");
  expect("emptybattery", "[preprocess]\ntransforms =\n", "empty transform battery");

  expect("nocsv", "[schema]\nA = continuous\n", "[data] csv is required");
  expect("noschema", "[data]\ncsv = x.csv\n", "[schema] section is required");

  CHECK_THROWS_MATCHES(parse_run_config("/nonexistent/run.ini"), config_error,
                       MessageMatches(ContainsSubstring("cannot open config file")));
}

TEST_CASE("command line overrides reuse the section grammar") {
  const std::string path = write_config(
      "base", "[data]\ncsv = x.csv\n[schema]\nA = continuous\n");
  RunConfig cfg = parse_run_config(path);

  apply_override(cfg, "search.restarts=9");
  CHECK(cfg.restarts == 9);
  apply_override(cfg, "cv.mode=relearn");
  CHECK(cfg.cv_mode == "relearn");
  apply_override(cfg, "  averaging.replicates = 50 ");
  CHECK(cfg.replicates == 50);
  apply_override(cfg, "schema.B=discrete");
  CHECK(cfg.schema.at("B").kind == NodeKind::Discrete);
  CHECK(cfg.schema_order == std::vector<std::string>{"A", "B"});

  CHECK_THROWS_MATCHES(apply_override(cfg, "noequals"), config_error,
                       MessageMatches(ContainsSubstring("--set expects section.key=value")));
  CHECK_THROWS_MATCHES(apply_override(cfg, "nodots=1"), config_error,
                       MessageMatches(ContainsSubstring("--set expects section.key=value")));
  CHECK_THROWS_MATCHES(apply_override(cfg, "search.=1"), config_error,
                       MessageMatches(ContainsSubstring("--set expects section.key=value")));
  CHECK_THROWS_MATCHES(apply_override(cfg, ".key=1"), config_error,
                       MessageMatches(ContainsSubstring("--set expects section.key=value")));
  CHECK_THROWS_MATCHES(apply_override(cfg, "search.bogus=1"), config_error,
                       MessageMatches(ContainsSubstring("unknown key 'bogus'")));
  // bad values point at the override itself rather than a file
  CHECK_THROWS_MATCHES(apply_override(cfg, "search.restarts=lots"), config_error,
                       MessageMatches(ContainsSubstring("--set search.restarts")));
}

TEST_CASE("recodes relabel, merge, and keep dictionaries sorted") {
  const Schema schema = {{"AREA", {NodeKind::Discrete, false}},
                         {"SCORE", {NodeKind::Continuous, false}}};
  const std::string csv =
      "AREA,SCORE\n"
      "South,1\n"
      "North,2\n"
      "Centre,3\n"
      "North,4\n"
      "NA,5\n";

  auto load = [&]() {
    std::istringstream in(csv);
    return read_csv(in, schema);
  };

  SECTION("relabeling re-sorts the dictionary") {
    MixedTable t = load();
    RunConfig cfg;
    cfg.recode["AREA"] = {{"North", "zz"}, {"Centre", "aa"}};
    apply_recodes(t, cfg);
    const Column& area = t.column(t.index_of("AREA"));
    // 'South' sorts before the lowercase labels
    REQUIRE(area.levels == std::vector<std::string>{"South", "aa", "zz"});
    CHECK(area.codes[0] == 0);
    CHECK(area.codes[1] == 2);
    CHECK(area.codes[2] == 1);
    CHECK(area.codes[3] == 2);
    CHECK(area.codes[4] == -1);  // missing cells stay missing
  }

  SECTION("two old labels can merge into one level") {
    MixedTable t = load();
    RunConfig cfg;
    cfg.recode["AREA"] = {{"North", "Coast"}, {"South", "Coast"}};
    apply_recodes(t, cfg);
    const Column& area = t.column(t.index_of("AREA"));
    REQUIRE(area.levels == std::vector<std::string>{"Centre", "Coast"});
    CHECK(area.codes[0] == 1);
    CHECK(area.codes[1] == 1);
    CHECK(area.codes[2] == 0);
    CHECK(area.codes[3] == 1);
    CHECK(area.codes[4] == -1);
  }

  SECTION("bad recode targets are data errors") {
    MixedTable t = load();
    RunConfig cfg;
    cfg.recode["REGION"] = {{"a", "b"}};
    CHECK_THROWS_MATCHES(apply_recodes(t, cfg), data_error,
                         MessageMatches(ContainsSubstring("unknown column REGION")));

    cfg.recode.clear();
    cfg.recode["SCORE"] = {{"1", "one"}};
    CHECK_THROWS_MATCHES(apply_recodes(t, cfg), data_error,
                         MessageMatches(ContainsSubstring("SCORE is not discrete")));

    cfg.recode.clear();
    cfg.recode["AREA"] = {{"East", "E"}};
    CHECK_THROWS_MATCHES(apply_recodes(t, cfg), data_error,
                         MessageMatches(ContainsSubstring("no level 'East'")));
  }
}

TEST_CASE("resolved config lines reproduce the run") {
  const std::string path = write_config("resolved", kFullConfig);
  const RunConfig cfg = parse_run_config(path);
  const std::vector<std::string> lines = resolved_config_lines(cfg);

  auto has = [&](const std::string& line) {
    return std::find(lines.begin(), lines.end(), line) != lines.end();
  };
  CHECK(has("data.csv = data/run.csv"));
  CHECK(has("data.na = ?"));
  CHECK(has("schema.AREA = discrete"));
  CHECK(has("schema.RATE = continuous, percent"));
  CHECK(has("recode.AREA = N:North, S:South"));
  CHECK(has("constraints.strategy = 2"));
  CHECK(has("constraints.domains = dom.csv"));
  CHECK(has("search.score = aic"));
  CHECK(has("search.restarts = 4"));
  CHECK(has("search.seed = 99"));
  CHECK(has("averaging.replicates = 250"));
  CHECK(has("averaging.strength_threshold = 0.9"));
  CHECK(has("averaging.direction_threshold = 0.75"));
  CHECK(has("cv.standardize = true"));
  CHECK(has("cv.mode = relearn"));
  CHECK(has("preprocess.impute = false"));
  CHECK(has("preprocess.transforms = none, log, boxcox"));
  CHECK(has("analyze.influence = AREA, SCORE"));
  CHECK(has("output.dir = out/run1"));

  // schema lines appear in declaration order
  const auto area = std::find(lines.begin(), lines.end(), "schema.AREA = discrete");
  const auto rate = std::find(lines.begin(), lines.end(), "schema.RATE = continuous, percent");
  CHECK(area < rate);

  // unset file paths are omitted rather than rendered empty
  const std::string minimal_path = write_config(
      "resolved_min", "[data]\ncsv = x.csv\n[schema]\nA = continuous\n");
  const std::vector<std::string> min_lines = resolved_config_lines(parse_run_config(minimal_path));
  for (const auto& l : min_lines) {
    CHECK(l.find("constraints.blacklist") == std::string::npos);
    CHECK(l.find("analyze.influence") == std::string::npos);
  }

  // feeding every line back through the override grammar rebuilds the config
  RunConfig rebuilt;
  for (const auto& l : lines) apply_override(rebuilt, l);
  CHECK(resolved_config_lines(rebuilt) == lines);
}
