// Batch command-line driver. Every subcommand reads an INI run configuration
// (optionally patched by --set section.key=value) and writes its artifacts
// into the output directory with the resolved configuration embedded, so a
// finished run directory is self-describing and reproducible.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 data error,
// 3 modelling error (fit, transform, graph, argument).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnkit/config.hpp"
#include "bnkit/constraints.hpp"
#include "bnkit/impute.hpp"
#include "bnkit/json_io.hpp"
#include "bnkit/transform.hpp"

namespace {

using namespace bnkit;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;  // overrides [output] dir when set
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_threads) {
  cmd->add_option("-c,--config", args.config_path, "Run configuration file")
      ->required();
  cmd->add_option("--set", args.overrides,
                  "Override a configuration entry (section.key=value); repeatable");
  cmd->add_option("-o,--out", args.out_dir, "Output directory (default: [output] dir)");
  if (with_threads)
    cmd->add_option("-t,--threads", args.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = parse_run_config(args.config_path);
  for (const auto& assignment : args.overrides) apply_override(cfg, assignment);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

MixedTable load_table(const RunConfig& cfg) {
  CsvOptions opt;
  opt.na_sentinel = cfg.na;
  MixedTable t = read_csv_file(cfg.csv, cfg.schema, opt);
  apply_recodes(t, cfg);
  return t;
}

MixedTable load_complete_table(const RunConfig& cfg) {
  MixedTable t = load_table(cfg);
  if (!t.complete())
    throw data_error(cfg.csv + " has " + std::to_string(t.missing_count()) +
                     " missing cells; run the preprocess step first");
  return t;
}

ConstraintSet constraints_from_config(const RunConfig& cfg, const std::vector<Node>& nodes) {
  std::vector<std::pair<std::string, std::string>> denied;
  if (!cfg.blacklist_file.empty()) denied = read_blacklist_file(cfg.blacklist_file);
  ConstraintSet cs;
  if (cfg.strategy == 2) {
    if (cfg.domains_file.empty())
      throw config_error("constraints.strategy = 2 requires constraints.domains");
    cs = strategy2_whitelist(nodes, read_domain_map_file(cfg.domains_file), denied);
  } else {
    cs = strategy1_blacklist(nodes, denied);
  }
  if (!cfg.whitelist_file.empty())
    for (const auto& e : read_whitelist_file(cfg.whitelist_file)) cs.whitelist.push_back(e);
  return cs;
}

SearchConfig search_from_config(const RunConfig& cfg) {
  SearchConfig sc;
  sc.restarts = cfg.restarts;
  sc.perturbation = cfg.perturbation;
  sc.score = cfg.score;
  sc.seed = cfg.seed;
  sc.max_parents = cfg.max_parents;
  return sc;
}

AveragingConfig averaging_from_config(const RunConfig& cfg, int threads) {
  AveragingConfig ac;
  ac.replicates = cfg.replicates;
  ac.strength_threshold = cfg.strength_threshold;
  ac.direction_threshold = cfg.direction_threshold;
  ac.seed = cfg.averaging_seed;
  ac.threads = threads;
  return ac;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// preprocess: impute missing cells, then pick and apply a normalization
// transform per continuous column. Emits cleaned.csv + preprocess.json.

int run_preprocess(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  MixedTable t = load_table(cfg);

  ordered_json report;
  report["config"] = config_json(cfg);
  report["rows"] = t.n_rows();
  report["missing_cells"] = t.missing_count();

  if (cfg.impute && !t.complete()) {
    auto [imputed, imp_report] = knn_impute(t, cfg.knn_k);
    t = std::move(imputed);
    report["imputation"] = imputation_json(imp_report);
    std::cout << "imputed " << imp_report.cells_imputed << " cells (k=" << imp_report.k
              << ")\n";
  }

  if (cfg.apply_transforms) {
    if (!t.complete())
      throw data_error("transform selection needs complete data; enable imputation or "
                       "provide a complete table");
    ordered_json transforms = ordered_json::array();
    for (int j = 0; j < t.n_cols(); ++j) {
      Column& col = t.column(j);
      if (col.kind != NodeKind::Continuous) continue;
      const TransformSpec spec =
          select_transform(col.values, cfg.battery, col.name, col.percent_scale);
      if (spec.kind != TransformKind::None) col.values = apply_transform(spec, col.values);
      transforms.push_back(transform_json(spec));
      std::cout << col.name << ": " << transform_name(spec.kind) << "\n";
    }
    report["transforms"] = transforms;
  }

  write_csv_file(out_path(cfg, "cleaned.csv"), t, resolved_config_lines(cfg),
                 CsvOptions{cfg.na});
  write_json_file(out_path(cfg, "preprocess.json"), report);
  std::cout << "wrote " << out_path(cfg, "cleaned.csv") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// learn: constrained hill-climb on the full table, then a parameter fit of the
// winning structure. Emits graph.json + graph.dot + trace.json.

int run_learn(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const MixedTable t = load_complete_table(cfg);
  const ConstraintSet cs = constraints_from_config(cfg, t.schema_nodes());

  const SearchResult result = hill_climb(t, cs, search_from_config(cfg));
  const ClgbnFit f = fit(result.dag, t);

  ordered_json graph = fit_json(f);
  graph["score"] = score_name(cfg.score);
  graph["config"] = config_json(cfg);
  write_json_file(out_path(cfg, "graph.json"), graph);

  ordered_json trace = trace_json(result.trace, result.dag);
  trace["config"] = config_json(cfg);
  write_json_file(out_path(cfg, "trace.json"), trace);

  DotOptions dot;
  dot.graph_name = "learned";
  dot.header_comments = resolved_config_lines(cfg);
  write_text_file(out_path(cfg, "graph.dot"), to_dot(result.dag, dot));

  for (const auto& w : f.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("%zu edges, %s = %.2f after %zu accepted moves\n", result.dag.edges().size(),
              score_name(cfg.score), result.trace.final_score,
              result.trace.iterations.size());
  std::cout << "wrote " << out_path(cfg, "graph.json") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// average: bootstrap-resampled searches summarized into a strength-filtered
// partially directed graph. Emits averaged.json + averaged.dot + strengths.csv
// and, with --orient, a fully directed completion.

int run_average(const CommonArgs& args, bool orient) {
  const RunConfig cfg = load_config(args);
  const MixedTable t = load_complete_table(cfg);
  const ConstraintSet cs = constraints_from_config(cfg, t.schema_nodes());

  const AveragedGraph avg =
      learn_averaged(t, cs, search_from_config(cfg), averaging_from_config(cfg, args.threads));

  ordered_json out = averaged_json(avg);
  out["config"] = config_json(cfg);
  write_json_file(out_path(cfg, "averaged.json"), out);
  write_text_file(out_path(cfg, "strengths.csv"),
                  strengths_csv(avg, resolved_config_lines(cfg)));
  write_text_file(out_path(cfg, "averaged.dot"),
                  averaged_dot(avg, resolved_config_lines(cfg)));

  std::printf("%zu directed + %zu undirected edges retained from %d replicates\n",
              avg.pdag.directed_edges().size(), avg.pdag.undirected_edges().size(),
              cfg.replicates);

  if (orient) {
    const Dag oriented = orient_averaged(avg);
    ordered_json oj = dag_json(oriented);
    oj["config"] = config_json(cfg);
    write_json_file(out_path(cfg, "oriented.json"), oj);
    DotOptions dot;
    dot.graph_name = "oriented";
    dot.header_comments = resolved_config_lines(cfg);
    write_text_file(out_path(cfg, "oriented.dot"), to_dot(oriented, dot));
    std::cout << "wrote " << out_path(cfg, "oriented.json") << "\n";
  }
  std::cout << "wrote " << out_path(cfg, "averaged.json") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// analyze: structural report over a previously learned graph (graph.json,
// averaged.json, or oriented.json). Emits report.md + report.json and, when a
// domain map is configured, domains.dot.

int run_analyze(const CommonArgs& args, const std::string& graph_path) {
  const RunConfig cfg = load_config(args);
  const Pdag g = pdag_from_json(read_json_file(graph_path));

  std::map<std::string, std::string> domain_map;
  if (!cfg.domains_file.empty()) domain_map = read_domain_map_file(cfg.domains_file);
  for (const auto& source : cfg.influence) g.index_of(source);  // validate early

  ordered_json report = analytics_json(g, cfg.influence, domain_map);
  report["config"] = config_json(cfg);
  write_json_file(out_path(cfg, "report.json"), report);
  write_text_file(out_path(cfg, "report.md"),
                  analytics_markdown(g, cfg.influence, domain_map));
  if (!domain_map.empty())
    write_text_file(out_path(cfg, "domains.dot"),
                    domain_colored_dot(g, domain_map, resolved_config_lines(cfg)));

  std::cout << "wrote " << out_path(cfg, "report.md") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// cv: k-fold evaluation of predictive accuracy on the continuous nodes, with
// either a fixed structure (--graph) or per-fold relearning. Emits cv.json +
// cv.txt.

int run_cv(const CommonArgs& args, const std::string& graph_path) {
  const RunConfig cfg = load_config(args);
  const MixedTable t = load_complete_table(cfg);

  CvConfig cv_cfg;
  cv_cfg.folds = cfg.folds;
  cv_cfg.seed = cfg.cv_seed;
  cv_cfg.standardize = cfg.standardize;
  cv_cfg.threads = args.threads;

  CvReport report;
  if (cfg.cv_mode == "fixed") {
    if (graph_path.empty())
      throw config_error("cv.mode = fixed requires --graph with a learned structure");
    report = cross_validate(t, dag_from_json(read_json_file(graph_path)), cv_cfg);
  } else {
    RelearnSpec spec;
    spec.constraints = constraints_from_config(cfg, t.schema_nodes());
    spec.search = search_from_config(cfg);
    spec.average = cfg.cv_average;
    spec.averaging = averaging_from_config(cfg, 1);
    report = cross_validate(t, spec, cv_cfg);
  }

  ordered_json out = cv_json(report);
  out["config"] = config_json(cfg);
  write_json_file(out_path(cfg, "cv.json"), out);

  std::ostringstream text;
  text << report.folds << "-fold cross-validation (" << report.mode << " structure, seed "
       << report.seed << (report.standardized ? ", standardized" : "") << ")\n\n";
  for (const auto& [name, mse] : report.per_node_mse) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-20s %.6g\n", name.c_str(), mse);
    text << buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-20s %.6g\n", "posterior MSE", report.posterior_mse);
  text << "\n" << buf;
  if (report.fallback_predictions)
    text << report.fallback_predictions << " predictions used the marginal fallback\n";
  write_text_file(out_path(cfg, "cv.txt"), text.str());

  std::cout << text.str();
  std::cout << "wrote " << out_path(cfg, "cv.json") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare: rank finished run directories (graph.json required, cv.json
// optional) by BIC / AIC / posterior MSE. Emits compare.txt + compare.json.

int run_compare(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  std::vector<ComparisonEntry> entries;
  for (const auto& dir : run_dirs) {
    std::filesystem::path p(dir);
    const ordered_json graph = read_json_file((p / "graph.json").string());
    ComparisonEntry e;
    e.label = p.filename().string().empty() ? p.parent_path().filename().string()
                                            : p.filename().string();
    e.bic = graph.at("bic").get<double>();
    e.aic = graph.at("aic").get<double>();
    const auto cv_path = p / "cv.json";
    if (std::filesystem::exists(cv_path))
      e.posterior_mse = read_json_file(cv_path.string()).at("posterior_mse").get<double>();
    entries.push_back(std::move(e));
  }

  const std::vector<RankedEntry> ranked = compare_models(entries);
  const std::string table = comparison_table(ranked);

  std::filesystem::create_directories(out_dir);
  const auto base = std::filesystem::path(out_dir);
  write_text_file((base / "compare.txt").string(), table);
  write_json_file((base / "compare.json").string(), comparison_json(ranked));

  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid Bayesian-network learning over mixed discrete/continuous tables"};
  app.require_subcommand(1);

  CommonArgs preprocess_args;
  add_common(app.add_subcommand("preprocess",
                                "Impute missing cells and normalize continuous columns"),
             preprocess_args, false);

  CommonArgs learn_args;
  add_common(app.add_subcommand("learn", "Learn a single structure by scored hill-climbing"),
             learn_args, false);

  CommonArgs average_args;
  bool orient = false;
  CLI::App* average_cmd =
      app.add_subcommand("average", "Bootstrap-average structures across resamples");
  add_common(average_cmd, average_args, true);
  average_cmd->add_flag("--orient", orient,
                        "Also emit a fully directed completion of the averaged graph");

  CommonArgs analyze_args;
  std::string analyze_graph;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Report structure analytics for a learned graph");
  add_common(analyze_cmd, analyze_args, false);
  analyze_cmd->add_option("-g,--graph", analyze_graph, "Learned graph JSON to analyze")
      ->required();

  CommonArgs cv_args;
  std::string cv_graph;
  CLI::App* cv_cmd =
      app.add_subcommand("cv", "Cross-validate predictive accuracy on continuous nodes");
  add_common(cv_cmd, cv_args, true);
  cv_cmd->add_option("-g,--graph", cv_graph, "Fixed structure JSON (cv.mode = fixed)");

  std::vector<std::string> compare_dirs;
  std::string compare_out = ".";
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Rank finished run directories by score");
  compare_cmd->add_option("dirs", compare_dirs, "Run directories containing graph.json")
      ->required()
      ->expected(-2);
  compare_cmd->add_option("-o,--out", compare_out, "Output directory for the comparison");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("preprocess")) return run_preprocess(preprocess_args);
    if (app.got_subcommand("learn")) return run_learn(learn_args);
    if (app.got_subcommand("average")) return run_average(average_args, orient);
    if (app.got_subcommand("analyze")) return run_analyze(analyze_args, analyze_graph);
    if (app.got_subcommand("cv")) return run_cv(cv_args, cv_graph);
    if (app.got_subcommand("compare")) return run_compare(compare_dirs, compare_out);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
