#pragma once

// JSON emission and ingestion for all pipeline artifacts. Keys are emitted in
// insertion order (ordered_json) so identical runs serialize byte-for-byte.

#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bnkit/analytics.hpp"
#include "bnkit/averaging.hpp"
#include "bnkit/clgbn.hpp"
#include "bnkit/config.hpp"
#include "bnkit/graph.hpp"
#include "bnkit/impute.hpp"
#include "bnkit/search.hpp"
#include "bnkit/transform.hpp"
#include "bnkit/validation.hpp"

namespace bnkit {

using ordered_json = nlohmann::ordered_json;

inline ordered_json config_json(const RunConfig& cfg) {
  ordered_json out = ordered_json::object();
  for (const auto& line : resolved_config_lines(cfg)) {
    const auto eq = line.find(" = ");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

inline ordered_json nodes_json(const std::vector<Node>& nodes) {
  ordered_json out = ordered_json::array();
  for (const auto& n : nodes)
    out.push_back({{"name", n.name}, {"kind", kind_name(n.kind)}});
  return out;
}

inline ordered_json dag_json(const Dag& d) {
  ordered_json out;
  out["nodes"] = nodes_json(d.nodes());
  ordered_json edges = ordered_json::array();
  for (const auto& [from, to] : d.edges())
    edges.push_back({d.node(from).name, d.node(to).name});
  out["edges"] = edges;
  return out;
}

inline ordered_json pdag_json(const Pdag& g) {
  ordered_json out;
  out["nodes"] = nodes_json(g.nodes());
  ordered_json directed = ordered_json::array();
  for (const auto& [from, to] : g.directed_edges())
    directed.push_back({g.node(from).name, g.node(to).name});
  out["directed_edges"] = directed;
  ordered_json undirected = ordered_json::array();
  for (const auto& [a, b] : g.undirected_edges())
    undirected.push_back({g.node(a).name, g.node(b).name});
  out["undirected_edges"] = undirected;
  return out;
}

namespace detail {

inline std::vector<Node> nodes_from_json(const ordered_json& arr) {
  std::vector<Node> nodes;
  for (const auto& n : arr) {
    const std::string kind = n.at("kind").get<std::string>();
    if (kind != "discrete" && kind != "continuous")
      throw data_error("graph JSON: unknown node kind '" + kind + "'");
    nodes.push_back({n.at("name").get<std::string>(),
                     kind == "discrete" ? NodeKind::Discrete : NodeKind::Continuous});
  }
  return nodes;
}

}  // namespace detail

// Accepts the output of dag_json.
inline Dag dag_from_json(const ordered_json& j) {
  Dag d(detail::nodes_from_json(j.at("nodes")));
  for (const auto& e : j.at("edges"))
    d.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
  return d;
}

// Accepts the output of either pdag_json or dag_json.
inline Pdag pdag_from_json(const ordered_json& j) {
  Pdag g(detail::nodes_from_json(j.at("nodes")));
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges"))
      g.add_directed(g.index_of(e.at(0).get<std::string>()),
                     g.index_of(e.at(1).get<std::string>()));
    return g;
  }
  for (const auto& e : j.at("directed_edges"))
    g.add_directed(g.index_of(e.at(0).get<std::string>()),
                   g.index_of(e.at(1).get<std::string>()));
  for (const auto& e : j.at("undirected_edges"))
    g.add_undirected(g.index_of(e.at(0).get<std::string>()),
                     g.index_of(e.at(1).get<std::string>()));
  return g;
}

inline ordered_json fit_json(const ClgbnFit& f) {
  ordered_json out = dag_json(f.dag);
  out["loglik"] = f.loglik;
  out["n_params"] = f.n_params;
  out["n_obs"] = f.n_obs;
  out["bic"] = bic(f);
  out["aic"] = aic(f);
  ordered_json locals = ordered_json::array();
  for (int v = 0; v < f.dag.size(); ++v) {
    ordered_json lj;
    lj["node"] = f.dag.node(v).name;
    if (const auto* ld = std::get_if<LocalDiscrete>(&f.locals[static_cast<std::size_t>(v)])) {
      lj["type"] = "discrete";
      ordered_json parents = ordered_json::array();
      for (int p : ld->discrete_parents) parents.push_back(f.dag.node(p).name);
      lj["discrete_parents"] = parents;
      lj["cpt"] = ld->cpt;
    } else {
      const auto& lg = std::get<LocalGaussian>(f.locals[static_cast<std::size_t>(v)]);
      lj["type"] = "gaussian";
      ordered_json dparents = ordered_json::array();
      for (int p : lg.discrete_parents) dparents.push_back(f.dag.node(p).name);
      lj["discrete_parents"] = dparents;
      ordered_json cparents = ordered_json::array();
      for (int p : lg.continuous_parents) cparents.push_back(f.dag.node(p).name);
      lj["continuous_parents"] = cparents;
      ordered_json configs = ordered_json::array();
      for (std::size_t c = 0; c < lg.coef.size(); ++c)
        configs.push_back({{"coefficients", lg.coef[c]},
                           {"variance", lg.variance[c]},
                           {"seen", lg.config_seen[c] != 0}});
      lj["configurations"] = configs;
    }
    locals.push_back(std::move(lj));
  }
  out["local_distributions"] = locals;
  if (!f.warnings.empty()) out["warnings"] = f.warnings;
  return out;
}

inline ordered_json trace_json(const SearchTrace& trace, const Dag& d) {
  ordered_json out;
  out["initial_score"] = trace.initial_score;
  out["final_score"] = trace.final_score;
  out["restarts_taken"] = trace.restarts_taken;
  ordered_json its = ordered_json::array();
  for (const auto& e : trace.iterations) {
    its.push_back({{"move", move_name(e.move.kind)},
                   {"from", d.node(e.move.from).name},
                   {"to", d.node(e.move.to).name},
                   {"delta", e.delta},
                   {"restart", e.restart},
                   {"perturbation", e.perturbation}});
  }
  out["iterations"] = its;
  return out;
}

inline ordered_json averaged_json(const AveragedGraph& g) {
  ordered_json out = pdag_json(g.pdag);
  out["replicates"] = g.config.replicates;
  out["strength_threshold"] = g.config.strength_threshold;
  out["direction_threshold"] = g.config.direction_threshold;
  out["seed"] = g.config.seed;
  ordered_json strengths = ordered_json::array();
  for (const auto& e : g.strengths)
    strengths.push_back({{"from", g.pdag.node(e.a).name},
                         {"to", g.pdag.node(e.b).name},
                         {"strength", e.strength},
                         {"direction", e.direction_ab}});
  out["strengths"] = strengths;
  ordered_json reps = ordered_json::array();
  for (const auto& r : g.replicates)
    reps.push_back({{"seed", r.seed}, {"score", r.score}, {"edges", r.n_edges}});
  out["replicate_summaries"] = reps;
  return out;
}

inline ordered_json cv_json(const CvReport& r) {
  ordered_json out;
  out["mode"] = r.mode;
  out["folds"] = r.folds;
  out["seed"] = r.seed;
  out["standardized"] = r.standardized;
  out["posterior_mse"] = r.posterior_mse;
  ordered_json per_node = ordered_json::object();
  for (const auto& [name, mse] : r.per_node_mse) per_node[name] = mse;
  out["per_node_mse"] = per_node;
  out["fallback_predictions"] = r.fallback_predictions;
  return out;
}

inline ordered_json imputation_json(const ImputationReport& r) {
  ordered_json out;
  out["k"] = r.k;
  out["cells_imputed"] = r.cells_imputed;
  ordered_json per_column = ordered_json::object();
  for (const auto& [name, count] : r.per_column) per_column[name] = count;
  out["per_column"] = per_column;
  return out;
}

inline ordered_json transform_json(const TransformSpec& s) {
  ordered_json out;
  out["column"] = s.column;
  out["kind"] = transform_name(s.kind);
  if (s.kind == TransformKind::BoxCox || s.kind == TransformKind::YeoJohnson)
    out["lambda"] = s.lambda;
  if (s.kind == TransformKind::Arcsin) out["percent_scale"] = s.percent_scale;
  out["normality_score"] = s.normality_score;
  return out;
}

inline ordered_json analytics_json(const Pdag& g,
                                   const std::vector<std::string>& influence_sources = {},
                                   const std::map<std::string, std::string>& domain_map = {}) {
  ordered_json out = pdag_json(g);

  ordered_json comps = ordered_json::array();
  ordered_json isolated = ordered_json::array();
  for (const auto& comp : connected_components(g)) {
    if (comp.size() == 1) {
      isolated.push_back(g.node(comp[0]).name);
      continue;
    }
    ordered_json members = ordered_json::array();
    for (int v : comp) members.push_back(g.node(v).name);
    comps.push_back(std::move(members));
  }
  out["components"] = comps;
  out["isolated"] = isolated;

  const DegreeTable dt = degrees(g);
  ordered_json rows = ordered_json::array();
  for (const auto& r : dt.rows)
    rows.push_back({{"node", g.node(r.node).name},
                    {"in_degree", r.in_degree},
                    {"out_degree", r.out_degree},
                    {"mb_size", r.mb_size}});
  out["degrees"] = rows;
  out["degree_mean"] = {{"in_degree", dt.mean_in}, {"out_degree", dt.mean_out},
                        {"mb_size", dt.mean_mb}};
  out["degree_sd"] = {{"in_degree", dt.sd_in}, {"out_degree", dt.sd_out},
                      {"mb_size", dt.sd_mb}};

  std::size_t serial = 0, diverging = 0, converging = 0, vstructures = 0;
  for (const auto& t : connection_inventory(g)) {
    switch (t.connection.kind) {
      case ConnectionKind::Serial: ++serial; break;
      case ConnectionKind::Diverging: ++diverging; break;
      case ConnectionKind::Converging:
        ++converging;
        if (t.connection.v_structure) ++vstructures;
        break;
    }
  }
  out["connections"] = {{"serial", serial},
                        {"diverging", diverging},
                        {"converging", converging},
                        {"v_structures", vstructures}};

  if (!influence_sources.empty()) {
    ordered_json inf = ordered_json::object();
    for (const auto& name : influence_sources) {
      const InfluenceSets s = influence_set(g, g.index_of(name));
      auto names = [&](const std::vector<int>& vs) {
        ordered_json a = ordered_json::array();
        for (int v : vs) a.push_back(g.node(v).name);
        return a;
      };
      inf[name] = {{"direct", names(s.direct)},
                   {"indirect", names(s.indirect)},
                   {"ambiguous", names(s.ambiguous)}};
    }
    out["influence"] = inf;
  }

  if (!domain_map.empty()) {
    ordered_json doms = ordered_json::array();
    for (const auto& r : domain_connections(g, domain_map)) {
      ordered_json partners = ordered_json::array();
      for (const auto& p : r.partners)
        partners.push_back({{"domain", p.partner}, {"edges", p.multiplicity}});
      doms.push_back({{"domain", r.domain}, {"connected_domains", r.count},
                      {"partners", partners}});
    }
    out["domain_connections"] = doms;
  }
  return out;
}

inline ordered_json comparison_json(const std::vector<RankedEntry>& ranked) {
  ordered_json out = ordered_json::array();
  for (const auto& r : ranked) {
    ordered_json e;
    e["label"] = r.entry.label;
    e["bic"] = r.entry.bic;
    e["aic"] = r.entry.aic;
    if (!std::isnan(r.entry.posterior_mse)) e["posterior_mse"] = r.entry.posterior_mse;
    e["rank_bic"] = r.rank_bic;
    e["rank_aic"] = r.rank_aic;
    if (r.rank_mse > 0) e["rank_mse"] = r.rank_mse;
    out.push_back(std::move(e));
  }
  return out;
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

inline ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw data_error(path + ": " + e.what());
  }
}

}  // namespace bnkit
