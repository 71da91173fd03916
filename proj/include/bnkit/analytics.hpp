#pragma once

// Post-estimation queries over (partially directed) networks: influence
// reach, cross-domain connection counts, fundamental-connection inventory,
// degree tables, and the Markdown/DOT renderers the CLI's analyze command
// emits.

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bnkit/dot.hpp"
#include "bnkit/graph.hpp"

namespace bnkit {

struct InfluenceSets {
  std::vector<int> direct;     // children along directed edges
  std::vector<int> indirect;   // reachable along directed paths, beyond direct
  std::vector<int> ambiguous;  // undirected neighbors; direction unresolved
};

// Influence propagates along directed edges only; undirected edges are
// reported separately rather than treated as either direction.
inline InfluenceSets influence_set(const Pdag& g, int source) {
  g.node(source);
  InfluenceSets out;
  out.direct = g.children(source);
  out.ambiguous = g.undirected_neighbors(source);

  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::vector<int> stack(out.direct);
  for (int v : out.direct) seen[static_cast<std::size_t>(v)] = 1;
  std::set<int> reach;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int c : g.children(v)) {
      if (!seen[static_cast<std::size_t>(c)]) {
        seen[static_cast<std::size_t>(c)] = 1;
        stack.push_back(c);
      }
      if (c != source) reach.insert(c);
    }
  }
  for (int v : out.direct) reach.erase(v);
  reach.erase(source);
  out.indirect.assign(reach.begin(), reach.end());
  return out;
}

inline InfluenceSets influence_set(const Dag& d, int source) {
  return influence_set(Pdag::from_dag(d), source);
}

struct DomainConnection {
  std::string partner;
  int multiplicity = 0;  // number of edges joining the two domains
};

struct DomainReport {
  std::string domain;
  int count = 0;  // distinct partner domains, not edges
  std::vector<DomainConnection> partners;
};

// Cross-domain adjacency: any edge (directed or not) whose endpoints map to
// different domains connects them. Continuous nodes must be mapped; discrete
// nodes may be unmapped and their edges are simply skipped.
inline std::vector<DomainReport> domain_connections(
    const Pdag& g, const std::map<std::string, std::string>& domain_map) {
  auto domain_of = [&](int v) -> const std::string* {
    const Node& n = g.node(v);
    auto it = domain_map.find(n.name);
    if (it != domain_map.end()) return &it->second;
    if (n.kind == NodeKind::Continuous)
      throw data_error("continuous indicator not mapped to a domain: " + n.name);
    return nullptr;
  };

  std::map<std::string, std::map<std::string, int>> cross;
  std::set<std::string> domains;
  for (int v = 0; v < g.size(); ++v)
    if (const std::string* d = domain_of(v)) domains.insert(*d);

  auto record = [&](int a, int b) {
    const std::string* da = domain_of(a);
    const std::string* db = domain_of(b);
    if (!da || !db || *da == *db) return;
    ++cross[*da][*db];
    ++cross[*db][*da];
  };
  for (const auto& [from, to] : g.directed_edges()) record(from, to);
  for (const auto& [a, b] : g.undirected_edges()) record(a, b);

  std::vector<DomainReport> out;
  for (const auto& d : domains) {
    DomainReport r;
    r.domain = d;
    auto it = cross.find(d);
    if (it != cross.end()) {
      for (const auto& [partner, mult] : it->second) r.partners.push_back({partner, mult});
      r.count = static_cast<int>(r.partners.size());
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct ConnectionTriple {
  int a = -1;
  int z = -1;  // center
  int b = -1;
  Connection connection;
};

// Every two-edge triple formed by directed edges, each counted once: serial
// a->z->b, diverging a<-z->b and converging a->z<-b with a < b. Undirected
// edges never participate, but do count as adjacency when deciding whether a
// converging triple is a v-structure.
inline std::vector<ConnectionTriple> connection_inventory(const Pdag& g) {
  std::vector<ConnectionTriple> out;
  for (int z = 0; z < g.size(); ++z) {
    const auto& in = g.parents(z);
    const auto& outn = g.children(z);
    for (int a : in)
      for (int b : outn)
        if (a != b) out.push_back({a, z, b, {ConnectionKind::Serial, false}});
    for (std::size_t i = 0; i < outn.size(); ++i)
      for (std::size_t j = i + 1; j < outn.size(); ++j)
        out.push_back({outn[i], z, outn[j], {ConnectionKind::Diverging, false}});
    for (std::size_t i = 0; i < in.size(); ++i)
      for (std::size_t j = i + 1; j < in.size(); ++j)
        out.push_back({in[i], z, in[j],
                       {ConnectionKind::Converging, !g.adjacent(in[i], in[j])}});
  }
  return out;
}

inline std::vector<ConnectionTriple> connection_inventory(const Dag& d) {
  return connection_inventory(Pdag::from_dag(d));
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string name_list(const Pdag& g, const std::vector<int>& nodes) {
  if (nodes.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += ", ";
    out += g.node(nodes[i]).name;
  }
  return out;
}

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

// Markdown report: edges, components, degree table with Average/St.Dev.
// footer rows, connection counts, plus influence and domain sections when
// sources / a domain map are supplied.
inline std::string analytics_markdown(const Pdag& g,
                                      const std::vector<std::string>& influence_sources = {},
                                      const std::map<std::string, std::string>& domain_map = {}) {
  std::ostringstream out;
  out << "# Network report\n\n";
  out << "Nodes: " << g.size() << "  \n";
  out << "Directed edges: " << g.directed_edges().size() << "  \n";
  out << "Undirected edges: " << g.undirected_edges().size() << "\n\n";

  const auto components = connected_components(g);
  out << "## Connected components\n\n";
  std::vector<int> isolated;
  int printed = 0;
  for (const auto& comp : components) {
    if (comp.size() == 1) {
      isolated.push_back(comp[0]);
      continue;
    }
    out << "- component " << ++printed << " (" << comp.size() << " nodes): "
        << detail::name_list(g, comp) << "\n";
  }
  if (printed == 0) out << "- no multi-node components\n";
  out << "\nIsolated nodes: " << detail::name_list(g, isolated) << "\n\n";

  out << "## Degrees\n\n";
  out << "| Node | In-degree | Out-degree | Mb size |\n";
  out << "| --- | ---: | ---: | ---: |\n";
  const DegreeTable dt = degrees(g);
  for (const auto& r : dt.rows)
    out << "| " << g.node(r.node).name << " | " << r.in_degree << " | " << r.out_degree
        << " | " << r.mb_size << " |\n";
  out << "| Average | " << detail::fixed2(dt.mean_in) << " | " << detail::fixed2(dt.mean_out)
      << " | " << detail::fixed2(dt.mean_mb) << " |\n";
  out << "| St.Dev. | " << detail::fixed2(dt.sd_in) << " | " << detail::fixed2(dt.sd_out)
      << " | " << detail::fixed2(dt.sd_mb) << " |\n\n";

  const auto inventory = connection_inventory(g);
  std::size_t serial = 0, diverging = 0, converging = 0, vstructures = 0;
  for (const auto& tpl : inventory) {
    switch (tpl.connection.kind) {
      case ConnectionKind::Serial: ++serial; break;
      case ConnectionKind::Diverging: ++diverging; break;
      case ConnectionKind::Converging:
        ++converging;
        if (tpl.connection.v_structure) ++vstructures;
        break;
    }
  }
  out << "## Fundamental connections\n\n";
  out << "- serial: " << serial << "\n";
  out << "- diverging: " << diverging << "\n";
  out << "- converging: " << converging << " (v-structures: " << vstructures << ")\n\n";

  if (!influence_sources.empty()) {
    out << "## Influence\n\n";
    for (const auto& name : influence_sources) {
      const int v = g.index_of(name);
      const InfluenceSets s = influence_set(g, v);
      out << "### " << name << "\n\n";
      out << "- direct (" << s.direct.size() << "): " << detail::name_list(g, s.direct) << "\n";
      out << "- indirect (" << s.indirect.size() << "): " << detail::name_list(g, s.indirect)
          << "\n";
      out << "- ambiguous adjacency (" << s.ambiguous.size() << "): "
          << detail::name_list(g, s.ambiguous) << "\n\n";
    }
  }

  if (!domain_map.empty()) {
    out << "## Domain connections\n\n";
    out << "| Domain | Number | Connected domains |\n";
    out << "| --- | ---: | --- |\n";
    for (const auto& r : domain_connections(g, domain_map)) {
      out << "| " << r.domain << " | " << r.count << " | ";
      if (r.partners.empty()) out << "(none)";
      for (std::size_t i = 0; i < r.partners.size(); ++i) {
        if (i) out << ", ";
        out << r.partners[i].partner;
        if (r.partners[i].multiplicity > 1) out << " (" << r.partners[i].multiplicity << ")";
      }
      out << " |\n";
    }
    out << "\n";
  }
  return out.str();
}

// DOT with nodes filled by domain color (palette cycles over the sorted
// domain names); unmapped nodes stay unfilled.
inline std::string domain_colored_dot(const Pdag& g,
                                      const std::map<std::string, std::string>& domain_map,
                                      const std::vector<std::string>& comments = {}) {
  static const std::vector<std::string> palette = {
      "#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f", "#cab2d6", "#ffff99",
      "#1f78b4", "#33a02c", "#e31a1c", "#ff7f00", "#6a3d9a", "#b15928"};
  std::set<std::string> domains;
  for (const auto& [node, domain] : domain_map) {
    (void)node;
    domains.insert(domain);
  }
  std::map<std::string, std::string> color_of;
  std::size_t i = 0;
  for (const auto& d : domains) color_of[d] = palette[i++ % palette.size()];

  DotOptions opt;
  opt.graph_name = "network";
  opt.header_comments = comments;
  for (int v = 0; v < g.size(); ++v) {
    auto it = domain_map.find(g.node(v).name);
    if (it != domain_map.end()) opt.node_fill[v] = color_of[it->second];
  }
  return to_dot(g, opt);
}

}  // namespace bnkit
