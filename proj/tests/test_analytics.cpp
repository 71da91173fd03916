#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bnkit/analytics.hpp"
#include "bnkit/graph.hpp"
#include "oracles.hpp"

using namespace bnkit;

namespace {

Pdag chain_with_extras() {
  // A -> B -> C -> D, A - E, F isolated
  Pdag g;
  for (const char* n : {"A", "B", "C", "D", "E", "F"}) g.add_node(n, NodeKind::Continuous);
  g.add_directed(0, 1);
  g.add_directed(1, 2);
  g.add_directed(2, 3);
  g.add_undirected(0, 4);
  return g;
}

}  // namespace

TEST_CASE("influence splits direct, indirect, and ambiguous reach") {
  const Pdag g = chain_with_extras();

  const InfluenceSets a = influence_set(g, 0);
  CHECK(a.direct == std::vector<int>{1});
  CHECK(a.indirect == std::vector<int>{2, 3});
  CHECK(a.ambiguous == std::vector<int>{4});

  const InfluenceSets b = influence_set(g, 1);
  CHECK(b.direct == std::vector<int>{2});
  CHECK(b.indirect == std::vector<int>{3});
  CHECK(b.ambiguous.empty());

  const InfluenceSets d = influence_set(g, 3);
  CHECK(d.direct.empty());
  CHECK(d.indirect.empty());
  CHECK(d.ambiguous.empty());

  // the undirected edge is symmetric
  const InfluenceSets e = influence_set(g, 4);
  CHECK(e.direct.empty());
  CHECK(e.indirect.empty());
  CHECK(e.ambiguous == std::vector<int>{0});

  CHECK_THROWS_AS(influence_set(g, -1), graph_error);
  CHECK_THROWS_AS(influence_set(g, 6), graph_error);
}

TEST_CASE("influence never propagates through undirected edges") {
  Pdag g;
  for (const char* n : {"A", "B", "C"}) g.add_node(n, NodeKind::Continuous);
  g.add_undirected(0, 1);
  g.add_directed(1, 2);

  const InfluenceSets a = influence_set(g, 0);
  CHECK(a.direct.empty());
  CHECK(a.indirect.empty());  // C is only reachable via the undirected edge
  CHECK(a.ambiguous == std::vector<int>{1});
}

TEST_CASE("nodes that are both children and deeper descendants stay direct") {
  Pdag tri;
  for (const char* n : {"A", "B", "C"}) tri.add_node(n, NodeKind::Continuous);
  tri.add_directed(0, 1);
  tri.add_directed(0, 2);
  tri.add_directed(1, 2);
  const InfluenceSets a = influence_set(tri, 0);
  CHECK(a.direct == std::vector<int>{1, 2});
  CHECK(a.indirect.empty());

  Pdag diamond;
  for (const char* n : {"A", "B", "C", "D"}) diamond.add_node(n, NodeKind::Continuous);
  diamond.add_directed(0, 1);
  diamond.add_directed(0, 2);
  diamond.add_directed(1, 3);
  diamond.add_directed(2, 3);
  const InfluenceSets d = influence_set(diamond, 0);
  CHECK(d.direct == std::vector<int>{1, 2});
  CHECK(d.indirect == std::vector<int>{3});
}

TEST_CASE("influence on a dag equals its descendant sets") {
  Rng rng(4021);
  const int n = 8;
  for (int rep = 0; rep < 50; ++rep) {
    const oracle::Edges edges = oracle::random_dag_edges(rng, n, 0.3);
    std::vector<Node> nodes;
    for (int v = 0; v < n; ++v) nodes.push_back({"X" + std::to_string(v), NodeKind::Continuous});
    Dag d(nodes);
    for (const auto& [from, to] : edges) d.add_edge(from, to);

    const oracle::PathOracle po(n, edges);
    const Pdag view = Pdag::from_dag(d);
    for (int v = 0; v < n; ++v) {
      const InfluenceSets got = influence_set(d, v);
      // the dag overload is just the pdag view
      const InfluenceSets via = influence_set(view, v);
      REQUIRE(got.direct == via.direct);
      REQUIRE(got.indirect == via.indirect);
      REQUIRE(got.ambiguous.empty());

      std::set<int> reached(got.direct.begin(), got.direct.end());
      reached.insert(got.indirect.begin(), got.indirect.end());
      std::set<int> expect;
      for (int u = 0; u < n; ++u)
        if (u != v && (po.desc_mask[static_cast<std::size_t>(v)] >> u) & 1u) expect.insert(u);
      REQUIRE(reached == expect);

      // direct and indirect never overlap
      for (int u : got.direct)
        REQUIRE(!std::binary_search(got.indirect.begin(), got.indirect.end(), u));
    }
  }
}

TEST_CASE("domain connections count distinct partner domains, not edges") {
  Pdag g;
  g.add_node("D", NodeKind::Discrete);
  for (const char* n : {"a1", "a2", "b1", "g1", "e1"}) g.add_node(n, NodeKind::Continuous);
  const int a1 = 1, a2 = 2, b1 = 3, g1 = 4;
  g.add_directed(a1, b1);
  g.add_undirected(a2, b1);
  g.add_directed(a1, g1);
  g.add_directed(a1, a2);  // same domain: never counted
  g.add_directed(0, a1);   // unmapped discrete endpoint: skipped

  const std::map<std::string, std::string> dm = {
      {"a1", "alpha"}, {"a2", "alpha"}, {"b1", "beta"}, {"g1", "gamma"}, {"e1", "delta"}};

  const std::vector<DomainReport> reports = domain_connections(g, dm);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].domain == "alpha");
  CHECK(reports[1].domain == "beta");
  CHECK(reports[2].domain == "delta");
  CHECK(reports[3].domain == "gamma");

  CHECK(reports[0].count == 2);
  REQUIRE(reports[0].partners.size() == 2);
  CHECK(reports[0].partners[0].partner == "beta");
  CHECK(reports[0].partners[0].multiplicity == 2);  // one directed + one undirected edge
  CHECK(reports[0].partners[1].partner == "gamma");
  CHECK(reports[0].partners[1].multiplicity == 1);

  CHECK(reports[1].count == 1);
  REQUIRE(reports[1].partners.size() == 1);
  CHECK(reports[1].partners[0].partner == "alpha");
  CHECK(reports[1].partners[0].multiplicity == 2);

  // mapped but touching nothing outside its own domain
  CHECK(reports[2].count == 0);
  CHECK(reports[2].partners.empty());

  CHECK(reports[3].count == 1);
  REQUIRE(reports[3].partners.size() == 1);
  CHECK(reports[3].partners[0].partner == "alpha");
  CHECK(reports[3].partners[0].multiplicity == 1);
}

TEST_CASE("mapped discrete nodes participate; unmapped continuous nodes are an error") {
  Pdag g;
  g.add_node("D", NodeKind::Discrete);
  g.add_node("a1", NodeKind::Continuous);
  g.add_directed(0, 1);

  std::map<std::string, std::string> dm = {{"D", "clinical"}, {"a1", "alpha"}};
  const std::vector<DomainReport> reports = domain_connections(g, dm);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].domain == "alpha");
  CHECK(reports[0].count == 1);
  REQUIRE(reports[0].partners.size() == 1);
  CHECK(reports[0].partners[0].partner == "clinical");
  CHECK(reports[1].domain == "clinical");
  CHECK(reports[1].partners[0].partner == "alpha");

  dm.erase("a1");
  CHECK_THROWS_AS(domain_connections(g, dm), data_error);
  CHECK_THROWS_WITH(domain_connections(g, dm),
                    Catch::Matchers::ContainsSubstring("a1"));
}

TEST_CASE("connection inventory matches pairwise classification on random dags") {
  Rng rng(5530);
  const int n = 8;
  for (int rep = 0; rep < 50; ++rep) {
    const oracle::Edges edges = oracle::random_dag_edges(rng, n, 0.35);
    std::vector<Node> nodes;
    for (int v = 0; v < n; ++v) nodes.push_back({"X" + std::to_string(v), NodeKind::Continuous});
    Dag d(nodes);
    for (const auto& [from, to] : edges) d.add_edge(from, to);

    const std::vector<ConnectionTriple> inventory = connection_inventory(d);

    // every listed triple classifies the same way the two edges do
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& t : inventory) {
      const Connection c = classify_connection(d, t.a, t.z, t.b);
      REQUIRE(c.kind == t.connection.kind);
      REQUIRE(c.v_structure == t.connection.v_structure);
      const auto key = std::make_tuple(std::min(t.a, t.b), t.z, std::max(t.a, t.b));
      REQUIRE(!seen.count(key));  // each unordered triple appears once
      seen.insert(key);
    }

    // and the list is exhaustive: one triple per unordered pair of neighbors
    std::size_t expected = 0;
    for (int z = 0; z < n; ++z) {
      const std::size_t deg = d.parents(z).size() + d.children(z).size();
      expected += deg * (deg - 1) / 2;
    }
    REQUIRE(inventory.size() == expected);
  }
}

TEST_CASE("undirected edges count for adjacency but never form triples") {
  Pdag collider;
  for (const char* n : {"A", "B", "Z"}) collider.add_node(n, NodeKind::Continuous);
  collider.add_directed(0, 2);
  collider.add_directed(1, 2);
  collider.add_undirected(0, 1);
  const std::vector<ConnectionTriple> shielded = connection_inventory(collider);
  REQUIRE(shielded.size() == 1);
  CHECK(shielded[0].a == 0);
  CHECK(shielded[0].z == 2);
  CHECK(shielded[0].b == 1);
  CHECK(shielded[0].connection.kind == ConnectionKind::Converging);
  CHECK_FALSE(shielded[0].connection.v_structure);  // the undirected edge shields it

  Pdag open;
  for (const char* n : {"A", "B", "Z"}) open.add_node(n, NodeKind::Continuous);
  open.add_directed(0, 2);
  open.add_directed(1, 2);
  const std::vector<ConnectionTriple> unshielded = connection_inventory(open);
  REQUIRE(unshielded.size() == 1);
  CHECK(unshielded[0].connection.v_structure);

  Pdag fork;
  for (const char* n : {"Z", "A", "B", "C"}) fork.add_node(n, NodeKind::Continuous);
  fork.add_directed(0, 1);
  fork.add_directed(0, 2);
  fork.add_undirected(0, 3);
  const std::vector<ConnectionTriple> diverging = connection_inventory(fork);
  REQUIRE(diverging.size() == 1);
  CHECK(diverging[0].connection.kind == ConnectionKind::Diverging);
  CHECK(diverging[0].a == 1);
  CHECK(diverging[0].b == 2);

  Pdag half;
  for (const char* n : {"A", "Z", "B"}) half.add_node(n, NodeKind::Continuous);
  half.add_undirected(0, 1);
  half.add_directed(1, 2);
  CHECK(connection_inventory(half).empty());
}

TEST_CASE("markdown report covers structure, degrees, and connections") {
  Pdag g;
  g.add_node("risk", NodeKind::Discrete);
  for (const char* n : {"x1", "x2", "x3", "spare"}) g.add_node(n, NodeKind::Continuous);
  g.add_directed(0, 1);  // risk -> x1
  g.add_directed(2, 1);  // x2 -> x1
  g.add_directed(1, 3);  // x1 -> x3
  g.add_undirected(2, 3);

  const std::map<std::string, std::string> dm = {
      {"x1", "met"}, {"x2", "lip"}, {"x3", "lip"}, {"spare", "met"}};
  const std::string md = analytics_markdown(g, {"risk"}, dm);

  CHECK(md.find("# Network report") == 0);
  CHECK(md.find("Nodes: 5") != std::string::npos);
  CHECK(md.find("Directed edges: 3") != std::string::npos);
  CHECK(md.find("Undirected edges: 1") != std::string::npos);

  CHECK(md.find("- component 1 (4 nodes): risk, x1, x2, x3") != std::string::npos);
  CHECK(md.find("Isolated nodes: spare") != std::string::npos);

  CHECK(md.find("| Node | In-degree | Out-degree | Mb size |") != std::string::npos);
  CHECK(md.find("| x1 | 2 | 1 | 3 |") != std::string::npos);
  CHECK(md.find("| spare | 0 | 0 | 0 |") != std::string::npos);
  CHECK(md.find("| Average | 0.60 | 0.60 | 2.00 |") != std::string::npos);
  CHECK(md.find("| St.Dev. | 0.80 | 0.49 | 1.10 |") != std::string::npos);

  CHECK(md.find("- serial: 2") != std::string::npos);
  CHECK(md.find("- diverging: 0") != std::string::npos);
  CHECK(md.find("- converging: 1 (v-structures: 1)") != std::string::npos);

  CHECK(md.find("### risk") != std::string::npos);
  CHECK(md.find("- direct (1): x1") != std::string::npos);
  CHECK(md.find("- indirect (1): x3") != std::string::npos);
  CHECK(md.find("- ambiguous adjacency (0): (none)") != std::string::npos);

  CHECK(md.find("| Domain | Number | Connected domains |") != std::string::npos);
  CHECK(md.find("| lip | 1 | met (2) |") != std::string::npos);
  CHECK(md.find("| met | 1 | lip (2) |") != std::string::npos);
}

TEST_CASE("markdown report handles empty structure and omits optional sections") {
  Pdag g;
  g.add_node("a", NodeKind::Continuous);
  g.add_node("b", NodeKind::Continuous);
  const std::string md = analytics_markdown(g);

  CHECK(md.find("- no multi-node components") != std::string::npos);
  CHECK(md.find("Isolated nodes: a, b") != std::string::npos);
  CHECK(md.find("- serial: 0") != std::string::npos);
  CHECK(md.find("## Influence") == std::string::npos);
  CHECK(md.find("## Domain connections") == std::string::npos);

  Pdag linked;
  linked.add_node("a", NodeKind::Continuous);
  linked.add_node("b", NodeKind::Continuous);
  linked.add_directed(0, 1);
  const std::string md2 = analytics_markdown(linked);
  CHECK(md2.find("Isolated nodes: (none)") != std::string::npos);

  // unknown influence source propagates as a lookup failure
  CHECK_THROWS_AS(analytics_markdown(linked, {"nope"}), graph_error);
}

TEST_CASE("domain colors follow sorted domain order; unmapped nodes stay plain") {
  Pdag g;
  g.add_node("n1", NodeKind::Continuous);
  g.add_node("n2", NodeKind::Continuous);
  g.add_node("n3", NodeKind::Discrete);
  g.add_directed(0, 1);

  const std::map<std::string, std::string> dm = {{"n1", "zeta"}, {"n2", "alpha"}};
  const std::string dot = domain_colored_dot(g, dm, {"run 7"});

  CHECK(dot.find("// run 7\n") == 0);
  CHECK(dot.find("digraph \"network\" {") != std::string::npos);
  // alpha sorts first and takes the first palette entry
  CHECK(dot.find("\"n2\" [shape=ellipse, style=filled, fillcolor=\"#a6cee3\"];") !=
        std::string::npos);
  CHECK(dot.find("\"n1\" [shape=ellipse, style=filled, fillcolor=\"#b2df8a\"];") !=
        std::string::npos);
  CHECK(dot.find("\"n3\" [shape=box];") != std::string::npos);
  CHECK(dot.find("\"n1\" -> \"n2\";") != std::string::npos);
}
