#pragma once

// Directed acyclic graphs over typed nodes, the structural queries used by
// score-based structure learning (parents, children, Markov blankets,
// d-separation), equivalence-class machinery, and the partially directed
// graphs produced by model averaging.

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bnkit/common.hpp"

namespace bnkit {

enum class NodeKind { Discrete, Continuous };

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Continuous;
};

inline std::string kind_name(NodeKind k) {
  return k == NodeKind::Discrete ? "discrete" : "continuous";
}

namespace detail {

class NodeTable {
 public:
  int add(const std::string& name, NodeKind kind) {
    if (index_.count(name)) throw graph_error("duplicate node name: " + name);
    index_[name] = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{name, kind});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw graph_error("unknown node name: " + name);
    return it->second;
  }

  std::optional<int> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Node& at(int v) const {
    if (v < 0 || v >= static_cast<int>(nodes_.size()))
      throw graph_error("node index out of range: " + std::to_string(v));
    return nodes_[static_cast<std::size_t>(v)];
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Node>& all() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
  std::map<std::string, int> index_;
};

inline void insert_sorted(std::vector<int>& v, int x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

inline void erase_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

}  // namespace detail

// A directed acyclic graph. Every mutation checks acyclicity and leaves the
// graph unchanged when the edit would introduce a cycle or a self-loop.
// Queries are const and safe to run concurrently; mutation is single-writer.
class Dag {
 public:
  Dag() = default;

  explicit Dag(const std::vector<Node>& nodes) {
    for (const auto& n : nodes) add_node(n.name, n.kind);
  }

  int add_node(const std::string& name, NodeKind kind) {
    const int v = nodes_.add(name, kind);
    parents_.emplace_back();
    children_.emplace_back();
    return v;
  }

  int size() const { return nodes_.size(); }
  const Node& node(int v) const { return nodes_.at(v); }
  const std::vector<Node>& nodes() const { return nodes_.all(); }
  int index_of(const std::string& name) const { return nodes_.index_of(name); }
  std::optional<int> find(const std::string& name) const { return nodes_.find(name); }

  bool has_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    const auto& ch = children_[static_cast<std::size_t>(from)];
    return std::binary_search(ch.begin(), ch.end(), to);
  }

  // True iff a directed path from `from` to `to` exists (length >= 1).
  bool has_directed_path(int from, int to) const {
    check_node(from);
    check_node(to);
    std::vector<int> stack{from};
    std::vector<char> seen(static_cast<std::size_t>(size()), 0);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int c : children_[static_cast<std::size_t>(v)]) {
        if (c == to) return true;
        if (!seen[static_cast<std::size_t>(c)]) {
          seen[static_cast<std::size_t>(c)] = 1;
          stack.push_back(c);
        }
      }
    }
    return false;
  }

  bool would_create_cycle(int from, int to) const {
    if (from == to) return true;
    return has_directed_path(to, from);
  }

  void add_edge(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to) throw graph_error("self-loop on node " + node(from).name);
    if (has_edge(from, to))
      throw graph_error("duplicate edge " + node(from).name + " -> " + node(to).name);
    if (has_edge(to, from) || would_create_cycle(from, to))
      throw graph_error("edge " + node(from).name + " -> " + node(to).name +
                        " would create a directed cycle");
    detail::insert_sorted(children_[static_cast<std::size_t>(from)], to);
    detail::insert_sorted(parents_[static_cast<std::size_t>(to)], from);
  }

  void add_edge(const std::string& from, const std::string& to) {
    add_edge(index_of(from), index_of(to));
  }

  void remove_edge(int from, int to) {
    if (!has_edge(from, to))
      throw graph_error("no such edge: " + node(from).name + " -> " + node(to).name);
    detail::erase_sorted(children_[static_cast<std::size_t>(from)], to);
    detail::erase_sorted(parents_[static_cast<std::size_t>(to)], from);
  }

  void reverse_edge(int from, int to) {
    remove_edge(from, to);
    try {
      add_edge(to, from);
    } catch (const graph_error&) {
      add_edge(from, to);  // restore, then rethrow
      throw;
    }
  }

  const std::vector<int>& parents(int v) const {
    check_node(v);
    return parents_[static_cast<std::size_t>(v)];
  }

  const std::vector<int>& children(int v) const {
    check_node(v);
    return children_[static_cast<std::size_t>(v)];
  }

  bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

  int in_degree(int v) const { return static_cast<int>(parents(v).size()); }
  int out_degree(int v) const { return static_cast<int>(children(v).size()); }

  // Parents, children, and the children's other parents.
  std::vector<int> markov_blanket(int v) const {
    check_node(v);
    std::set<int> mb(parents(v).begin(), parents(v).end());
    for (int c : children(v)) {
      mb.insert(c);
      for (int s : parents(c))
        if (s != v) mb.insert(s);
    }
    mb.erase(v);
    return std::vector<int>(mb.begin(), mb.end());
  }

  // Edges in deterministic (parent index, child index) order.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < size(); ++v)
      for (int c : children_[static_cast<std::size_t>(v)]) out.emplace_back(v, c);
    return out;
  }

  int edge_count() const {
    int n = 0;
    for (const auto& ch : children_) n += static_cast<int>(ch.size());
    return n;
  }

  // Kahn's algorithm; among simultaneously available nodes the one declared
  // first is emitted first.
  std::vector<int> topological_order() const {
    std::vector<int> indeg(static_cast<std::size_t>(size()));
    for (int v = 0; v < size(); ++v)
      indeg[static_cast<std::size_t>(v)] = in_degree(v);
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < size(); ++v)
      if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(size()));
    while (!ready.empty()) {
      const int v = ready.top();
      ready.pop();
      order.push_back(v);
      for (int c : children_[static_cast<std::size_t>(v)])
        if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
    return order;
  }

  std::vector<int> descendants(int v) const {
    check_node(v);
    std::vector<char> seen(static_cast<std::size_t>(size()), 0);
    std::vector<int> stack{v};
    std::vector<int> out;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int c : children_[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(c)]) {
          seen[static_cast<std::size_t>(c)] = 1;
          out.push_back(c);
          stack.push_back(c);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  void check_node(int v) const { nodes_.at(v); }

  detail::NodeTable nodes_;
  std::vector<std::vector<int>> parents_;   // sorted
  std::vector<std::vector<int>> children_;  // sorted
};

// Candidate edge set over named nodes: true iff no directed cycle.
inline bool is_acyclic(const std::vector<Node>& nodes,
                       const std::vector<std::pair<std::string, std::string>>& edge_list) {
  detail::NodeTable table;
  for (const auto& n : nodes) table.add(n.name, n.kind);
  const int n = table.size();
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (const auto& [from, to] : edge_list) {
    const int f = table.index_of(from);
    const int t = table.index_of(to);
    if (f == t) return false;
    children[static_cast<std::size_t>(f)].push_back(t);
    ++indeg[static_cast<std::size_t>(t)];
  }
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  int emitted = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++emitted;
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  return emitted == n;
}

// ---------------------------------------------------------------------------
// d-separation

namespace detail {

// Reachability over (node, entry direction) states with collider activation
// through observed ancestors; linear in the number of edges per query.
inline std::vector<char> active_reachable(const Dag& d, const std::vector<int>& sources,
                                          const std::vector<char>& in_z) {
  const int n = d.size();
  // Ancestors of z (inclusive): these activate colliders.
  std::vector<char> anc_z(static_cast<std::size_t>(n), 0);
  {
    std::vector<int> stack;
    for (int v = 0; v < n; ++v)
      if (in_z[static_cast<std::size_t>(v)]) {
        anc_z[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int p : d.parents(v))
        if (!anc_z[static_cast<std::size_t>(p)]) {
          anc_z[static_cast<std::size_t>(p)] = 1;
          stack.push_back(p);
        }
    }
  }

  // State encoding: 2*v for "entered from a child" (trail goes up),
  // 2*v+1 for "entered from a parent" (trail goes down).
  std::vector<char> visited(static_cast<std::size_t>(2 * n), 0);
  std::vector<char> reachable(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  for (int s : sources) {
    stack.push_back(2 * s);  // start as if arriving from below
    reachable[static_cast<std::size_t>(s)] = 1;
  }
  while (!stack.empty()) {
    const int state = stack.back();
    stack.pop_back();
    if (visited[static_cast<std::size_t>(state)]) continue;
    visited[static_cast<std::size_t>(state)] = 1;
    const int v = state / 2;
    const bool from_child = (state % 2) == 0;
    if (from_child) {
      if (!in_z[static_cast<std::size_t>(v)]) {
        for (int p : d.parents(v)) {
          reachable[static_cast<std::size_t>(p)] = 1;
          stack.push_back(2 * p);
        }
        for (int c : d.children(v)) {
          reachable[static_cast<std::size_t>(c)] = 1;
          stack.push_back(2 * c + 1);
        }
      }
    } else {
      if (!in_z[static_cast<std::size_t>(v)]) {
        for (int c : d.children(v)) {
          reachable[static_cast<std::size_t>(c)] = 1;
          stack.push_back(2 * c + 1);
        }
      }
      if (anc_z[static_cast<std::size_t>(v)]) {  // collider opened by evidence
        for (int p : d.parents(v)) {
          reachable[static_cast<std::size_t>(p)] = 1;
          stack.push_back(2 * p);
        }
      }
    }
  }
  return reachable;
}

}  // namespace detail

// True iff every path between x and y is blocked given z. The three sets must
// be pairwise disjoint.
inline bool d_separated(const Dag& d, const std::vector<int>& x, const std::vector<int>& y,
                        const std::vector<int>& z) {
  const int n = d.size();
  std::vector<char> role(static_cast<std::size_t>(n), 0);
  for (int v : x) {
    d.node(v);
    role[static_cast<std::size_t>(v)] = 1;
  }
  for (int v : y) {
    d.node(v);
    if (role[static_cast<std::size_t>(v)] != 0)
      throw argument_error("d_separated: x, y, z must be pairwise disjoint");
    role[static_cast<std::size_t>(v)] = 2;
  }
  std::vector<char> in_z(static_cast<std::size_t>(n), 0);
  for (int v : z) {
    d.node(v);
    if (role[static_cast<std::size_t>(v)] != 0)
      throw argument_error("d_separated: x, y, z must be pairwise disjoint");
    role[static_cast<std::size_t>(v)] = 3;
    in_z[static_cast<std::size_t>(v)] = 1;
  }
  if (x.empty() || y.empty()) return true;
  const std::vector<char> reach = detail::active_reachable(d, x, in_z);
  for (int v : y)
    if (reach[static_cast<std::size_t>(v)]) return false;
  return true;
}

inline bool d_separated(const Dag& d, const std::vector<std::string>& x,
                        const std::vector<std::string>& y, const std::vector<std::string>& z) {
  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<int> out;
    out.reserve(names.size());
    for (const auto& s : names) out.push_back(d.index_of(s));
    return out;
  };
  return d_separated(d, resolve(x), resolve(y), resolve(z));
}

// ---------------------------------------------------------------------------
// Fundamental connections

enum class ConnectionKind { Serial, Diverging, Converging };

struct Connection {
  ConnectionKind kind;
  bool v_structure = false;  // meaningful for Converging only
};

inline const char* connection_name(ConnectionKind k) {
  switch (k) {
    case ConnectionKind::Serial: return "serial";
    case ConnectionKind::Diverging: return "diverging";
    case ConnectionKind::Converging: return "converging";
  }
  return "?";
}

// Classifies the two-edge structure a - z - b. Both edges must exist in some
// orientation and a must differ from b.
inline Connection classify_connection(const Dag& d, int a, int z, int b) {
  if (a == b) throw argument_error("classify_connection: endpoints must differ");
  const bool az = d.has_edge(a, z);
  const bool za = d.has_edge(z, a);
  const bool zb = d.has_edge(z, b);
  const bool bz = d.has_edge(b, z);
  if (!(az || za) || !(zb || bz))
    throw graph_error("classify_connection: triple is not connected through " + d.node(z).name);
  if (za && zb) return {ConnectionKind::Diverging, false};
  if (az && bz) return {ConnectionKind::Converging, !d.adjacent(a, b)};
  return {ConnectionKind::Serial, false};
}

// ---------------------------------------------------------------------------
// Partially directed graphs

class Pdag {
 public:
  Pdag() = default;

  explicit Pdag(const std::vector<Node>& nodes) {
    for (const auto& n : nodes) add_node(n.name, n.kind);
  }

  static Pdag from_dag(const Dag& d) {
    Pdag g(d.nodes());
    for (const auto& [from, to] : d.edges()) g.add_directed(from, to);
    return g;
  }

  int add_node(const std::string& name, NodeKind kind) {
    const int v = nodes_.add(name, kind);
    parents_.emplace_back();
    children_.emplace_back();
    neighbors_.emplace_back();
    return v;
  }

  int size() const { return nodes_.size(); }
  const Node& node(int v) const { return nodes_.at(v); }
  const std::vector<Node>& nodes() const { return nodes_.all(); }
  int index_of(const std::string& name) const { return nodes_.index_of(name); }
  std::optional<int> find(const std::string& name) const { return nodes_.find(name); }

  bool has_directed(int from, int to) const {
    nodes_.at(from);
    const auto& ch = children_[static_cast<std::size_t>(from)];
    return std::binary_search(ch.begin(), ch.end(), to);
  }

  bool has_undirected(int a, int b) const {
    nodes_.at(a);
    const auto& nb = neighbors_[static_cast<std::size_t>(a)];
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  bool adjacent(int a, int b) const {
    return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
  }

  void add_directed(int from, int to) {
    if (from == to) throw graph_error("self-loop on node " + node(from).name);
    if (adjacent(from, to))
      throw graph_error("nodes already adjacent: " + node(from).name + ", " + node(to).name);
    detail::insert_sorted(children_[static_cast<std::size_t>(from)], to);
    detail::insert_sorted(parents_[static_cast<std::size_t>(to)], from);
  }

  void add_undirected(int a, int b) {
    if (a == b) throw graph_error("self-loop on node " + node(a).name);
    if (adjacent(a, b))
      throw graph_error("nodes already adjacent: " + node(a).name + ", " + node(b).name);
    detail::insert_sorted(neighbors_[static_cast<std::size_t>(a)], b);
    detail::insert_sorted(neighbors_[static_cast<std::size_t>(b)], a);
  }

  // Replaces the undirected edge {from, to} with from -> to.
  void orient(int from, int to) {
    if (!has_undirected(from, to))
      throw graph_error("orient: no undirected edge between " + node(from).name + " and " +
                        node(to).name);
    detail::erase_sorted(neighbors_[static_cast<std::size_t>(from)], to);
    detail::erase_sorted(neighbors_[static_cast<std::size_t>(to)], from);
    detail::insert_sorted(children_[static_cast<std::size_t>(from)], to);
    detail::insert_sorted(parents_[static_cast<std::size_t>(to)], from);
  }

  const std::vector<int>& parents(int v) const {
    nodes_.at(v);
    return parents_[static_cast<std::size_t>(v)];
  }
  const std::vector<int>& children(int v) const {
    nodes_.at(v);
    return children_[static_cast<std::size_t>(v)];
  }
  const std::vector<int>& undirected_neighbors(int v) const {
    nodes_.at(v);
    return neighbors_[static_cast<std::size_t>(v)];
  }

  std::vector<std::pair<int, int>> directed_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < size(); ++v)
      for (int c : children_[static_cast<std::size_t>(v)]) out.emplace_back(v, c);
    return out;
  }

  // Unordered pairs (a, b) with a < b.
  std::vector<std::pair<int, int>> undirected_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < size(); ++v)
      for (int u : neighbors_[static_cast<std::size_t>(v)])
        if (v < u) out.emplace_back(v, u);
    return out;
  }

  int in_degree(int v) const { return static_cast<int>(parents(v).size()); }
  int out_degree(int v) const { return static_cast<int>(children(v).size()); }

  // Directed parents, directed children, undirected neighbors, and the other
  // directed parents of directed children. Undirected edges contribute plain
  // adjacency only, which keeps mb_size >= in_degree + out_degree.
  std::vector<int> markov_blanket(int v) const {
    std::set<int> mb(parents(v).begin(), parents(v).end());
    mb.insert(undirected_neighbors(v).begin(), undirected_neighbors(v).end());
    for (int c : children(v)) {
      mb.insert(c);
      for (int s : parents(c))
        if (s != v) mb.insert(s);
    }
    mb.erase(v);
    return std::vector<int>(mb.begin(), mb.end());
  }

  std::vector<int> all_adjacent(int v) const {
    std::set<int> adj(parents(v).begin(), parents(v).end());
    adj.insert(children(v).begin(), children(v).end());
    adj.insert(undirected_neighbors(v).begin(), undirected_neighbors(v).end());
    return std::vector<int>(adj.begin(), adj.end());
  }

  bool operator==(const Pdag& other) const {
    if (size() != other.size()) return false;
    for (int v = 0; v < size(); ++v) {
      if (node(v).name != other.node(v).name) return false;
      if (parents_[static_cast<std::size_t>(v)] != other.parents_[static_cast<std::size_t>(v)])
        return false;
      if (neighbors_[static_cast<std::size_t>(v)] != other.neighbors_[static_cast<std::size_t>(v)])
        return false;
    }
    return true;
  }

 private:
  detail::NodeTable nodes_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> neighbors_;  // undirected, symmetric
};

// ---------------------------------------------------------------------------
// Equivalence classes

// The completed PDAG of the class containing d: skeleton plus v-structure
// orientations, closed under the usual propagation rules so that every edge
// whose direction is shared by all class members stays directed.
inline Pdag equivalence_class(const Dag& d) {
  const int n = d.size();
  Pdag g(d.nodes());

  // v-structure endpoints keep their DAG orientation
  std::vector<std::vector<char>> compelled(static_cast<std::size_t>(n),
                                           std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int z = 0; z < n; ++z) {
    const auto& ps = d.parents(z);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j)
        if (!d.adjacent(ps[i], ps[j])) {
          compelled[static_cast<std::size_t>(ps[i])][static_cast<std::size_t>(z)] = 1;
          compelled[static_cast<std::size_t>(ps[j])][static_cast<std::size_t>(z)] = 1;
        }
  }
  for (const auto& [from, to] : d.edges()) {
    if (compelled[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)])
      g.add_directed(from, to);
    else
      g.add_undirected(from, to);
  }

  // Closure rules, applied to a fixpoint:
  //   R1: a -> b, b - c, a and c non-adjacent        => b -> c
  //   R2: a -> b -> c, a - c                         => a -> c
  //   R3: a - b, a - c, a - d, c -> b, d -> b,
  //       c and d non-adjacent                       => a -> b
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b = 0; b < n; ++b) {
      const std::vector<int> nbs = g.undirected_neighbors(b);
      for (int c : nbs) {
        if (!g.has_undirected(b, c)) continue;
        // R1 with edge b - c
        bool oriented = false;
        for (int a : g.parents(b)) {
          if (a != c && !g.adjacent(a, c)) {
            g.orient(b, c);
            changed = oriented = true;
            break;
          }
        }
        if (oriented) continue;
        // R2 with edge b - c (directed path b -> m -> c)
        for (int m : g.children(b)) {
          if (g.has_directed(m, c)) {
            g.orient(b, c);
            changed = oriented = true;
            break;
          }
        }
        if (oriented) continue;
        // R3 with candidate edge b - c oriented towards c: need two extra
        // undirected neighbors of b that are non-adjacent parents of c.
        const auto& bn = g.undirected_neighbors(b);
        for (std::size_t i = 0; i < bn.size() && !oriented; ++i) {
          for (std::size_t j = i + 1; j < bn.size() && !oriented; ++j) {
            const int u = bn[i], w = bn[j];
            if (u == c || w == c) continue;
            if (g.has_directed(u, c) && g.has_directed(w, c) && !g.adjacent(u, w)) {
              g.orient(b, c);
              changed = oriented = true;
            }
          }
        }
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Factorization

struct FactorTerm {
  int node;
  std::vector<int> parents;  // sorted by declaration index
};

// One term per node, emitted in topological order (declaration order breaks
// ties), each node appearing as a head exactly once.
inline std::vector<FactorTerm> factorization(const Dag& d) {
  std::vector<FactorTerm> terms;
  terms.reserve(static_cast<std::size_t>(d.size()));
  for (int v : d.topological_order()) terms.push_back({v, d.parents(v)});
  return terms;
}

inline std::string factorization_string(const Dag& d) {
  std::ostringstream out;
  for (const auto& term : factorization(d)) {
    out << "P(" << d.node(term.node).name;
    if (!term.parents.empty()) {
      out << "|";
      for (std::size_t i = 0; i < term.parents.size(); ++i) {
        if (i) out << ",";
        out << d.node(term.parents[i]).name;
      }
    }
    out << ")";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Degree statistics and components

struct DegreeRow {
  int node;
  int in_degree;
  int out_degree;
  int mb_size;
};

struct DegreeTable {
  std::vector<DegreeRow> rows;
  double mean_in = 0, mean_out = 0, mean_mb = 0;
  double sd_in = 0, sd_out = 0, sd_mb = 0;  // population standard deviation
};

namespace detail {

inline void finish_degree_table(DegreeTable& t) {
  const double n = static_cast<double>(t.rows.size());
  if (n == 0) return;
  double si = 0, so = 0, sm = 0;
  for (const auto& r : t.rows) {
    si += r.in_degree;
    so += r.out_degree;
    sm += r.mb_size;
  }
  t.mean_in = si / n;
  t.mean_out = so / n;
  t.mean_mb = sm / n;
  double vi = 0, vo = 0, vm = 0;
  for (const auto& r : t.rows) {
    vi += (r.in_degree - t.mean_in) * (r.in_degree - t.mean_in);
    vo += (r.out_degree - t.mean_out) * (r.out_degree - t.mean_out);
    vm += (r.mb_size - t.mean_mb) * (r.mb_size - t.mean_mb);
  }
  t.sd_in = std::sqrt(vi / n);
  t.sd_out = std::sqrt(vo / n);
  t.sd_mb = std::sqrt(vm / n);
}

}  // namespace detail

inline DegreeTable degrees(const Dag& d) {
  DegreeTable t;
  for (int v = 0; v < d.size(); ++v)
    t.rows.push_back({v, d.in_degree(v), d.out_degree(v),
                      static_cast<int>(d.markov_blanket(v).size())});
  detail::finish_degree_table(t);
  return t;
}

// Undirected edges count toward blanket adjacency but toward neither degree.
inline DegreeTable degrees(const Pdag& g) {
  DegreeTable t;
  for (int v = 0; v < g.size(); ++v)
    t.rows.push_back({v, g.in_degree(v), g.out_degree(v),
                      static_cast<int>(g.markov_blanket(v).size())});
  detail::finish_degree_table(t);
  return t;
}

// Undirected-reachability partition; singletons mark isolated nodes. Sets and
// their members are ordered by declaration index.
inline std::vector<std::vector<int>> connected_components(const Pdag& g) {
  const int n = g.size();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  for (int v = 0; v < n; ++v) {
    if (comp[static_cast<std::size_t>(v)] >= 0) continue;
    std::vector<int> members;
    std::vector<int> stack{v};
    comp[static_cast<std::size_t>(v)] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      members.push_back(u);
      for (int w : g.all_adjacent(u)) {
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = static_cast<int>(out.size());
          stack.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

inline std::vector<std::vector<int>> connected_components(const Dag& d) {
  return connected_components(Pdag::from_dag(d));
}

}  // namespace bnkit
