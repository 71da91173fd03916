#pragma once

// Search-space constraints: blacklists (forbidden directed pairs) and
// whitelists (mandatory edges, directed or either-direction), the two
// construction strategies built from a schema, and plain-text file loaders.

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"

namespace bnkit {

struct WhitelistEntry {
  std::string a;
  std::string b;
  bool directed = false;  // true: a -> b mandated; false: either orientation
};

struct ConstraintSet {
  std::vector<std::pair<std::string, std::string>> blacklist;
  std::vector<WhitelistEntry> whitelist;
};

// Blacklist = every continuous -> discrete pair plus explicitly denied pairs;
// no whitelist.
inline ConstraintSet strategy1_blacklist(
    const std::vector<Node>& schema,
    const std::vector<std::pair<std::string, std::string>>& denied = {}) {
  std::set<std::string> names;
  for (const auto& n : schema) names.insert(n.name);
  ConstraintSet cs;
  for (const auto& from : schema)
    for (const auto& to : schema)
      if (from.kind == NodeKind::Continuous && to.kind == NodeKind::Discrete)
        cs.blacklist.emplace_back(from.name, to.name);
  for (const auto& [from, to] : denied) {
    if (!names.count(from)) throw data_error("denied pair references unknown node: " + from);
    if (!names.count(to)) throw data_error("denied pair references unknown node: " + to);
    cs.blacklist.emplace_back(from, to);
  }
  return cs;
}

// Same blacklist as strategy 1 plus an either-direction whitelist entry for
// every unordered pair of continuous indicators sharing a domain.
inline ConstraintSet strategy2_whitelist(
    const std::vector<Node>& schema, const std::map<std::string, std::string>& domain_map,
    const std::vector<std::pair<std::string, std::string>>& denied = {}) {
  ConstraintSet cs = strategy1_blacklist(schema, denied);
  std::set<std::string> names;
  for (const auto& n : schema) names.insert(n.name);
  for (const auto& [node, domain] : domain_map) {
    (void)domain;
    if (!names.count(node)) throw data_error("domain map references unknown node: " + node);
  }
  std::map<std::string, std::vector<std::string>> by_domain;
  for (const auto& n : schema) {
    if (n.kind != NodeKind::Continuous) continue;
    auto it = domain_map.find(n.name);
    if (it == domain_map.end())
      throw data_error("continuous indicator not mapped to a domain: " + n.name);
    by_domain[it->second].push_back(n.name);
  }
  for (auto& [domain, members] : by_domain) {
    (void)domain;
    std::sort(members.begin(), members.end());
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        cs.whitelist.push_back({members[i], members[j], false});
  }
  return cs;
}

// Index-based form validated against a concrete node list. Construction
// rejects unknown names, self-pairs, direct blacklist/whitelist conflicts,
// and whitelist entries no CLGBN DAG can carry.
struct ResolvedConstraints {
  int n = 0;
  std::vector<char> black;        // n*n, [from*n + to]
  std::vector<char> wl_directed;  // n*n, a -> b mandated
  std::vector<char> wl_either;    // n*n symmetric, pair mandated

  bool blacklisted(int from, int to) const {
    return black[static_cast<std::size_t>(from * n + to)] != 0;
  }
  bool whitelisted_directed(int from, int to) const {
    return wl_directed[static_cast<std::size_t>(from * n + to)] != 0;
  }
  bool whitelisted_either(int a, int b) const {
    return wl_either[static_cast<std::size_t>(a * n + b)] != 0;
  }
  // Any whitelist claim on the ordered edge (from, to): its deletion is off
  // the table; reversal stays legal only for either-direction entries.
  bool whitelist_protected(int from, int to) const {
    return whitelisted_directed(from, to) || whitelisted_either(from, to);
  }
};

inline ResolvedConstraints resolve_constraints(const ConstraintSet& cs,
                                               const std::vector<Node>& schema) {
  detail::NodeTable table;
  for (const auto& n : schema) table.add(n.name, n.kind);
  const int n = table.size();
  ResolvedConstraints rc;
  rc.n = n;
  rc.black.assign(static_cast<std::size_t>(n) * n, 0);
  rc.wl_directed.assign(static_cast<std::size_t>(n) * n, 0);
  rc.wl_either.assign(static_cast<std::size_t>(n) * n, 0);

  auto edge_kind_legal = [&](int from, int to) {
    return !(schema[static_cast<std::size_t>(from)].kind == NodeKind::Continuous &&
             schema[static_cast<std::size_t>(to)].kind == NodeKind::Discrete);
  };

  for (const auto& [from, to] : cs.blacklist) {
    const int f = table.index_of(from);
    const int t = table.index_of(to);
    if (f == t) throw data_error("blacklist entry is a self-pair: " + from);
    rc.black[static_cast<std::size_t>(f * n + t)] = 1;
  }

  for (const auto& w : cs.whitelist) {
    const int a = table.index_of(w.a);
    const int b = table.index_of(w.b);
    if (a == b) throw data_error("whitelist entry is a self-pair: " + w.a);
    if (w.directed) {
      if (rc.blacklisted(a, b))
        throw data_error("edge " + w.a + " -> " + w.b + " is both whitelisted and blacklisted");
      if (!edge_kind_legal(a, b))
        throw data_error("whitelist edge " + w.a + " -> " + w.b +
                         " would make a continuous node parent a discrete node");
      rc.wl_directed[static_cast<std::size_t>(a * n + b)] = 1;
    } else {
      const bool ab_ok = !rc.blacklisted(a, b) && edge_kind_legal(a, b);
      const bool ba_ok = !rc.blacklisted(b, a) && edge_kind_legal(b, a);
      if (!ab_ok && !ba_ok)
        throw data_error("whitelist pair {" + w.a + ", " + w.b +
                         "} admits no orientation under the blacklist and node kinds");
      rc.wl_either[static_cast<std::size_t>(a * n + b)] = 1;
      rc.wl_either[static_cast<std::size_t>(b * n + a)] = 1;
    }
  }

  // A pair claimed both ways collapses to the directed reading.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (rc.wl_directed[static_cast<std::size_t>(a * n + b)]) {
        rc.wl_either[static_cast<std::size_t>(a * n + b)] = 0;
        rc.wl_either[static_cast<std::size_t>(b * n + a)] = 0;
      }
  return rc;
}

// ---------------------------------------------------------------------------
// Constraint files: `from,to` per blacklist line; whitelist lines are `a,b`
// (either direction) or `a->b` (directed); domain maps are `indicator,domain`.
// '#' lines are comments.

namespace detail {

template <class Fn>
void for_each_data_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    fn(t, line_no);
  }
}

inline std::pair<std::string, std::string> split_pair(const std::string& line,
                                                      const std::string& path,
                                                      std::size_t line_no) {
  const auto fields = split_csv_line(line, line_no);
  if (fields.size() != 2)
    throw data_error(path + ":" + std::to_string(line_no) + ": expected two comma-separated "
                     "fields");
  const std::string a = trim(fields[0]);
  const std::string b = trim(fields[1]);
  if (a.empty() || b.empty())
    throw data_error(path + ":" + std::to_string(line_no) + ": empty field");
  return {a, b};
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> read_blacklist_file(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  detail::for_each_data_line(path, [&](const std::string& line, std::size_t line_no) {
    out.push_back(detail::split_pair(line, path, line_no));
  });
  return out;
}

inline std::vector<WhitelistEntry> read_whitelist_file(const std::string& path) {
  std::vector<WhitelistEntry> out;
  detail::for_each_data_line(path, [&](const std::string& line, std::size_t line_no) {
    const auto arrow = line.find("->");
    if (arrow != std::string::npos) {
      const std::string a = detail::trim(line.substr(0, arrow));
      const std::string b = detail::trim(line.substr(arrow + 2));
      if (a.empty() || b.empty())
        throw data_error(path + ":" + std::to_string(line_no) + ": malformed directed entry");
      out.push_back({a, b, true});
    } else {
      auto [a, b] = detail::split_pair(line, path, line_no);
      out.push_back({a, b, false});
    }
  });
  return out;
}

inline std::map<std::string, std::string> read_domain_map_file(const std::string& path) {
  std::map<std::string, std::string> out;
  detail::for_each_data_line(path, [&](const std::string& line, std::size_t line_no) {
    auto [node, domain] = detail::split_pair(line, path, line_no);
    auto [it, inserted] = out.emplace(node, domain);
    (void)it;
    if (!inserted)
      throw data_error(path + ":" + std::to_string(line_no) + ": node mapped twice: " + node);
  });
  return out;
}

}  // namespace bnkit
