#pragma once

// Greedy hill-climbing over DAG space with add/delete/reverse moves under
// blacklist/whitelist constraints, decomposable-score caching, and random
// restarts that perturb the incumbent and re-ascend.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bnkit/clgbn.hpp"
#include "bnkit/constraints.hpp"
#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"

namespace bnkit {

enum class MoveKind { Add, Delete, Reverse };

inline const char* move_name(MoveKind k) {
  switch (k) {
    case MoveKind::Add: return "add";
    case MoveKind::Delete: return "delete";
    case MoveKind::Reverse: return "reverse";
  }
  return "?";
}

struct Move {
  MoveKind kind = MoveKind::Add;
  int from = -1;
  int to = -1;
};

struct SearchConfig {
  int restarts = 2;
  int perturbation = 5;  // random legal moves applied before each re-ascent
  ScoreType score = ScoreType::BIC;
  std::uint64_t seed = 1;
  int max_parents = 0;  // 0 disables the cap
  double laplace = 0.0;
  double variance_floor = 1e-12;
};

struct TraceEntry {
  Move move;
  double delta = 0;       // strictly positive for ascent entries
  int restart = 0;        // 0 = initial ascent, i = i-th restart
  bool perturbation = false;
};

struct SearchTrace {
  std::vector<TraceEntry> iterations;
  int restarts_taken = 0;
  double initial_score = 0;
  double final_score = 0;
};

struct SearchResult {
  Dag dag;
  SearchTrace trace;
};

namespace detail {

// True iff a directed path from `from` reaches `to` without taking the direct
// from->to edge; reversing that edge is then illegal.
inline bool path_besides_edge(const Dag& d, int from, int to) {
  std::vector<int> stack;
  std::vector<char> seen(static_cast<std::size_t>(d.size()), 0);
  for (int c : d.children(from))
    if (c != to) {
      stack.push_back(c);
      seen[static_cast<std::size_t>(c)] = 1;
    }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (int c : d.children(v))
      if (!seen[static_cast<std::size_t>(c)]) {
        seen[static_cast<std::size_t>(c)] = 1;
        stack.push_back(c);
      }
  }
  return false;
}

inline bool edge_kind_legal(const Dag& d, int from, int to) {
  return !(d.node(from).kind == NodeKind::Continuous &&
           d.node(to).kind == NodeKind::Discrete);
}

}  // namespace detail

// All single-edge edits of d that stay acyclic and keep every constraint:
// blacklisted edges never appear, whitelist entries are never deleted,
// directed whitelist entries are never reversed, and no edit makes a
// continuous node parent a discrete one. Deterministic (from, to, kind) order.
inline std::vector<Move> legal_moves(const Dag& d, const ResolvedConstraints& rc,
                                     int max_parents = 0) {
  std::vector<Move> moves;
  const int n = d.size();
  auto parent_room = [&](int v, int extra) {
    return max_parents <= 0 || d.in_degree(v) + extra <= max_parents;
  };
  for (int from = 0; from < n; ++from) {
    for (int to = 0; to < n; ++to) {
      if (from == to) continue;
      if (!d.adjacent(from, to)) {
        if (!rc.blacklisted(from, to) && detail::edge_kind_legal(d, from, to) &&
            parent_room(to, 1) && !d.has_directed_path(to, from))
          moves.push_back({MoveKind::Add, from, to});
        continue;
      }
      if (!d.has_edge(from, to)) continue;
      if (!rc.whitelist_protected(from, to))
        moves.push_back({MoveKind::Delete, from, to});
      if (!rc.whitelisted_directed(from, to) && !rc.blacklisted(to, from) &&
          detail::edge_kind_legal(d, to, from) && parent_room(from, 1) &&
          !detail::path_besides_edge(d, from, to))
        moves.push_back({MoveKind::Reverse, from, to});
    }
  }
  return moves;
}

// Empty graph plus one admissible orientation of every whitelist entry.
// Directed entries go in as written; either-direction entries prefer the
// low-to-high index orientation (mutually acyclic by construction) and flip
// when the blacklist, node kinds, or acyclicity demand it.
inline Dag initial_graph(const std::vector<Node>& schema, const ResolvedConstraints& rc) {
  Dag d(schema);
  const int n = rc.n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (rc.whitelisted_directed(a, b)) {
        try {
          d.add_edge(a, b);
        } catch (const graph_error&) {
          throw data_error("directed whitelist entries form a cycle at " + d.node(a).name +
                           " -> " + d.node(b).name);
        }
      }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!rc.whitelisted_either(a, b)) continue;
      const bool ab_ok = !rc.blacklisted(a, b) && detail::edge_kind_legal(d, a, b);
      const bool ba_ok = !rc.blacklisted(b, a) && detail::edge_kind_legal(d, b, a);
      const int first_from = ab_ok ? a : b;
      const int first_to = ab_ok ? b : a;
      try {
        d.add_edge(first_from, first_to);
        continue;
      } catch (const graph_error&) {
      }
      if (ab_ok && ba_ok) {
        try {
          d.add_edge(b, a);
          continue;
        } catch (const graph_error&) {
        }
      }
      throw data_error("whitelist pair {" + d.node(a).name + ", " + d.node(b).name +
                       "} cannot be oriented without a cycle");
    }
  }
  return d;
}

namespace detail {

// Local-score memo for one (table, score) pair; key is the node plus its
// sorted parent set.
class ScoreCache {
 public:
  ScoreCache(const ScoreContext& ctx, const std::vector<Node>& schema)
      : ctx_(ctx), schema_(schema) {}

  double get(int v, std::vector<int> parents) {
    std::sort(parents.begin(), parents.end());
    const auto key = std::make_pair(v, std::move(parents));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Node> parent_nodes;
    parent_nodes.reserve(key.second.size());
    for (int p : key.second) parent_nodes.push_back(schema_[static_cast<std::size_t>(p)]);
    const double s = local_score(ctx_, schema_[static_cast<std::size_t>(v)], parent_nodes);
    memo_.emplace(key, s);
    return s;
  }

  double get_current(const Dag& d, int v) { return get(v, d.parents(v)); }

 private:
  const ScoreContext& ctx_;
  const std::vector<Node>& schema_;
  std::map<std::pair<int, std::vector<int>>, double> memo_;
};

inline std::vector<int> with_parent(const std::vector<int>& parents, int p) {
  std::vector<int> out(parents);
  out.push_back(p);
  return out;
}

inline std::vector<int> without_parent(const std::vector<int>& parents, int p) {
  std::vector<int> out;
  out.reserve(parents.size());
  for (int x : parents)
    if (x != p) out.push_back(x);
  return out;
}

// Score change from applying the move; only the affected nodes re-score.
inline double move_delta(ScoreCache& cache, const Dag& d, const Move& m) {
  switch (m.kind) {
    case MoveKind::Add:
      return cache.get(m.to, with_parent(d.parents(m.to), m.from)) -
             cache.get_current(d, m.to);
    case MoveKind::Delete:
      return cache.get(m.to, without_parent(d.parents(m.to), m.from)) -
             cache.get_current(d, m.to);
    case MoveKind::Reverse:
      return cache.get(m.to, without_parent(d.parents(m.to), m.from)) +
             cache.get(m.from, with_parent(d.parents(m.from), m.to)) -
             cache.get_current(d, m.to) - cache.get_current(d, m.from);
  }
  return 0;
}

inline void apply_move(Dag& d, const Move& m) {
  switch (m.kind) {
    case MoveKind::Add:
      d.add_edge(m.from, m.to);
      break;
    case MoveKind::Delete:
      d.remove_edge(m.from, m.to);
      break;
    case MoveKind::Reverse:
      d.reverse_edge(m.from, m.to);
      break;
  }
}

inline double total_score(ScoreCache& cache, const Dag& d) {
  double s = 0;
  for (int v = 0; v < d.size(); ++v) {
    const double lv = cache.get_current(d, v);
    if (lv == neg_inf()) return neg_inf();
    s += lv;
  }
  return s;
}

// Greedy ascent to a local optimum; records accepted moves in the trace.
inline double ascend(Dag& d, ScoreCache& cache, const ResolvedConstraints& rc,
                     const SearchConfig& cfg, int restart, SearchTrace& trace) {
  while (true) {
    // Reversals inside a score-equivalence class compute to a few ulps either
    // side of zero (the four cached terms round differently in each
    // direction), which a plain `delta > 0` rule turns into an endless edge
    // flip. Requiring a scale-aware minimum improvement keeps the ascent
    // strict and finite.
    const double current = total_score(cache, d);
    const double min_gain =
        std::isfinite(current) ? 1e-9 * (1.0 + std::abs(current)) : 1e-9;
    const std::vector<Move> moves = legal_moves(d, rc, cfg.max_parents);
    double best_delta = min_gain;
    const Move* best = nullptr;
    for (const auto& m : moves) {
      const double delta = move_delta(cache, d, m);
      if (delta > best_delta) {  // strict: ties keep the earlier move
        best_delta = delta;
        best = &m;
      }
    }
    if (!best) break;
    apply_move(d, *best);
    trace.iterations.push_back({*best, best_delta, restart, false});
  }
  return total_score(cache, d);
}

}  // namespace detail

// Algorithm: greedy ascent from the whitelist-seeded initial graph, then up
// to cfg.restarts rounds of (perturb incumbent with cfg.perturbation random
// legal moves, re-ascend, keep the better graph). Deterministic per seed.
inline SearchResult hill_climb(const MixedTable& t, const ConstraintSet& constraints,
                               const SearchConfig& cfg) {
  if (!t.complete())
    throw data_error("hill_climb: table has missing cells; impute before learning");
  if (cfg.restarts < 0) throw argument_error("hill_climb: restarts must be >= 0");
  if (cfg.perturbation < 1) throw argument_error("hill_climb: perturbation size must be >= 1");

  const std::vector<Node> schema = t.schema_nodes();
  const ResolvedConstraints rc = resolve_constraints(constraints, schema);
  ScoreContext ctx;
  ctx.table = &t;
  ctx.score = cfg.score;
  ctx.variance_floor = cfg.variance_floor;
  ctx.laplace = cfg.laplace;
  detail::ScoreCache cache(ctx, schema);

  SearchResult result;
  result.dag = initial_graph(schema, rc);
  SearchTrace& trace = result.trace;
  trace.initial_score = detail::total_score(cache, result.dag);

  double incumbent_score = detail::ascend(result.dag, cache, rc, cfg, 0, trace);

  Rng rng(cfg.seed);
  for (int r = 1; r <= cfg.restarts; ++r) {
    Dag candidate = result.dag;
    for (int i = 0; i < cfg.perturbation; ++i) {
      const std::vector<Move> moves = legal_moves(candidate, rc, cfg.max_parents);
      if (moves.empty()) break;
      const Move& m = moves[static_cast<std::size_t>(rng.below(moves.size()))];
      const double delta = detail::move_delta(cache, candidate, m);
      detail::apply_move(candidate, m);
      trace.iterations.push_back({m, delta, r, true});
    }
    const double candidate_score = detail::ascend(candidate, cache, rc, cfg, r, trace);
    ++trace.restarts_taken;
    if (candidate_score > incumbent_score) {
      incumbent_score = candidate_score;
      result.dag = std::move(candidate);
    }
  }

  if (incumbent_score == neg_inf())
    throw fit_error("hill_climb: no fittable structure reachable (all candidates scored -inf); "
                    "the data cannot support the constrained model");

  trace.final_score = incumbent_score;
  return result;
}

}  // namespace bnkit
