#pragma once

// Bootstrap model averaging: relearn the structure on M resampled datasets,
// turn edge frequencies into strengths and direction confidences, and
// threshold them into a partially directed averaged network.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/dot.hpp"
#include "bnkit/graph.hpp"
#include "bnkit/search.hpp"

namespace bnkit {

struct AveragingConfig {
  int replicates = 1000;
  double strength_threshold = 0.85;   // skeleton inclusion, >= comparison
  double direction_threshold = 0.7;   // orientation, >= comparison
  std::uint64_t seed = 1;
  int threads = 1;
};

struct EdgeStrength {
  int a = -1;  // a < b
  int b = -1;
  double strength = 0;      // fraction of replicates with the edge, either way
  double direction_ab = 0;  // among those, fraction oriented a -> b
};

struct ReplicateSummary {
  std::uint64_t seed = 0;
  double score = 0;
  int n_edges = 0;
};

struct AveragedGraph {
  Pdag pdag;
  std::vector<EdgeStrength> strengths;  // every pair with strength > 0, (a, b) ascending
  AveragingConfig config;
  std::vector<ReplicateSummary> replicates;  // filled by learn_averaged
};

// n_rows rows drawn uniformly with replacement; level dictionaries carry over.
inline MixedTable bootstrap_resample(const MixedTable& t, std::uint64_t seed) {
  const std::size_t n = t.n_rows();
  if (n == 0) throw data_error("bootstrap_resample: empty table");
  Rng rng(seed);
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
  return t.select_rows(rows);
}

namespace detail {

inline void check_averaging_config(const AveragingConfig& cfg) {
  if (cfg.replicates < 1) throw argument_error("averaging: replicates must be >= 1");
  if (!(cfg.strength_threshold > 0.5 && cfg.strength_threshold <= 1.0))
    throw argument_error("averaging: strength threshold must lie in (0.5, 1]");
  if (!(cfg.direction_threshold > 0.5 && cfg.direction_threshold <= 1.0))
    throw argument_error("averaging: direction threshold must lie in (0.5, 1]");
}

}  // namespace detail

// Edge frequencies over replicate structures: strength is direction-agnostic
// (skeleton presence), direction is conditional on presence. Pairs at or
// above the strength threshold enter the Pdag, oriented when the winning
// direction's share meets the direction threshold, undirected otherwise.
inline AveragedGraph average_structures(const std::vector<Dag>& dags,
                                        const AveragingConfig& cfg) {
  detail::check_averaging_config(cfg);
  if (dags.empty()) throw argument_error("average_structures: no replicate structures");
  const Dag& first = dags.front();
  for (const auto& d : dags) {
    if (d.size() != first.size())
      throw argument_error("average_structures: replicate node sets differ");
    for (int v = 0; v < d.size(); ++v)
      if (d.node(v).name != first.node(v).name || d.node(v).kind != first.node(v).kind)
        throw argument_error("average_structures: replicate node sets differ at " +
                             d.node(v).name);
  }

  const double m = static_cast<double>(dags.size());
  std::map<std::pair<int, int>, std::pair<long, long>> counts;  // (a,b) -> (either, a->b)
  for (const auto& d : dags) {
    for (const auto& [from, to] : d.edges()) {
      const int a = std::min(from, to);
      const int b = std::max(from, to);
      auto& c = counts[{a, b}];
      ++c.first;
      if (from == a) ++c.second;
    }
  }

  AveragedGraph out;
  out.config = cfg;
  out.pdag = Pdag(first.nodes());
  for (const auto& [pair, c] : counts) {
    EdgeStrength e;
    e.a = pair.first;
    e.b = pair.second;
    e.strength = static_cast<double>(c.first) / m;
    e.direction_ab = static_cast<double>(c.second) / static_cast<double>(c.first);
    out.strengths.push_back(e);
    if (e.strength >= cfg.strength_threshold) {
      if (e.direction_ab >= cfg.direction_threshold)
        out.pdag.add_directed(e.a, e.b);
      else if (1.0 - e.direction_ab >= cfg.direction_threshold)
        out.pdag.add_directed(e.b, e.a);
      else
        out.pdag.add_undirected(e.a, e.b);
    }
  }
  return out;
}

// Full pipeline: M times (resample, hill-climb), then average. Replicate
// seeds derive from the averaging seed by counter, so thread count changes
// neither the resamples nor the result.
inline AveragedGraph learn_averaged(const MixedTable& t, const ConstraintSet& constraints,
                                    const SearchConfig& search_cfg,
                                    const AveragingConfig& avg_cfg) {
  detail::check_averaging_config(avg_cfg);
  const std::size_t m = static_cast<std::size_t>(avg_cfg.replicates);
  std::vector<Dag> dags(m);
  std::vector<ReplicateSummary> summaries(m);
  parallel_for(m, avg_cfg.threads, [&](std::size_t i) {
    const std::uint64_t replicate_seed = derive_seed(avg_cfg.seed, i);
    const MixedTable sample = bootstrap_resample(t, derive_seed(replicate_seed, 0));
    SearchConfig cfg = search_cfg;
    cfg.seed = derive_seed(replicate_seed, 1);
    SearchResult r = hill_climb(sample, constraints, cfg);
    summaries[i] = {replicate_seed, r.trace.final_score, r.dag.edge_count()};
    dags[i] = std::move(r.dag);
  });
  AveragedGraph out = average_structures(dags, avg_cfg);
  out.replicates = std::move(summaries);
  return out;
}

// Post-processing only: completes the averaged Pdag to a full DAG so that
// parameters can be fitted. Undirected edges are oriented highest strength
// first, each in its more frequent direction unless node kinds or acyclicity
// force the flip.
inline Dag orient_averaged(const AveragedGraph& g) {
  Dag d(g.pdag.nodes());
  for (const auto& [from, to] : g.pdag.directed_edges()) {
    try {
      d.add_edge(from, to);
    } catch (const graph_error&) {
      throw graph_error("averaged graph's directed edges contain a cycle; cannot orient");
    }
  }

  std::vector<const EdgeStrength*> undirected;
  for (const auto& e : g.strengths)
    if (g.pdag.has_undirected(e.a, e.b)) undirected.push_back(&e);
  std::sort(undirected.begin(), undirected.end(),
            [](const EdgeStrength* x, const EdgeStrength* y) {
              if (x->strength != y->strength) return x->strength > y->strength;
              return std::make_pair(x->a, x->b) < std::make_pair(y->a, y->b);
            });

  for (const EdgeStrength* e : undirected) {
    const bool ab_legal = detail::edge_kind_legal(d, e->a, e->b);
    const bool ba_legal = detail::edge_kind_legal(d, e->b, e->a);
    int from = e->direction_ab >= 0.5 ? e->a : e->b;
    int to = e->direction_ab >= 0.5 ? e->b : e->a;
    if (!detail::edge_kind_legal(d, from, to)) std::swap(from, to);
    try {
      d.add_edge(from, to);
      continue;
    } catch (const graph_error&) {
    }
    if (ab_legal && ba_legal) {
      try {
        d.add_edge(to, from);
        continue;
      } catch (const graph_error&) {
      }
    }
    throw graph_error("cannot orient averaged edge {" + d.node(e->a).name + ", " +
                      d.node(e->b).name + "} without a cycle");
  }
  return d;
}

// `from,to,strength,direction` rows for every pair with positive strength;
// direction is the from->to share among replicates containing the edge.
inline std::string strengths_csv(const AveragedGraph& g,
                                 const std::vector<std::string>& comments = {}) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << "\n";
  out << "from,to,strength,direction\n";
  for (const auto& e : g.strengths) {
    out << detail::csv_escape(g.pdag.node(e.a).name) << ","
        << detail::csv_escape(g.pdag.node(e.b).name) << ","
        << detail::format_double(e.strength) << ","
        << detail::format_double(e.direction_ab) << "\n";
  }
  return out.str();
}

// DOT with strength-labelled edges; retained-but-undirected edges render with
// dir=none per the Pdag emitter.
inline std::string averaged_dot(const AveragedGraph& g,
                                const std::vector<std::string>& comments = {}) {
  DotOptions opt;
  opt.graph_name = "averaged";
  opt.header_comments = comments;
  for (const auto& e : g.strengths) {
    const std::string label = detail::format_double(e.strength);
    if (g.pdag.has_directed(e.a, e.b))
      opt.edge_labels[{e.a, e.b}] = label;
    else if (g.pdag.has_directed(e.b, e.a))
      opt.edge_labels[{e.b, e.a}] = label;
    else if (g.pdag.has_undirected(e.a, e.b))
      opt.edge_labels[{e.a, e.b}] = label;  // strengths store a < b
  }
  return to_dot(g.pdag, opt);
}

}  // namespace bnkit
