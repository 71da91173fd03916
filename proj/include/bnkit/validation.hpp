#pragma once

// Predictive validation: k-fold cross-validated posterior mean squared error
// over the continuous nodes (fixed structure or relearned per fold), and the
// ranked BIC/AIC/MSE comparison table across runs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "bnkit/averaging.hpp"
#include "bnkit/clgbn.hpp"
#include "bnkit/dataset.hpp"
#include "bnkit/search.hpp"
#include "bnkit/stats.hpp"

namespace bnkit {

struct CvConfig {
  int folds = 10;
  std::uint64_t seed = 1;
  bool standardize = false;  // z-score continuous columns before splitting
  int threads = 1;
};

struct CvReport {
  std::vector<std::pair<std::string, double>> per_node_mse;  // continuous nodes, table order
  double posterior_mse = 0;  // arithmetic mean of the per-node values
  int folds = 0;
  std::uint64_t seed = 0;
  bool standardized = false;
  std::string mode;  // "fixed" or "relearn"
  std::size_t fallback_predictions = 0;  // unseen-configuration fallbacks
};

// Shuffled indices dealt round-robin into k folds; sizes differ by at most
// one; each fold returned in ascending order.
inline std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k,
                                                         std::uint64_t seed) {
  if (k < 2) throw argument_error("kfold_split: need at least 2 folds");
  if (static_cast<std::size_t>(k) > n)
    throw argument_error("kfold_split: more folds than rows");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i)
    folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

// Per-fold relearning configuration; averaging inside CV is costly and stays
// off unless asked for.
struct RelearnSpec {
  ConstraintSet constraints;
  SearchConfig search;
  bool average = false;
  AveragingConfig averaging;
};

namespace detail {

inline MixedTable standardized_copy(const MixedTable& t) {
  MixedTable out = t;
  for (int j = 0; j < out.n_cols(); ++j) {
    Column& c = out.column(j);
    if (c.kind != NodeKind::Continuous) continue;
    const double m = mean(c.values);
    const double sd = std::sqrt(variance_sample(c.values));
    if (sd <= 0) throw transform_error("standardize: column " + c.name + " is constant");
    for (auto& v : c.values) v = (v - m) / sd;
  }
  return out;
}

template <class StructureForFold>
CvReport cross_validate_impl(const MixedTable& raw, const CvConfig& cfg,
                             const std::string& mode, StructureForFold&& structure_for_fold) {
  if (!raw.complete())
    throw data_error("cross_validate: table has missing cells; impute first");
  const MixedTable t = cfg.standardize ? standardized_copy(raw) : raw;
  const std::size_t n = t.n_rows();
  const auto folds = kfold_split(n, cfg.folds, cfg.seed);

  std::vector<int> continuous_cols;
  for (int j = 0; j < t.n_cols(); ++j)
    if (t.column(j).kind == NodeKind::Continuous) continuous_cols.push_back(j);
  if (continuous_cols.empty())
    throw argument_error("cross_validate: no continuous nodes to score");

  // per fold, per continuous column: sum of squared errors + fallback count
  std::vector<std::vector<double>> fold_sse(folds.size(),
                                            std::vector<double>(continuous_cols.size(), 0.0));
  std::vector<std::size_t> fold_fallbacks(folds.size(), 0);

  parallel_for(folds.size(), cfg.threads, [&](std::size_t fi) {
    std::vector<std::size_t> train_rows;
    train_rows.reserve(n - folds[fi].size());
    for (std::size_t gi = 0; gi < folds.size(); ++gi)
      if (gi != fi)
        train_rows.insert(train_rows.end(), folds[gi].begin(), folds[gi].end());
    std::sort(train_rows.begin(), train_rows.end());
    const MixedTable train = t.select_rows(train_rows);

    const Dag structure = structure_for_fold(train, fi);
    FitOptions options;
    options.allow_empty_configs = true;
    const ClgbnFit f = fit(structure, train, options);

    for (std::size_t ci = 0; ci < continuous_cols.size(); ++ci) {
      const int v = f.dag.index_of(t.column(continuous_cols[ci]).name);
      for (std::size_t r : folds[fi]) {
        const Prediction p = predict_node(f, v, t, r);
        const double obs = t.column(continuous_cols[ci]).values[r];
        fold_sse[fi][ci] += (obs - p.value) * (obs - p.value);
        if (p.fallback) ++fold_fallbacks[fi];
      }
    }
  });

  CvReport report;
  report.folds = cfg.folds;
  report.seed = cfg.seed;
  report.standardized = cfg.standardize;
  report.mode = mode;
  double total = 0;
  for (std::size_t ci = 0; ci < continuous_cols.size(); ++ci) {
    double sse = 0;
    for (std::size_t fi = 0; fi < folds.size(); ++fi) sse += fold_sse[fi][ci];
    const double mse = sse / static_cast<double>(n);
    report.per_node_mse.emplace_back(t.column(continuous_cols[ci]).name, mse);
    total += mse;
  }
  report.posterior_mse = total / static_cast<double>(continuous_cols.size());
  for (std::size_t f : fold_fallbacks) report.fallback_predictions += f;
  return report;
}

}  // namespace detail

// Fixed structure: parameters are refit on each fold's training split, then
// every continuous node is predicted on the held-out rows from its parents.
inline CvReport cross_validate(const MixedTable& t, const Dag& structure, const CvConfig& cfg) {
  return detail::cross_validate_impl(
      t, cfg, "fixed", [&](const MixedTable&, std::size_t) { return structure; });
}

// Relearned structure: hill-climb (optionally bootstrap-averaged and then
// oriented) on each fold's training split before fitting.
inline CvReport cross_validate(const MixedTable& t, const RelearnSpec& spec,
                               const CvConfig& cfg) {
  return detail::cross_validate_impl(
      t, cfg, "relearn", [&](const MixedTable& train, std::size_t fold) {
        if (spec.average) {
          AveragingConfig avg = spec.averaging;
          avg.seed = derive_seed(spec.averaging.seed, fold);
          avg.threads = 1;  // folds already run in parallel
          return orient_averaged(learn_averaged(train, spec.constraints, spec.search, avg));
        }
        SearchConfig search = spec.search;
        search.seed = derive_seed(spec.search.seed, fold);
        return hill_climb(train, spec.constraints, search).dag;
      });
}

// ---------------------------------------------------------------------------
// Model comparison

struct ComparisonEntry {
  std::string label;
  double bic = 0;
  double aic = 0;
  double posterior_mse = std::numeric_limits<double>::quiet_NaN();  // optional
};

struct RankedEntry {
  ComparisonEntry entry;
  int rank_bic = 0;
  int rank_aic = 0;
  int rank_mse = 0;  // 0 when the entry carries no MSE
};

// Rows ordered by BIC descending (larger is better), ties broken by AIC then
// label; per-criterion ranks use competition ranking.
inline std::vector<RankedEntry> compare_models(std::vector<ComparisonEntry> entries) {
  if (entries.size() < 2) throw argument_error("compare_models: need at least 2 entries");
  std::sort(entries.begin(), entries.end(), [](const ComparisonEntry& x, const ComparisonEntry& y) {
    if (x.bic != y.bic) return x.bic > y.bic;
    if (x.aic != y.aic) return x.aic > y.aic;
    return x.label < y.label;
  });
  std::vector<RankedEntry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    RankedEntry r;
    r.entry = e;
    for (const auto& other : entries) {
      if (other.bic > e.bic) ++r.rank_bic;
      if (other.aic > e.aic) ++r.rank_aic;
      if (!std::isnan(e.posterior_mse) && !std::isnan(other.posterior_mse) &&
          other.posterior_mse < e.posterior_mse)
        ++r.rank_mse;
    }
    ++r.rank_bic;
    ++r.rank_aic;
    r.rank_mse = std::isnan(e.posterior_mse) ? 0 : r.rank_mse + 1;
    out.push_back(r);
  }
  return out;
}

// Aligned plain-text table: label, BIC, AIC, posterior MSE (when present).
inline std::string comparison_table(const std::vector<RankedEntry>& ranked) {
  std::size_t label_w = 5;
  for (const auto& r : ranked) label_w = std::max(label_w, r.entry.label.size());
  auto num = [](double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return std::string(buf);
  };
  std::string out;
  auto row = [&](const std::string& label, const std::string& b, const std::string& a,
                 const std::string& m) {
    out += label;
    out.append(label_w - label.size() + 2, ' ');
    auto cell = [&](const std::string& s, std::size_t w) {
      if (s.size() < w) out.append(w - s.size(), ' ');
      out += s;
      out += "  ";
    };
    cell(b, 14);
    cell(a, 14);
    cell(m, 14);
    out += "\n";
  };
  row("Model", "BIC", "AIC", "Posterior MSE");
  for (const auto& r : ranked)
    row(r.entry.label, num(r.entry.bic, "%.2f"), num(r.entry.aic, "%.2f"),
        std::isnan(r.entry.posterior_mse) ? "-" : num(r.entry.posterior_mse, "%.3f"));
  return out;
}

}  // namespace bnkit
