#pragma once

// Conditional linear Gaussian Bayesian network parameters: discrete nodes
// carry CPTs over their discrete-parent configurations, continuous nodes
// carry one OLS regression (on their continuous parents) per configuration.
// The same local computations back the decomposable BIC/AIC scores used by
// structure search.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bnkit/dataset.hpp"
#include "bnkit/graph.hpp"
#include "bnkit/stats.hpp"

namespace bnkit {

enum class ScoreType { BIC, AIC };

inline const char* score_name(ScoreType s) { return s == ScoreType::BIC ? "bic" : "aic"; }

struct FitOptions {
  // Store marginal fallbacks for parent configurations with no training rows
  // instead of failing; cross-validation folds need this.
  bool allow_empty_configs = false;
  double laplace = 0.0;  // CPT pseudo-count; 0 keeps pure maximum likelihood
  double variance_floor = 1e-12;
};

struct LocalDiscrete {
  int node = -1;
  std::vector<int> discrete_parents;  // node indices, ascending
  std::vector<int> parent_cards;
  int n_levels = 0;
  std::vector<std::vector<double>> cpt;  // [config][level], rows sum to 1
  std::vector<char> config_seen;         // 0 marks a marginal-fallback row
};

struct LocalGaussian {
  int node = -1;
  std::vector<int> discrete_parents;    // node indices, ascending
  std::vector<int> parent_cards;
  std::vector<int> continuous_parents;  // node indices, ascending
  std::vector<std::vector<double>> coef;  // [config] -> intercept, then slopes
  std::vector<double> variance;           // per config, > 0
  std::vector<char> config_seen;
  double marginal_mean = 0;      // fallback for unseen configurations
  double marginal_variance = 1;
};

struct ClgbnFit {
  Dag dag;
  std::vector<std::variant<LocalDiscrete, LocalGaussian>> locals;  // by node index
  double loglik = 0;
  long n_params = 0;
  std::size_t n_obs = 0;
  std::vector<std::string> warnings;  // collinearity notes, fallback notes
};

inline bool check_clgbn_constraint(const Dag& d) {
  for (const auto& [from, to] : d.edges())
    if (d.node(from).kind == NodeKind::Continuous && d.node(to).kind == NodeKind::Discrete)
      return false;
  return true;
}

namespace detail {

// Maps each dag node to its table column, insisting names and kinds agree.
inline std::vector<int> node_columns(const Dag& d, const MixedTable& t) {
  std::vector<int> cols(static_cast<std::size_t>(d.size()));
  for (int v = 0; v < d.size(); ++v) {
    const Node& n = d.node(v);
    const int j = t.index_of(n.name);
    if (t.column(j).kind != n.kind)
      throw data_error("column " + n.name + " is " + kind_name(t.column(j).kind) +
                       " but the graph declares it " + kind_name(n.kind));
    cols[static_cast<std::size_t>(v)] = j;
  }
  return cols;
}

struct ConfigIndexer {
  std::vector<int> cols;     // table columns of the discrete parents
  std::vector<int> cards;
  std::vector<std::size_t> strides;  // first parent varies fastest
  std::size_t n_configs = 1;

  ConfigIndexer(const MixedTable& t, const std::vector<int>& parent_cols) : cols(parent_cols) {
    for (int j : cols) {
      const int card = static_cast<int>(t.column(j).levels.size());
      strides.push_back(n_configs);
      cards.push_back(card);
      n_configs *= static_cast<std::size_t>(std::max(card, 1));
    }
  }

  // Training-time dictionaries, applied to a possibly different table.
  ConfigIndexer(const std::vector<int>& parent_cols, const std::vector<int>& parent_cards)
      : cols(parent_cols), cards(parent_cards) {
    for (int card : cards) {
      strides.push_back(n_configs);
      n_configs *= static_cast<std::size_t>(std::max(card, 1));
    }
  }

  // -1 when some parent code falls outside its training dictionary.
  long config_of(const MixedTable& t, std::size_t row) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const int code = t.column(cols[i]).codes[row];
      if (code < 0 || code >= cards[i]) return -1;
      idx += static_cast<std::size_t>(code) * strides[i];
    }
    return static_cast<long>(idx);
  }

  std::string describe(const MixedTable& t, std::size_t config) const {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::size_t code = (config / strides[i]) % static_cast<std::size_t>(cards[i]);
      if (i) out << ", ";
      out << t.column(cols[i]).name << "=" << t.column(cols[i]).levels[code];
    }
    out << ")";
    return out.str();
  }
};

// Rows grouped by discrete-parent configuration.
inline std::vector<std::vector<std::size_t>> group_rows(const MixedTable& t,
                                                        const ConfigIndexer& ix) {
  std::vector<std::vector<std::size_t>> groups(ix.n_configs);
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    const long c = ix.config_of(t, r);
    if (c < 0) throw data_error("row " + std::to_string(r) + " has an out-of-dictionary level");
    groups[static_cast<std::size_t>(c)].push_back(r);
  }
  return groups;
}

struct OlsResult {
  std::vector<double> coef;  // intercept first
  double rss = 0;
  bool rank_deficient = false;
};

inline OlsResult ols(const MixedTable& t, const std::vector<std::size_t>& rows,
                     const std::vector<int>& regressor_cols, int y_col) {
  const std::size_t n = rows.size();
  const std::size_t p = regressor_cols.size();
  Eigen::MatrixXd X(n, p + 1);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) =
          t.column(regressor_cols[j]).values[rows[i]];
    y(static_cast<Eigen::Index>(i)) = t.column(y_col).values[rows[i]];
  }
  // Complete orthogonal decomposition yields the least-norm solution when the
  // design is rank deficient (collinear parents, tiny bootstrap cells).
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  Eigen::VectorXd beta = cod.solve(y);
  OlsResult out;
  out.coef.assign(beta.data(), beta.data() + beta.size());
  out.rss = (y - X * beta).squaredNorm();
  out.rank_deficient = cod.rank() < static_cast<Eigen::Index>(p + 1);
  return out;
}

inline double gaussian_loglik_term(double rss, std::size_t n, double variance) {
  static const double log_2pi = std::log(2.0 * 3.14159265358979323846);
  return -0.5 * static_cast<double>(n) * (log_2pi + std::log(variance)) -
         rss / (2.0 * variance);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Local scores (decomposable; what the search caches)

struct ScoreContext {
  const MixedTable* table = nullptr;
  ScoreType score = ScoreType::BIC;
  double variance_floor = 1e-12;
  double laplace = 0.0;
};

// Penalized local term for one node given a parent set (node name lookups go
// through the table). Returns -inf when a discrete-parent configuration is
// empty or, for a continuous node, has fewer than p+2 rows (p = continuous
// parents) — such fits are rank deficient and the structure is rejected.
inline double local_score(const ScoreContext& ctx, const Node& node,
                          const std::vector<Node>& parents) {
  const MixedTable& t = *ctx.table;
  const std::size_t n = t.n_rows();
  const int y_col = t.index_of(node.name);

  std::vector<int> discrete_cols, continuous_cols;
  for (const auto& p : parents) {
    const int j = t.index_of(p.name);
    (p.kind == NodeKind::Discrete ? discrete_cols : continuous_cols).push_back(j);
  }

  detail::ConfigIndexer ix(t, discrete_cols);
  const auto groups = detail::group_rows(t, ix);

  double loglik = 0;
  long params = 0;
  if (node.kind == NodeKind::Discrete) {
    if (!continuous_cols.empty())
      throw argument_error("discrete node " + node.name + " given a continuous parent");
    const Column& yc = t.column(y_col);
    const int levels = static_cast<int>(yc.levels.size());
    params = static_cast<long>(ix.n_configs) * (levels - 1);
    for (const auto& rows : groups) {
      if (rows.empty()) return neg_inf();
      std::vector<double> counts(static_cast<std::size_t>(levels), ctx.laplace);
      for (std::size_t r : rows) counts[static_cast<std::size_t>(yc.codes[r])] += 1.0;
      const double total =
          static_cast<double>(rows.size()) + ctx.laplace * static_cast<double>(levels);
      for (std::size_t r : rows) {
        const double p = counts[static_cast<std::size_t>(yc.codes[r])] / total;
        loglik += std::log(p);
      }
    }
  } else {
    const std::size_t p = continuous_cols.size();
    params = static_cast<long>(ix.n_configs) * static_cast<long>(p + 2);
    for (const auto& rows : groups) {
      if (rows.size() < p + 2) return neg_inf();
      const auto fit = detail::ols(t, rows, continuous_cols, y_col);
      const double variance =
          std::max(fit.rss / static_cast<double>(rows.size()), ctx.variance_floor);
      loglik += detail::gaussian_loglik_term(fit.rss, rows.size(), variance);
    }
  }

  const double penalty = ctx.score == ScoreType::BIC
                             ? 0.5 * static_cast<double>(params) * std::log(static_cast<double>(n))
                             : static_cast<double>(params);
  return loglik - penalty;
}

inline double local_score(const ScoreContext& ctx, const Dag& d, int v) {
  std::vector<Node> parents;
  for (int p : d.parents(v)) parents.push_back(d.node(p));
  return local_score(ctx, d.node(v), parents);
}

// Full decomposable score: sum of per-node local terms.
inline double score_dag(const ScoreContext& ctx, const Dag& d) {
  double total = 0;
  for (int v = 0; v < d.size(); ++v) {
    const double s = local_score(ctx, d, v);
    if (s == neg_inf()) return neg_inf();
    total += s;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Fitting

inline ClgbnFit fit(const Dag& d, const MixedTable& t, const FitOptions& options = {}) {
  if (!check_clgbn_constraint(d))
    throw fit_error("graph violates the CLGBN constraint: a continuous node parents "
                    "a discrete node");
  if (!t.complete())
    throw fit_error("table has missing cells; impute before fitting");
  if (t.n_rows() == 0) throw fit_error("cannot fit on an empty table");

  const std::vector<int> cols = detail::node_columns(d, t);
  ClgbnFit out;
  out.dag = d;
  out.n_obs = t.n_rows();
  out.locals.resize(static_cast<std::size_t>(d.size()));

  for (int v = 0; v < d.size(); ++v) {
    const Node& node = d.node(v);
    std::vector<int> discrete_parents, continuous_parents;
    std::vector<int> discrete_cols, continuous_cols;
    for (int p : d.parents(v)) {
      if (d.node(p).kind == NodeKind::Discrete) {
        discrete_parents.push_back(p);
        discrete_cols.push_back(cols[static_cast<std::size_t>(p)]);
      } else {
        continuous_parents.push_back(p);
        continuous_cols.push_back(cols[static_cast<std::size_t>(p)]);
      }
    }
    detail::ConfigIndexer ix(t, discrete_cols);
    const auto groups = detail::group_rows(t, ix);
    const int y_col = cols[static_cast<std::size_t>(v)];

    if (node.kind == NodeKind::Discrete) {
      const Column& yc = t.column(y_col);
      const int levels = static_cast<int>(yc.levels.size());
      LocalDiscrete local;
      local.node = v;
      local.discrete_parents = discrete_parents;
      local.parent_cards = ix.cards;
      local.n_levels = levels;
      local.cpt.resize(ix.n_configs);
      local.config_seen.assign(ix.n_configs, 1);

      std::vector<double> marginal(static_cast<std::size_t>(levels), options.laplace);
      for (std::size_t r = 0; r < t.n_rows(); ++r)
        marginal[static_cast<std::size_t>(yc.codes[r])] += 1.0;
      const double mtotal = static_cast<double>(t.n_rows()) +
                            options.laplace * static_cast<double>(levels);
      for (auto& m : marginal) m /= mtotal;

      for (std::size_t c = 0; c < ix.n_configs; ++c) {
        const auto& rows = groups[c];
        if (rows.empty()) {
          if (!options.allow_empty_configs)
            throw fit_error("node " + node.name + ": no observations for configuration " +
                            ix.describe(t, c));
          local.cpt[c] = marginal;
          local.config_seen[c] = 0;
          out.warnings.push_back("node " + node.name + ": configuration " + ix.describe(t, c) +
                                 " unseen in training data; marginal fallback stored");
          continue;
        }
        std::vector<double> counts(static_cast<std::size_t>(levels), options.laplace);
        for (std::size_t r : rows) counts[static_cast<std::size_t>(yc.codes[r])] += 1.0;
        const double total =
            static_cast<double>(rows.size()) + options.laplace * static_cast<double>(levels);
        for (auto& cnt : counts) cnt /= total;
        for (std::size_t r : rows)
          out.loglik += std::log(counts[static_cast<std::size_t>(yc.codes[r])]);
        local.cpt[c] = std::move(counts);
      }
      out.n_params += static_cast<long>(ix.n_configs) * (levels - 1);
      out.locals[static_cast<std::size_t>(v)] = std::move(local);
    } else {
      const std::size_t p = continuous_parents.size();
      LocalGaussian local;
      local.node = v;
      local.discrete_parents = discrete_parents;
      local.parent_cards = ix.cards;
      local.continuous_parents = continuous_parents;
      local.coef.resize(ix.n_configs);
      local.variance.resize(ix.n_configs);
      local.config_seen.assign(ix.n_configs, 1);

      {
        std::vector<double> all(t.column(y_col).values);
        local.marginal_mean = mean(all);
        local.marginal_variance = std::max(variance_mle(all), options.variance_floor);
      }

      for (std::size_t c = 0; c < ix.n_configs; ++c) {
        const auto& rows = groups[c];
        if (rows.empty()) {
          if (!options.allow_empty_configs)
            throw fit_error("node " + node.name + ": no observations for configuration " +
                            ix.describe(t, c));
          local.coef[c].assign(p + 1, 0.0);
          local.coef[c][0] = local.marginal_mean;
          local.variance[c] = local.marginal_variance;
          local.config_seen[c] = 0;
          out.warnings.push_back("node " + node.name + ": configuration " + ix.describe(t, c) +
                                 " unseen in training data; marginal fallback stored");
          continue;
        }
        const auto ols = detail::ols(t, rows, continuous_cols, y_col);
        if (ols.rank_deficient)
          out.warnings.push_back("node " + node.name + ": rank-deficient design for "
                                 "configuration " + ix.describe(t, c) +
                                 "; least-norm coefficients used");
        const double variance =
            std::max(ols.rss / static_cast<double>(rows.size()), options.variance_floor);
        out.loglik += detail::gaussian_loglik_term(ols.rss, rows.size(), variance);
        local.coef[c] = ols.coef;
        local.variance[c] = variance;
      }
      out.n_params += static_cast<long>(ix.n_configs) * static_cast<long>(p + 2);
      out.locals[static_cast<std::size_t>(v)] = std::move(local);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

// Sum over rows of the log joint density/mass under the fitted factorization.
// Rows whose discrete levels fall outside the training dictionaries raise a
// data error; configurations stored as fallbacks evaluate through them.
inline double log_likelihood(const ClgbnFit& f, const MixedTable& t) {
  if (!t.complete()) throw data_error("log_likelihood: table has missing cells");
  const std::vector<int> cols = detail::node_columns(f.dag, t);
  double total = 0;
  for (int v = 0; v < f.dag.size(); ++v) {
    const int y_col = cols[static_cast<std::size_t>(v)];
    if (const auto* local = std::get_if<LocalDiscrete>(&f.locals[static_cast<std::size_t>(v)])) {
      std::vector<int> parent_cols;
      for (int p : local->discrete_parents)
        parent_cols.push_back(cols[static_cast<std::size_t>(p)]);
      detail::ConfigIndexer ix(parent_cols, local->parent_cards);
      const Column& yc = t.column(y_col);
      for (std::size_t r = 0; r < t.n_rows(); ++r) {
        const long c = ix.config_of(t, r);
        const int code = yc.codes[r];
        if (c < 0 || code >= local->n_levels)
          throw data_error("node " + f.dag.node(v).name + ": out-of-dictionary level at row " +
                           std::to_string(r));
        total += std::log(local->cpt[static_cast<std::size_t>(c)][static_cast<std::size_t>(code)]);
      }
    } else {
      const auto& lg = std::get<LocalGaussian>(f.locals[static_cast<std::size_t>(v)]);
      std::vector<int> parent_cols;
      for (int p : lg.discrete_parents)
        parent_cols.push_back(cols[static_cast<std::size_t>(p)]);
      detail::ConfigIndexer ix(parent_cols, lg.parent_cards);
      std::vector<int> reg_cols;
      for (int p : lg.continuous_parents)
        reg_cols.push_back(cols[static_cast<std::size_t>(p)]);
      const Column& yc = t.column(y_col);
      for (std::size_t r = 0; r < t.n_rows(); ++r) {
        const long c = ix.config_of(t, r);
        if (c < 0)
          throw data_error("node " + f.dag.node(v).name + ": out-of-dictionary level at row " +
                           std::to_string(r));
        const auto& beta = lg.coef[static_cast<std::size_t>(c)];
        double mu = beta[0];
        for (std::size_t j = 0; j < reg_cols.size(); ++j)
          mu += beta[j + 1] * t.column(reg_cols[j]).values[r];
        total += normal_logpdf(yc.values[r], mu, lg.variance[static_cast<std::size_t>(c)]);
      }
    }
  }
  return total;
}

inline double bic(const ClgbnFit& f) {
  if (f.n_obs < 1) throw argument_error("bic: fit has no observations");
  return f.loglik -
         0.5 * static_cast<double>(f.n_params) * std::log(static_cast<double>(f.n_obs));
}

inline double aic(const ClgbnFit& f) {
  if (f.n_obs < 1) throw argument_error("aic: fit has no observations");
  return f.loglik - static_cast<double>(f.n_params);
}

struct Prediction {
  double value = 0;
  bool fallback = false;  // unseen discrete configuration -> marginal mean
};

// Conditional mean of continuous node v for one row: pick the regression by
// the row's discrete-parent configuration and evaluate it on the continuous
// parents. Unseen configurations fall back to the node's marginal mean.
inline Prediction predict_node(const ClgbnFit& f, int v, const MixedTable& t, std::size_t row) {
  if (f.dag.node(v).kind != NodeKind::Continuous)
    throw argument_error("predict_node: " + f.dag.node(v).name + " is not continuous");
  const auto& local = std::get<LocalGaussian>(f.locals[static_cast<std::size_t>(v)]);
  const std::vector<int> cols = detail::node_columns(f.dag, t);

  for (int p : f.dag.parents(v))
    if (t.is_missing(cols[static_cast<std::size_t>(p)], row))
      throw data_error("predict_node: parent " + f.dag.node(p).name + " missing at row " +
                       std::to_string(row));

  std::vector<int> parent_cols;
  for (int p : local.discrete_parents) parent_cols.push_back(cols[static_cast<std::size_t>(p)]);
  detail::ConfigIndexer ix(parent_cols, local.parent_cards);
  const long c = ix.config_of(t, row);
  if (c < 0 || !local.config_seen[static_cast<std::size_t>(c)])
    return {local.marginal_mean, true};

  const auto& beta = local.coef[static_cast<std::size_t>(c)];
  double mu = beta[0];
  for (std::size_t j = 0; j < local.continuous_parents.size(); ++j)
    mu += beta[j + 1] *
          t.column(cols[static_cast<std::size_t>(local.continuous_parents[j])]).values[row];
  return {mu, false};
}

}  // namespace bnkit
