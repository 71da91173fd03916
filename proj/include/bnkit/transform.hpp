#pragma once

// Normalization transforms for continuous columns and the Pearson-statistic
// machinery used to pick one per column: fit a normal, bin into equiprobable
// classes, and score the chi-square discrepancy per degree of freedom.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bnkit/stats.hpp"

namespace bnkit {

enum class TransformKind {
  None,
  Log,
  Sqrt,
  Arcsin,
  Arcsinh,
  BoxCox,
  YeoJohnson,
  OrderedQuantile,
};

inline const char* transform_name(TransformKind k) {
  switch (k) {
    case TransformKind::None: return "none";
    case TransformKind::Log: return "log";
    case TransformKind::Sqrt: return "sqrt";
    case TransformKind::Arcsin: return "arcsin";
    case TransformKind::Arcsinh: return "arcsinh";
    case TransformKind::BoxCox: return "boxcox";
    case TransformKind::YeoJohnson: return "yeojohnson";
    case TransformKind::OrderedQuantile: return "orderedquantile";
  }
  return "?";
}

inline TransformKind transform_from_name(const std::string& s) {
  for (TransformKind k :
       {TransformKind::None, TransformKind::Log, TransformKind::Sqrt, TransformKind::Arcsin,
        TransformKind::Arcsinh, TransformKind::BoxCox, TransformKind::YeoJohnson,
        TransformKind::OrderedQuantile})
    if (s == transform_name(k)) return k;
  throw argument_error("unknown transform name: " + s);
}

struct TransformSpec {
  TransformKind kind = TransformKind::None;
  std::string column;
  double lambda = 1.0;         // BoxCox / YeoJohnson
  bool percent_scale = false;  // Arcsin input scale: [0,100] vs [0,1]
  // OrderedQuantile training mapping: sorted distinct values -> normal scores
  std::vector<double> oq_values;
  std::vector<double> oq_scores;
  double normality_score = std::numeric_limits<double>::quiet_NaN();
};

// Pearson chi-square fit statistic against the sample's own fitted normal,
// divided by its degrees of freedom. Classes are equiprobable under the fit:
// C = ceil(2 n^{2/5}) classes, dof = C - 3 (mean and variance estimated).
// Smaller means more Gaussian.
inline double pearson_normality(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 20) throw argument_error("pearson_normality: need n >= 20");
  const double mu = mean(x);
  const double s2 = variance_mle(x);
  if (s2 <= 0) throw argument_error("pearson_normality: degenerate sample (zero variance)");
  const double sd = std::sqrt(s2);
  const int C = static_cast<int>(std::ceil(2.0 * std::pow(static_cast<double>(n), 0.4)));
  std::vector<double> observed(static_cast<std::size_t>(C), 0.0);
  for (double v : x) {
    const double f = normal_cdf((v - mu) / sd);
    int cls = static_cast<int>(f * C);
    if (cls < 0) cls = 0;
    if (cls >= C) cls = C - 1;
    observed[static_cast<std::size_t>(cls)] += 1.0;
  }
  const double expected = static_cast<double>(n) / C;
  double p = 0;
  for (double o : observed) p += (o - expected) * (o - expected) / expected;
  return p / (C - 3);
}

namespace detail {

inline double boxcox_value(double x, double lambda) {
  if (lambda == 0.0) return std::log(x);
  return (std::pow(x, lambda) - 1.0) / lambda;
}

inline double yeojohnson_value(double x, double lambda) {
  if (x >= 0) {
    if (lambda == 0.0) return std::log1p(x);
    return (std::pow(x + 1.0, lambda) - 1.0) / lambda;
  }
  if (lambda == 2.0) return -std::log1p(-x);
  return -(std::pow(1.0 - x, 2.0 - lambda) - 1.0) / (2.0 - lambda);
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double boxcox_profile_loglik(const std::vector<double>& x, double lambda) {
  std::vector<double> y(x.size());
  double log_sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = boxcox_value(x[i], lambda);
    log_sum += std::log(x[i]);
  }
  const double s2 = variance_mle(y);
  if (s2 <= 0) return neg_inf();
  const double n = static_cast<double>(x.size());
  return -0.5 * n * std::log(s2) + (lambda - 1.0) * log_sum;
}

inline double yeojohnson_profile_loglik(const std::vector<double>& x, double lambda) {
  std::vector<double> y(x.size());
  double log_sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = yeojohnson_value(x[i], lambda);
    log_sum += (x[i] >= 0 ? 1.0 : -1.0) * std::log1p(std::abs(x[i]));
  }
  const double s2 = variance_mle(y);
  if (s2 <= 0) return neg_inf();
  const double n = static_cast<double>(x.size());
  return -0.5 * n * std::log(s2) + (lambda - 1.0) * log_sum;
}

inline std::size_t count_distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

// Whether a transform can be fitted on this data at all. Used to skip
// candidates silently during selection.
inline bool transform_applicable(TransformKind kind, const std::vector<double>& x,
                                 bool percent_scale) {
  switch (kind) {
    case TransformKind::None:
    case TransformKind::Arcsinh:
    case TransformKind::YeoJohnson:
      return true;
    case TransformKind::Log:
    case TransformKind::BoxCox:
      return std::all_of(x.begin(), x.end(), [](double v) { return v > 0; });
    case TransformKind::Sqrt:
      return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0; });
    case TransformKind::Arcsin: {
      const double hi = percent_scale ? 100.0 : 1.0;
      return std::all_of(x.begin(), x.end(), [hi](double v) { return v >= 0 && v <= hi; });
    }
    case TransformKind::OrderedQuantile:
      return detail::count_distinct(x) >= 2;
  }
  return false;
}

// Fits a single transform's parameters on a column. Box-Cox and Yeo-Johnson
// lambdas maximize the profile log-likelihood by golden-section search on
// [-5, 5] to a 1e-4 bracket. OrderedQuantile stores the training mapping
// value -> Phi^{-1}((rank - 0.5)/n), ties sharing their average rank.
inline TransformSpec fit_transform(TransformKind kind, const std::vector<double>& x,
                                   const std::string& column = "", bool percent_scale = false) {
  if (x.empty()) throw argument_error("fit_transform: empty column");
  if (!transform_applicable(kind, x, percent_scale))
    throw transform_error(std::string("transform ") + transform_name(kind) +
                          " not applicable to column " + column);
  TransformSpec spec;
  spec.kind = kind;
  spec.column = column;
  spec.percent_scale = percent_scale;
  switch (kind) {
    case TransformKind::BoxCox:
      spec.lambda = detail::golden_max(
          [&](double l) { return detail::boxcox_profile_loglik(x, l); }, -5.0, 5.0, 1e-4);
      break;
    case TransformKind::YeoJohnson:
      spec.lambda = detail::golden_max(
          [&](double l) { return detail::yeojohnson_profile_loglik(x, l); }, -5.0, 5.0, 1e-4);
      break;
    case TransformKind::OrderedQuantile: {
      const std::size_t n = x.size();
      std::vector<double> sorted(x);
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        spec.oq_values.push_back(sorted[i]);
        spec.oq_scores.push_back(
            normal_quantile((avg_rank - 0.5) / static_cast<double>(n)));
        i = j;
      }
      break;
    }
    default:
      break;
  }
  return spec;
}

// Elementwise application; rank-based for OrderedQuantile, which interpolates
// its stored training mapping for unseen values and extrapolates linearly
// with the boundary segment's slope beyond the training range.
inline std::vector<double> apply_transform(const TransformSpec& spec,
                                           const std::vector<double>& x) {
  std::vector<double> out(x.size());
  auto fail = [&](std::size_t i, const std::string& what) {
    throw transform_error(std::string(transform_name(spec.kind)) + ": " + what +
                          " at index " + std::to_string(i));
  };
  switch (spec.kind) {
    case TransformKind::None:
      out = x;
      break;
    case TransformKind::Log:
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0) fail(i, "non-positive value");
        out[i] = std::log(x[i]);
      }
      break;
    case TransformKind::Sqrt:
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0) fail(i, "negative value");
        out[i] = std::sqrt(x[i]);
      }
      break;
    case TransformKind::Arcsin: {
      const double scale = spec.percent_scale ? 100.0 : 1.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = x[i] / scale;
        if (p < 0 || p > 1) fail(i, "value outside proportion range");
        out[i] = std::asin(std::sqrt(p));
      }
      break;
    }
    case TransformKind::Arcsinh:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::asinh(x[i]);
      break;
    case TransformKind::BoxCox:
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0) fail(i, "non-positive value");
        out[i] = detail::boxcox_value(x[i], spec.lambda);
      }
      break;
    case TransformKind::YeoJohnson:
      for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = detail::yeojohnson_value(x[i], spec.lambda);
      break;
    case TransformKind::OrderedQuantile: {
      const auto& vs = spec.oq_values;
      const auto& sc = spec.oq_scores;
      if (vs.size() < 2) throw transform_error("orderedquantile: spec not fitted");
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x[i];
        auto it = std::lower_bound(vs.begin(), vs.end(), v);
        std::size_t hi = static_cast<std::size_t>(it - vs.begin());
        if (hi < vs.size() && vs[hi] == v) {
          out[i] = sc[hi];
          continue;
        }
        if (hi == 0) hi = 1;                        // below range: first segment
        if (hi >= vs.size()) hi = vs.size() - 1;    // above range: last segment
        const std::size_t lo = hi - 1;
        const double t = (v - vs[lo]) / (vs[hi] - vs[lo]);
        out[i] = sc[lo] + t * (sc[hi] - sc[lo]);
      }
      break;
    }
  }
  return out;
}

inline std::vector<TransformKind> default_battery() {
  return {TransformKind::None,   TransformKind::Log,        TransformKind::Sqrt,
          TransformKind::Arcsin, TransformKind::Arcsinh,    TransformKind::BoxCox,
          TransformKind::YeoJohnson, TransformKind::OrderedQuantile};
}

// Fits every applicable candidate and keeps the one with the smallest Pearson
// statistic on the transformed column. None is always a candidate and wins
// ties, so the winner is never worse than leaving the column alone.
inline TransformSpec select_transform(const std::vector<double>& x,
                                      std::vector<TransformKind> candidates,
                                      const std::string& column = "",
                                      bool percent_scale = false) {
  if (candidates.empty()) throw argument_error("select_transform: no candidates");
  if (std::find(candidates.begin(), candidates.end(), TransformKind::None) == candidates.end())
    candidates.insert(candidates.begin(), TransformKind::None);
  else
    std::stable_partition(candidates.begin(), candidates.end(),
                          [](TransformKind k) { return k == TransformKind::None; });

  bool have_best = false;
  TransformSpec best;
  for (TransformKind kind : candidates) {
    if (!transform_applicable(kind, x, percent_scale)) continue;
    TransformSpec spec;
    double score;
    try {
      spec = fit_transform(kind, x, column, percent_scale);
      score = pearson_normality(apply_transform(spec, x));
    } catch (const error&) {
      if (kind == TransformKind::None) throw;  // caller fed a degenerate column
      continue;  // candidate collapsed the data; skip it
    }
    spec.normality_score = score;
    if (!have_best || score < best.normality_score) {
      best = std::move(spec);
      have_best = true;
    }
  }
  if (!have_best) throw transform_error("select_transform: no applicable candidate");
  return best;
}

}  // namespace bnkit
