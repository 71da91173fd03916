#pragma once

// K-nearest-neighbour imputation for mixed-type tables under the HEOM
// distance. Distances are computed on the original incomplete data; every
// imputed value is decided before any is written, so the pass is
// order-independent and idempotent.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bnkit/dataset.hpp"
#include "bnkit/stats.hpp"

namespace bnkit {

// max - min over observed values, per continuous column; discrete columns get
// an ignored placeholder so the vector is indexable by column.
inline std::vector<double> feature_ranges(const MixedTable& t) {
  std::vector<double> ranges(static_cast<std::size_t>(t.n_cols()), 0.0);
  for (int j = 0; j < t.n_cols(); ++j) {
    const Column& c = t.column(j);
    if (c.kind != NodeKind::Continuous) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
      if (c.is_missing(r)) continue;
      lo = std::min(lo, c.values[r]);
      hi = std::max(hi, c.values[r]);
    }
    ranges[static_cast<std::size_t>(j)] = (hi > lo) ? hi - lo : 0.0;
  }
  return ranges;
}

// Heterogeneous Euclidean-Overlap Metric between two rows of the same table.
// Per feature: 1 if either side is missing; |a-b|/range for continuous
// (zero-range features contribute 0 when both present, since all observed
// values are then equal); 0/1 overlap for discrete. Contributions aggregate
// as the euclidean norm.
inline double heom_distance(const MixedTable& t, std::size_t row_a, std::size_t row_b,
                            const std::vector<double>& ranges) {
  if (ranges.size() != static_cast<std::size_t>(t.n_cols()))
    throw argument_error("heom_distance: ranges length does not match table");
  double sum = 0;
  for (int j = 0; j < t.n_cols(); ++j) {
    const Column& c = t.column(j);
    double d;
    if (c.is_missing(row_a) || c.is_missing(row_b)) {
      d = 1.0;
    } else if (c.kind == NodeKind::Continuous) {
      const double range = ranges[static_cast<std::size_t>(j)];
      d = range > 0 ? std::abs(c.values[row_a] - c.values[row_b]) / range : 0.0;
    } else {
      d = c.codes[row_a] == c.codes[row_b] ? 0.0 : 1.0;
    }
    sum += d * d;
  }
  return std::sqrt(sum);
}

// Convenience for two rows drawn from different tables sharing a schema
// (used when scoring held-out rows against training donors).
inline double heom_distance(const MixedTable& a, std::size_t row_a, const MixedTable& b,
                            std::size_t row_b, const std::vector<double>& ranges) {
  if (a.n_cols() != b.n_cols())
    throw data_error("heom_distance: tables have different column counts");
  double sum = 0;
  for (int j = 0; j < a.n_cols(); ++j) {
    const Column& ca = a.column(j);
    const Column& cb = b.column(j);
    if (ca.name != cb.name || ca.kind != cb.kind)
      throw data_error("heom_distance: schema mismatch at column " + ca.name);
    double d;
    if (ca.is_missing(row_a) || cb.is_missing(row_b)) {
      d = 1.0;
    } else if (ca.kind == NodeKind::Continuous) {
      const double range = ranges[static_cast<std::size_t>(j)];
      d = range > 0 ? std::abs(ca.values[row_a] - cb.values[row_b]) / range : 0.0;
    } else {
      d = ca.codes[row_a] == cb.codes[row_b] ? 0.0 : 1.0;
    }
    sum += d * d;
  }
  return std::sqrt(sum);
}

struct ImputationReport {
  std::size_t cells_imputed = 0;
  std::map<std::string, std::size_t> per_column;
  int k = 0;
};

// Fills every missing cell from the k nearest donor rows (rows where the cell
// is present), ranked by HEOM on the original data. Ties at the k-th distance
// widen the donor set. Continuous cells take the donor median, discrete cells
// the donor mode (tie -> lowest code).
inline std::pair<MixedTable, ImputationReport> knn_impute(const MixedTable& t, int k = 10) {
  if (k < 1) throw argument_error("knn_impute: k must be >= 1");
  const std::size_t n = t.n_rows();

  for (int j = 0; j < t.n_cols(); ++j) {
    const Column& c = t.column(j);
    std::size_t present = 0;
    for (std::size_t r = 0; r < n; ++r)
      if (!c.is_missing(r)) ++present;
    if (present < static_cast<std::size_t>(k))
      throw data_error("knn_impute: column " + c.name + " has only " +
                       std::to_string(present) + " observed rows, need at least " +
                       std::to_string(k) + " donors");
  }

  const std::vector<double> ranges = feature_ranges(t);
  ImputationReport report;
  report.k = k;

  // (column, row, value-or-code) decided against the original table
  struct Pending {
    int col;
    std::size_t row;
    double value;
    int code;
  };
  std::vector<Pending> pending;

  std::vector<double> dist(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    bool any_missing = false;
    for (int j = 0; j < t.n_cols() && !any_missing; ++j) any_missing = t.is_missing(j, r);
    if (!any_missing) continue;

    for (std::size_t s = 0; s < n; ++s)
      dist[s] = s == r ? std::numeric_limits<double>::infinity()
                       : heom_distance(t, r, s, ranges);

    for (int j = 0; j < t.n_cols(); ++j) {
      const Column& c = t.column(j);
      if (!c.is_missing(r)) continue;

      std::vector<std::size_t> donors;
      donors.reserve(n);
      for (std::size_t s = 0; s < n; ++s)
        if (s != r && !c.is_missing(s)) donors.push_back(s);
      // guaranteed by the up-front per-column check unless the only observed
      // rows include r itself, which is impossible since r is missing here
      std::sort(donors.begin(), donors.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
      });
      std::size_t take = std::min(static_cast<std::size_t>(k), donors.size());
      while (take < donors.size() && dist[donors[take]] == dist[donors[take - 1]]) ++take;

      if (c.kind == NodeKind::Continuous) {
        std::vector<double> vals;
        vals.reserve(take);
        for (std::size_t i = 0; i < take; ++i) vals.push_back(c.values[donors[i]]);
        pending.push_back({j, r, median(vals), -1});
      } else {
        std::vector<int> codes;
        codes.reserve(take);
        for (std::size_t i = 0; i < take; ++i) codes.push_back(c.codes[donors[i]]);
        pending.push_back({j, r, 0.0, mode_code(codes)});
      }
      ++report.cells_imputed;
      ++report.per_column[c.name];
    }
  }

  MixedTable out = t;
  for (const auto& p : pending) {
    if (out.column(p.col).kind == NodeKind::Continuous)
      out.set_continuous(p.col, p.row, p.value);
    else
      out.set_discrete(p.col, p.row, p.code);
  }
  return {std::move(out), std::move(report)};
}

}  // namespace bnkit
