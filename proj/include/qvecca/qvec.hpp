#pragma once

#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qvecca/error.hpp"
#include "qvecca/matio.hpp"
#include "qvecca/stats.hpp"

namespace qvecca {

struct DimensionAlignment {
  Eigen::Index column = -1;  // linguistic column index
  double r = 0.0;            // Pearson correlation, always > 0 when aligned
};

// Result of the constrained alignment maximization. Each embedding
// dimension is matched to at most one linguistic column; several
// dimensions may share a column. score == sum of per_dimension.
struct QvecResult {
  double score = 0.0;
  std::vector<std::optional<DimensionAlignment>> alignment;  // size D
  std::vector<double> per_dimension;                         // size D, each >= 0

  std::size_t aligned_count() const {
    std::size_t n = 0;
    for (const auto& a : alignment) {
      if (a) ++n;
    }
    return n;
  }
};

// Maximizes the cumulative correlation between embedding dimensions and
// linguistic columns under the at-most-one-column-per-dimension constraint.
// Rows are independent under that constraint and leaving a row unaligned is
// feasible, so the optimum per dimension is max(0, max_j r(x_i, s_j)).
// Undefined correlations are skipped; ties go to the smallest column index.
inline QvecResult qvec_score(const AlignedPair& pair) {
  const CorrelationGrid grid = correlation_matrix(pair);

  QvecResult result;
  result.alignment.resize(grid.rows);
  result.per_dimension.assign(grid.rows, 0.0);
  std::size_t usable_dimensions = 0;

  for (std::size_t i = 0; i < grid.rows; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    Eigen::Index best_column = -1;
    for (std::size_t j = 0; j < grid.cols; ++j) {
      const std::optional<double>& r = grid.at(i, j);
      if (r && *r > best) {
        best = *r;
        best_column = static_cast<Eigen::Index>(j);
      }
    }
    if (best_column >= 0) ++usable_dimensions;
    if (best > 0.0) {
      result.alignment[i] = DimensionAlignment{best_column, best};
      result.per_dimension[i] = best;
    }
  }
  if (usable_dimensions == 0) {
    throw Error("qvec: no usable embedding dimension (every correlation is undefined)");
  }

  double score = 0.0;
  for (double c : result.per_dimension) score += c;
  result.score = score;
  return result;
}

// Interpretability report: one `dim<TAB>column<TAB>r` line per aligned
// embedding dimension.
inline void write_alignment(const QvecResult& result, const std::vector<std::string>& columns,
                            std::ostream& sink) {
  char buf[32];
  for (std::size_t i = 0; i < result.alignment.size(); ++i) {
    const auto& a = result.alignment[i];
    if (!a) continue;
    std::snprintf(buf, sizeof(buf), "%.6f", a->r);
    sink << i << '\t' << columns.at(static_cast<std::size_t>(a->column)) << '\t' << buf << '\n';
  }
  if (!sink) throw Error("qvec: alignment write failed");
}

}  // namespace qvecca
