#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "qvecca/error.hpp"
#include "qvecca/matio.hpp"

namespace qvecca {

namespace detail {

inline void check_sample(std::span<const double> x, const char* name) {
  if (x.size() < 2) throw Error("stats: sample needs at least 2 observations");
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(std::string("stats: non-finite value in sample ") + name);
  }
}

}  // namespace detail

// Pearson product-moment correlation, computed in two passes (mean first,
// then centered moments). Returns nullopt when either sample has zero
// variance: the correlation is undefined there and must not become NaN.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error("stats: sample length mismatch (" + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()) + ")");
  }
  detail::check_sample(x, "x");
  detail::check_sample(y, "y");

  const std::size_t n = x.size();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  // Cauchy-Schwarz bounds |sxy| by sqrt(sxx*syy); rounding can still push
  // the quotient past 1, and identical samples must give exactly 1.
  if (sxy * sxy >= sxx * syy) return sxy > 0.0 ? 1.0 : -1.0;
  return sxy / std::sqrt(sxx * syy);
}

// Ranks 1..n with ties assigned the average of the ranks they occupy.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Spearman rank correlation: Pearson of the average-rank vectors.
inline std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error("stats: sample length mismatch (" + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()) + ")");
  }
  detail::check_sample(x, "x");
  detail::check_sample(y, "y");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

// D x P grid of correlations between embedding rows and linguistic rows;
// entries with a zero-variance side carry the undefined marker.
struct CorrelationGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::optional<double>> cells;  // row-major

  const std::optional<double>& at(std::size_t i, std::size_t j) const {
    return cells[i * cols + j];
  }
};

inline CorrelationGrid correlation_matrix(const Eigen::MatrixXd& emb, const Eigen::MatrixXd& ling) {
  if (emb.cols() != ling.cols()) throw Error("stats: matrices disagree on vocabulary size");
  const std::size_t d = static_cast<std::size_t>(emb.rows());
  const std::size_t p = static_cast<std::size_t>(ling.rows());
  const std::size_t n = static_cast<std::size_t>(emb.cols());

  std::vector<std::vector<double>> ling_rows(p, std::vector<double>(n));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < n; ++k) ling_rows[j][k] = ling(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }

  CorrelationGrid grid;
  grid.rows = d;
  grid.cols = p;
  grid.cells.resize(d * p);
  std::vector<double> emb_row(n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < n; ++k) emb_row[k] = emb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < p; ++j) {
      grid.cells[i * p + j] = pearson(emb_row, ling_rows[j]);
    }
  }
  return grid;
}

inline CorrelationGrid correlation_matrix(const AlignedPair& pair) {
  return correlation_matrix(pair.emb, pair.ling);
}

}  // namespace qvecca
