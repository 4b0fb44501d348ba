#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qvecca/error.hpp"
#include "qvecca/stats.hpp"

namespace qvecca {

// Per-model scores for several metrics, some possibly missing (`NA`).
struct ScoreBoard {
  std::vector<std::string> models;
  std::vector<std::string> metrics;
  std::vector<std::vector<std::optional<double>>> cells;  // [model][metric]

  std::optional<std::size_t> metric_index(std::string_view name) const {
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      if (metrics[j] == name) return j;
    }
    return std::nullopt;
  }
};

// Parses a `MODEL <metric>...` TSV; cells are reals or the marker `NA`.
inline ScoreBoard parse_scoreboard(std::istream& source) {
  std::string line;
  std::vector<std::string_view> cells;
  if (!detail::read_line(source, &line)) throw Error("metaeval: empty scoreboard input");
  detail::split_on(line, '\t', &cells);
  if (cells.empty() || cells[0] != "MODEL") {
    throw Error("metaeval: scoreboard must start with a 'MODEL' header line");
  }
  if (cells.size() < 2) throw Error("metaeval: scoreboard header has no metric columns");

  ScoreBoard board;
  std::unordered_map<std::string_view, std::size_t> seen_metrics;
  for (std::size_t j = 1; j < cells.size(); ++j) {
    if (cells[j].empty()) throw Error("metaeval: empty metric name in header");
    if (!seen_metrics.emplace(cells[j], j).second) {
      throw Error("metaeval: duplicate metric name '" + std::string(cells[j]) + "'");
    }
    board.metrics.emplace_back(cells[j]);
  }

  std::unordered_map<std::string, std::size_t> seen_models;
  std::size_t line_no = 1;
  while (detail::read_line(source, &line)) {
    ++line_no;
    if (line.empty()) continue;
    detail::split_on(line, '\t', &cells);
    if (cells.size() != board.metrics.size() + 1) {
      throw Error("metaeval: ragged row at line " + std::to_string(line_no));
    }
    std::string model(cells[0]);
    if (model.empty()) throw Error("metaeval: empty model id at line " + std::to_string(line_no));
    if (!seen_models.emplace(model, seen_models.size()).second) {
      throw Error("metaeval: duplicate model '" + model + "' at line " + std::to_string(line_no));
    }
    std::vector<std::optional<double>> row;
    row.reserve(board.metrics.size());
    for (std::size_t j = 1; j < cells.size(); ++j) {
      if (cells[j] == "NA") {
        row.push_back(std::nullopt);
        continue;
      }
      double v;
      if (!detail::parse_double(cells[j], &v) || !std::isfinite(v)) {
        throw Error("metaeval: bad cell '" + std::string(cells[j]) + "' at line " +
                    std::to_string(line_no));
      }
      row.push_back(v);
    }
    board.models.push_back(std::move(model));
    board.cells.push_back(std::move(row));
  }
  if (board.models.empty()) throw Error("metaeval: scoreboard has no model rows");
  return board;
}

struct CorrelationCell {
  double r = 0.0;
  std::size_t n_used = 0;
};

// Pearson correlation between two metric columns over the models where both
// are present (pairwise-complete). Fewer than 3 usable models is an error:
// a 2-point Pearson is always +/-1.
inline CorrelationCell correlate(const ScoreBoard& board, std::string_view intrinsic,
                                 std::string_view extrinsic) {
  const auto a = board.metric_index(intrinsic);
  if (!a) throw Error("metaeval: unknown metric '" + std::string(intrinsic) + "'");
  const auto b = board.metric_index(extrinsic);
  if (!b) throw Error("metaeval: unknown metric '" + std::string(extrinsic) + "'");

  std::vector<double> x, y;
  for (std::size_t m = 0; m < board.models.size(); ++m) {
    const auto& va = board.cells[m][*a];
    const auto& vb = board.cells[m][*b];
    if (va && vb) {
      x.push_back(*va);
      y.push_back(*vb);
    }
  }
  if (x.size() < 3) {
    throw Error("metaeval: only " + std::to_string(x.size()) + " models have both '" +
                std::string(intrinsic) + "' and '" + std::string(extrinsic) +
                "'; need at least 3");
  }
  const std::optional<double> r = pearson(x, y);
  if (!r) {
    throw Error("metaeval: zero variance in '" + std::string(intrinsic) + "' or '" +
                std::string(extrinsic) + "' over the shared models");
  }
  return {*r, x.size()};
}

// Grid of correlate() results; cells that cannot be computed are left empty
// and explained in `warnings`. Row/column order follows the requested lists.
struct ReportGrid {
  std::vector<std::string> intrinsic;
  std::vector<std::string> extrinsic;
  std::vector<std::vector<std::optional<CorrelationCell>>> cells;  // [intrinsic][extrinsic]
  std::vector<std::string> warnings;
};

inline ReportGrid report_grid(const ScoreBoard& board, const std::vector<std::string>& intrinsic,
                              const std::vector<std::string>& extrinsic) {
  ReportGrid grid;
  grid.intrinsic = intrinsic;
  grid.extrinsic = extrinsic;
  grid.cells.resize(intrinsic.size());
  for (std::size_t i = 0; i < intrinsic.size(); ++i) {
    grid.cells[i].resize(extrinsic.size());
    for (std::size_t j = 0; j < extrinsic.size(); ++j) {
      try {
        grid.cells[i][j] = correlate(board, intrinsic[i], extrinsic[j]);
      } catch (const Error& e) {
        grid.warnings.push_back(intrinsic[i] + " x " + extrinsic[j] + ": " + e.what());
      }
    }
  }
  return grid;
}

}  // namespace qvecca
