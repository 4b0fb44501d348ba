#pragma once

#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qvecca/error.hpp"
#include "qvecca/matio.hpp"
#include "qvecca/stats.hpp"

namespace qvecca {

enum class OovPolicy { skip, fail };

struct SimilarityEntry {
  std::string word1;
  std::string word2;
  double human_score = 0.0;
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityEntry> entries;
};

struct SimilarityResult {
  double spearman = 0.0;
  double coverage = 0.0;  // covered pairs / total pairs
  std::size_t pairs_used = 0;
  std::size_t pairs_total = 0;
};

// Parses `word1 word2 score` lines. Tab-, comma- and space-separated lines
// are all accepted (the delimiter is detected per line, tab first); lines
// starting with '#' are comments.
inline SimilarityDataset parse_simdataset(std::istream& source, std::string name = {}) {
  SimilarityDataset dataset;
  dataset.name = std::move(name);
  std::string line;
  std::vector<std::string_view> cells;
  std::size_t line_no = 0;
  while (detail::read_line(source, &line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.find('\t') != std::string::npos) {
      detail::split_on(line, '\t', &cells);
    } else if (line.find(',') != std::string::npos) {
      detail::split_on(line, ',', &cells);
    } else {
      detail::split_whitespace(line, &cells);
    }
    if (cells.size() != 3 || cells[0].empty() || cells[1].empty()) {
      throw Error("wordsim: malformed line " + std::to_string(line_no) +
                  " (expected 'word1 word2 score')");
    }
    double score;
    if (!detail::parse_double(cells[2], &score) || !std::isfinite(score)) {
      throw Error("wordsim: bad score '" + std::string(cells[2]) + "' at line " +
                  std::to_string(line_no));
    }
    dataset.entries.push_back({std::string(cells[0]), std::string(cells[1]), score});
  }
  if (dataset.entries.size() < 2) {
    throw Error("wordsim: dataset needs at least 2 scored pairs");
  }
  return dataset;
}

// Spearman correlation between cosine similarities and human judgements.
// Pairs with a missing word, or with a zero vector (cosine undefined), are
// out of vocabulary: dropped under `skip`, a hard error under `fail`.
inline SimilarityResult evaluate_similarity(const EmbeddingTable& emb,
                                            const SimilarityDataset& dataset,
                                            OovPolicy oov_policy = OovPolicy::skip,
                                            CasePolicy case_policy = CasePolicy::preserve) {
  auto fold = [case_policy](const std::string& w) {
    return case_policy == CasePolicy::fold_lower ? detail::fold_lower_ascii(w) : w;
  };
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < emb.words.size(); ++i) {
    index.emplace(fold(emb.words[i]), static_cast<Eigen::Index>(i));  // first wins
  }

  auto lookup = [&](const std::string& word) -> Eigen::Index {
    auto it = index.find(fold(word));
    return it == index.end() ? -1 : it->second;
  };

  std::vector<double> model_scores;
  std::vector<double> human_scores;
  for (const SimilarityEntry& entry : dataset.entries) {
    const Eigen::Index c1 = lookup(entry.word1);
    const Eigen::Index c2 = lookup(entry.word2);
    std::string missing;
    if (c1 < 0) {
      missing = entry.word1;
    } else if (c2 < 0) {
      missing = entry.word2;
    } else {
      const double n1 = emb.matrix.col(c1).norm();
      const double n2 = emb.matrix.col(c2).norm();
      if (n1 == 0.0 || n2 == 0.0) {
        missing = n1 == 0.0 ? entry.word1 : entry.word2;  // zero vector: cosine undefined
      } else {
        model_scores.push_back(emb.matrix.col(c1).dot(emb.matrix.col(c2)) / (n1 * n2));
        human_scores.push_back(entry.human_score);
        continue;
      }
    }
    if (oov_policy == OovPolicy::fail) {
      throw Error("wordsim: no usable vector for '" + missing + "'");
    }
  }

  if (model_scores.size() < 2) {
    throw Error("wordsim: fewer than 2 covered pairs (coverage " +
                std::to_string(model_scores.size()) + "/" +
                std::to_string(dataset.entries.size()) + ")");
  }
  const std::optional<double> rho = spearman(model_scores, human_scores);
  if (!rho) throw Error("wordsim: rank correlation undefined (a score column is constant)");

  SimilarityResult result;
  result.spearman = *rho;
  result.pairs_used = model_scores.size();
  result.pairs_total = dataset.entries.size();
  result.coverage =
      static_cast<double>(result.pairs_used) / static_cast<double>(result.pairs_total);
  return result;
}

}  // namespace qvecca
