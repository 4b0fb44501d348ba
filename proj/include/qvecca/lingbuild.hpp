#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qvecca/error.hpp"
#include "qvecca/matio.hpp"

namespace qvecca {

// One token-level annotation tally: how often `word` was annotated with
// `property` (e.g. a supersense like `nn.animal` or a POS tag `ptb.vb`).
struct AnnotationCount {
  std::string word;
  std::string property;
  std::int64_t count = 0;
};

// Aggregated (word, property) counts. Ordered maps keep iteration, and
// therefore every derived table, deterministic.
class CountStore {
 public:
  void add(const AnnotationCount& record) { add(record.word, record.property, record.count); }

  void add(std::string_view word, std::string_view property, std::int64_t count) {
    if (count < 0) {
      throw Error("lingbuild: negative count for (" + std::string(word) + ", " +
                  std::string(property) + ")");
    }
    if (count == 0) return;
    counts_[std::string(word)][std::string(property)] += count;
  }

  bool empty() const { return counts_.empty(); }

  std::int64_t count(const std::string& word, const std::string& property) const {
    auto w = counts_.find(word);
    if (w == counts_.end()) return 0;
    auto p = w->second.find(property);
    return p == w->second.end() ? 0 : p->second;
  }

  std::int64_t total(const std::string& word) const {
    auto w = counts_.find(word);
    if (w == counts_.end()) return 0;
    std::int64_t sum = 0;
    for (const auto& [_, c] : w->second) sum += c;
    return sum;
  }

  const std::map<std::string, std::map<std::string, std::int64_t>>& by_word() const {
    return counts_;
  }

 private:
  std::map<std::string, std::map<std::string, std::int64_t>> counts_;
};

template <typename Range>
CountStore accumulate(const Range& records) {
  CountStore store;
  for (const AnnotationCount& record : records) store.add(record);
  return store;
}

// Reads `word<TAB>property<TAB>count` lines into a CountStore.
inline CountStore parse_counts(std::istream& source) {
  CountStore store;
  std::string line;
  std::vector<std::string_view> cells;
  std::size_t line_no = 0;
  while (detail::read_line(source, &line)) {
    ++line_no;
    if (line.empty()) continue;
    detail::split_on(line, '\t', &cells);
    if (cells.size() != 3) {
      throw Error("lingbuild: expected 'word<TAB>property<TAB>count' at line " +
                  std::to_string(line_no));
    }
    if (cells[0].empty() || cells[1].empty()) {
      throw Error("lingbuild: empty word or property at line " + std::to_string(line_no));
    }
    std::int64_t count = 0;
    auto [ptr, ec] = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), count);
    if (ec != std::errc{} || ptr != cells[2].data() + cells[2].size()) {
      throw Error("lingbuild: non-integer count '" + std::string(cells[2]) + "' at line " +
                  std::to_string(line_no));
    }
    store.add(cells[0], cells[1], count);
  }
  return store;
}

// Turns aggregated counts into per-word distributions over the observed
// properties. Words with fewer than min_word_freq total annotations are
// excluded (sparse words give skewed probability estimates). Words and
// columns come out in lexicographic order.
inline LinguisticTable build_table(const CountStore& store, std::int64_t min_word_freq = 5) {
  if (min_word_freq < 1) throw Error("lingbuild: min_word_freq must be >= 1");
  if (store.empty()) throw Error("lingbuild: empty count store");

  std::vector<std::pair<std::string, std::int64_t>> retained;  // word, total
  std::set<std::string> properties;
  for (const auto& [word, per_property] : store.by_word()) {
    std::int64_t total = 0;
    for (const auto& [_, c] : per_property) total += c;
    if (total < min_word_freq) continue;
    retained.emplace_back(word, total);
    for (const auto& [property, _] : per_property) properties.insert(property);
  }
  if (retained.empty()) {
    throw Error("lingbuild: no word reaches min_word_freq = " + std::to_string(min_word_freq));
  }

  LinguisticTable table;
  table.words.reserve(retained.size());
  table.column_names.assign(properties.begin(), properties.end());
  std::map<std::string, Eigen::Index> column_index;
  for (std::size_t j = 0; j < table.column_names.size(); ++j) {
    column_index.emplace(table.column_names[j], static_cast<Eigen::Index>(j));
  }

  table.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.column_names.size()),
                                       static_cast<Eigen::Index>(retained.size()));
  for (std::size_t k = 0; k < retained.size(); ++k) {
    const auto& [word, total] = retained[k];
    table.words.push_back(word);
    for (const auto& [property, count] : store.by_word().at(word)) {
      table.matrix(column_index.at(property), static_cast<Eigen::Index>(k)) =
          static_cast<double>(count) / static_cast<double>(total);
    }
  }
  table.normalized = true;
  return table;
}

// Stacks two tables with disjoint column name sets over their common
// vocabulary (the PTB+SST setup). Each block keeps its original values, so
// per-word columns of the result sum to 2 and the table is unnormalized.
inline LinguisticTable concat_tables(const LinguisticTable& a, const LinguisticTable& b) {
  std::set<std::string> names_a(a.column_names.begin(), a.column_names.end());
  for (const std::string& name : b.column_names) {
    if (names_a.contains(name)) {
      throw Error("lingbuild: column name '" + name + "' appears in both tables");
    }
  }

  std::map<std::string, Eigen::Index> index_a, index_b;
  for (std::size_t i = 0; i < a.words.size(); ++i) index_a.emplace(a.words[i], static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < b.words.size(); ++i) index_b.emplace(b.words[i], static_cast<Eigen::Index>(i));

  std::vector<std::string> vocab;
  for (const auto& [word, _] : index_a) {
    if (index_b.contains(word)) vocab.push_back(word);  // std::map keeps this sorted
  }
  if (vocab.empty()) throw Error("lingbuild: the tables share no vocabulary");

  LinguisticTable result;
  result.words = vocab;
  result.column_names = a.column_names;
  result.column_names.insert(result.column_names.end(), b.column_names.begin(),
                             b.column_names.end());
  const Eigen::Index pa = a.properties();
  const Eigen::Index pb = b.properties();
  result.matrix.resize(pa + pb, static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t k = 0; k < vocab.size(); ++k) {
    const Eigen::Index col = static_cast<Eigen::Index>(k);
    result.matrix.col(col).head(pa) = a.matrix.col(index_a.at(vocab[k]));
    result.matrix.col(col).tail(pb) = b.matrix.col(index_b.at(vocab[k]));
  }
  result.normalized = false;
  return result;
}

}  // namespace qvecca
