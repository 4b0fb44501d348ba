#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qvecca/error.hpp"

namespace qvecca {

// How the first line of an embedding file is interpreted.
//   automatic: a two-token all-integer first line is taken as an "N D" header
//   required:  the first line must be an "N D" header
//   none:      the first line is an ordinary record
enum class HeaderMode { automatic, required, none };

// Vocabulary matching policy. Linguistic resources are usually keyed by
// lowercase lemmas while embeddings may be cased; folding is opt-in.
enum class CasePolicy { preserve, fold_lower };

// Dense D x N matrix of word vectors; column n is the vector of words[n].
struct EmbeddingTable {
  std::vector<std::string> words;
  Eigen::MatrixXd matrix;
  std::size_t duplicates_dropped = 0;

  Eigen::Index dim() const { return matrix.rows(); }
  Eigen::Index vocab_size() const { return matrix.cols(); }
};

// Dense P x N matrix of per-word linguistic property values in [0,1];
// column n is the property vector of words[n], row p is column_names[p].
struct LinguisticTable {
  std::vector<std::string> words;
  std::vector<std::string> column_names;
  Eigen::MatrixXd matrix;
  // True when every word column sums to 1 (tables built from annotation
  // counts); concatenated or externally loaded tables may be unnormalized.
  bool normalized = false;

  Eigen::Index properties() const { return matrix.rows(); }
  Eigen::Index vocab_size() const { return matrix.cols(); }
};

// An embedding table and a linguistic table restricted to their common
// vocabulary, columns reordered so column k of both matrices is vocab[k].
struct AlignedPair {
  std::vector<std::string> vocab;  // N' words, lexicographic by code point
  Eigen::MatrixXd emb;             // D x N'
  Eigen::MatrixXd ling;            // P x N'
  std::vector<std::string> ling_columns;
  std::size_t emb_vocab_size = 0;  // distinct words per table after folding
  std::size_t ling_vocab_size = 0;

  Eigen::Index common_words() const { return emb.cols(); }
};

namespace detail {

inline void split_whitespace(std::string_view line, std::vector<std::string_view>* out) {
  out->clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out->push_back(line.substr(start, i - start));
  }
}

inline void split_on(std::string_view line, char sep, std::vector<std::string_view>* out) {
  out->clear();
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out->push_back(line.substr(start));
      return;
    }
    out->push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Locale-independent strict double parse; the full token must be consumed.
inline bool parse_double(std::string_view token, double* out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc{} && ptr == last;
}

inline bool parse_unsigned(std::string_view token, std::uint64_t* out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc{} && ptr == last;
}

// Reads one line, stripping a trailing '\r' so CRLF files parse cleanly.
inline bool read_line(std::istream& in, std::string* line) {
  if (!std::getline(in, *line)) return false;
  if (!line->empty() && line->back() == '\r') line->pop_back();
  return true;
}

inline std::string fold_lower_ascii(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Renders a double with 17 significant digits: enough for the value to
// survive a write -> parse round trip bit-exactly.
inline void append_full_precision(double value, std::string* out) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  (void)ec;
  out->append(buf.data(), ptr);
}

}  // namespace detail

// Parses the plain-text `word v1 v2 ... vD` embedding format, one record
// per line, with an optional leading `N D` count header. Duplicate words:
// first occurrence wins; the dropped count is reported on the table.
inline EmbeddingTable parse_embeddings(std::istream& source,
                                       HeaderMode expect_header = HeaderMode::automatic) {
  std::string line;
  std::vector<std::string_view> tokens;
  std::vector<std::string> words;
  std::vector<double> values;  // row-major per record, D per word
  std::unordered_map<std::string, std::size_t> index;
  std::size_t duplicates = 0;
  std::size_t records = 0;
  Eigen::Index dim = -1;
  bool have_header = false;
  std::uint64_t header_n = 0, header_d = 0;
  bool first_line = true;
  std::size_t line_no = 0;

  while (detail::read_line(source, &line)) {
    ++line_no;
    detail::split_whitespace(line, &tokens);
    if (tokens.empty()) continue;

    if (first_line) {
      first_line = false;
      bool looks_like_header = tokens.size() == 2 &&
                               detail::parse_unsigned(tokens[0], &header_n) &&
                               detail::parse_unsigned(tokens[1], &header_d);
      if (expect_header == HeaderMode::required && !looks_like_header) {
        throw Error("matio: expected an 'N D' header on the first line");
      }
      if (looks_like_header && expect_header != HeaderMode::none) {
        have_header = true;
        continue;
      }
    }

    if (tokens.size() < 2) {
      throw Error("matio: line " + std::to_string(line_no) + " has no vector values");
    }
    const Eigen::Index d = static_cast<Eigen::Index>(tokens.size()) - 1;
    if (dim < 0) {
      dim = d;
    } else if (d != dim) {
      throw Error("matio: inconsistent vector length at line " + std::to_string(line_no) +
                  " (got " + std::to_string(d) + ", expected " + std::to_string(dim) + ")");
    }
    ++records;

    std::string word(tokens[0]);
    if (index.contains(word)) {
      ++duplicates;
      continue;
    }
    index.emplace(std::move(word), words.size());
    words.emplace_back(tokens[0]);
    for (Eigen::Index k = 0; k < dim; ++k) {
      double v;
      if (!detail::parse_double(tokens[static_cast<std::size_t>(k) + 1], &v)) {
        throw Error("matio: non-numeric vector entry '" + std::string(tokens[k + 1]) +
                    "' at line " + std::to_string(line_no));
      }
      if (!std::isfinite(v)) {
        throw Error("matio: non-finite vector entry at line " + std::to_string(line_no));
      }
      values.push_back(v);
    }
  }

  if (records == 0) throw Error("matio: empty embedding input");
  if (have_header) {
    if (header_n != records) {
      throw Error("matio: header declares " + std::to_string(header_n) + " records but " +
                  std::to_string(records) + " were found");
    }
    if (static_cast<Eigen::Index>(header_d) != dim) {
      throw Error("matio: header declares dimension " + std::to_string(header_d) +
                  " but records have " + std::to_string(dim));
    }
  }

  EmbeddingTable table;
  const Eigen::Index n = static_cast<Eigen::Index>(words.size());
  table.matrix.resize(dim, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      table.matrix(r, c) = values[static_cast<std::size_t>(c) * dim + r];
    }
  }
  table.words = std::move(words);
  table.duplicates_dropped = duplicates;
  return table;
}

// Parses the linguistic TSV format: a `WORD <name>...` header line followed
// by one `word <value>...` row per word. Values must lie in [0,1].
inline LinguisticTable parse_linguistic_table(std::istream& source) {
  std::string line;
  std::vector<std::string_view> cells;

  if (!detail::read_line(source, &line)) throw Error("matio: empty linguistic table input");
  detail::split_on(line, '\t', &cells);
  if (cells.empty() || cells[0] != "WORD") {
    throw Error("matio: linguistic table must start with a 'WORD' header line");
  }
  if (cells.size() < 2) throw Error("matio: linguistic table header has no property columns");

  LinguisticTable table;
  const std::size_t p = cells.size() - 1;
  table.column_names.reserve(p);
  std::unordered_map<std::string_view, std::size_t> seen_names;
  for (std::size_t j = 1; j < cells.size(); ++j) {
    if (cells[j].empty()) throw Error("matio: empty property name in header");
    if (!seen_names.emplace(cells[j], j).second) {
      throw Error("matio: duplicate column name '" + std::string(cells[j]) + "'");
    }
    table.column_names.emplace_back(cells[j]);
  }

  std::vector<double> values;  // p per word
  std::unordered_map<std::string, std::size_t> index;
  std::size_t line_no = 1;
  while (detail::read_line(source, &line)) {
    ++line_no;
    if (line.empty()) continue;
    detail::split_on(line, '\t', &cells);
    if (cells.size() != p + 1) {
      throw Error("matio: ragged row at line " + std::to_string(line_no) + " (got " +
                  std::to_string(cells.size() - 1) + " values, expected " + std::to_string(p) +
                  ")");
    }
    std::string word(cells[0]);
    if (word.empty()) throw Error("matio: empty word at line " + std::to_string(line_no));
    if (!index.emplace(word, index.size()).second) {
      throw Error("matio: duplicate word '" + word + "' at line " + std::to_string(line_no));
    }
    table.words.push_back(std::move(word));
    for (std::size_t j = 0; j < p; ++j) {
      double v;
      if (!detail::parse_double(cells[j + 1], &v)) {
        throw Error("matio: non-numeric cell '" + std::string(cells[j + 1]) + "' at line " +
                    std::to_string(line_no));
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error("matio: cell value " + std::string(cells[j + 1]) + " at line " +
                    std::to_string(line_no) + " is outside [0,1]");
      }
      values.push_back(v);
    }
  }
  if (table.words.empty()) throw Error("matio: linguistic table has no word rows");

  const Eigen::Index np = static_cast<Eigen::Index>(p);
  const Eigen::Index n = static_cast<Eigen::Index>(table.words.size());
  table.matrix.resize(np, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < np; ++r) {
      table.matrix(r, c) = values[static_cast<std::size_t>(c) * p + r];
    }
  }
  bool normalized = true;
  for (Eigen::Index c = 0; c < n && normalized; ++c) {
    normalized = std::abs(table.matrix.col(c).sum() - 1.0) <= 1e-9;
  }
  table.normalized = normalized;
  return table;
}

// Writes the TSV form read back by parse_linguistic_table. Cell values are
// rendered with 17 significant digits, so parse(write(T)) == T cell-exactly.
inline void write_linguistic_table(const LinguisticTable& table, std::ostream& sink) {
  if (table.words.empty()) throw Error("matio: refusing to write a table with empty vocabulary");
  if (table.column_names.empty()) throw Error("matio: refusing to write a table with no columns");
  if (table.matrix.rows() != static_cast<Eigen::Index>(table.column_names.size()) ||
      table.matrix.cols() != static_cast<Eigen::Index>(table.words.size())) {
    throw Error("matio: table matrix shape does not match its word/column lists");
  }

  std::string line = "WORD";
  for (const std::string& name : table.column_names) {
    line += '\t';
    line += name;
  }
  line += '\n';
  sink << line;
  for (Eigen::Index c = 0; c < table.matrix.cols(); ++c) {
    line = table.words[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < table.matrix.rows(); ++r) {
      line += '\t';
      detail::append_full_precision(table.matrix(r, c), &line);
    }
    line += '\n';
    sink << line;
  }
  if (!sink) throw Error("matio: write failed");
}

// Restricts both tables to their common vocabulary. The common words are
// ordered lexicographically by code point, independent of input file order.
// Case-fold collisions inside one table are resolved first-occurrence-wins.
inline AlignedPair intersect(const EmbeddingTable& emb, const LinguisticTable& ling,
                             CasePolicy case_policy = CasePolicy::preserve) {
  if (emb.vocab_size() == 0) throw Error("matio: embedding table is empty");
  if (ling.vocab_size() == 0) throw Error("matio: linguistic table is empty");

  auto fold = [case_policy](const std::string& w) {
    return case_policy == CasePolicy::fold_lower ? detail::fold_lower_ascii(w) : w;
  };

  std::unordered_map<std::string, Eigen::Index> emb_index;
  for (std::size_t i = 0; i < emb.words.size(); ++i) {
    emb_index.emplace(fold(emb.words[i]), static_cast<Eigen::Index>(i));
  }
  std::unordered_map<std::string, Eigen::Index> ling_index;
  for (std::size_t i = 0; i < ling.words.size(); ++i) {
    ling_index.emplace(fold(ling.words[i]), static_cast<Eigen::Index>(i));
  }

  AlignedPair pair;
  for (const auto& [word, col] : emb_index) {
    if (ling_index.contains(word)) pair.vocab.push_back(word);
  }
  std::sort(pair.vocab.begin(), pair.vocab.end());

  if (pair.vocab.size() < 2) {
    throw Error("matio: common vocabulary has " + std::to_string(pair.vocab.size()) +
                " words; need at least 2");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(pair.vocab.size());
  pair.emb.resize(emb.dim(), n);
  pair.ling.resize(ling.properties(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::string& word = pair.vocab[static_cast<std::size_t>(k)];
    pair.emb.col(k) = emb.matrix.col(emb_index.at(word));
    pair.ling.col(k) = ling.matrix.col(ling_index.at(word));
  }
  pair.ling_columns = ling.column_names;
  pair.emb_vocab_size = emb_index.size();
  pair.ling_vocab_size = ling_index.size();
  return pair;
}

}  // namespace qvecca
