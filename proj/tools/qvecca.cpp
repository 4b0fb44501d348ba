// qvecca: intrinsic evaluation of word embedding matrices against
// linguistic feature matrices, plus the surrounding tooling.
//
// Subcommands: build-ling, qvec, qvec-cca, wordsim, metaeval.
// Exit codes: 0 success, 1 internal error, 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvecca/qvecca.hpp"

namespace {

using nlohmann::ordered_json;

std::string fmt6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qvecca::Error("cli: cannot open '" + path + "'");
  return in;
}

// All subcommand output goes through one sink: stdout or --out PATH.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw qvecca::Error("cli: cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct CommonFlags {
  bool case_fold = false;
  std::string format = "tsv";
  std::string out_path;

  qvecca::CasePolicy case_policy() const {
    return case_fold ? qvecca::CasePolicy::fold_lower : qvecca::CasePolicy::preserve;
  }
  bool json() const { return format == "json"; }
};

void add_format_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--format", flags->format, "Output format")
      ->check(CLI::IsMember({"tsv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", flags->out_path, "Write output to PATH instead of stdout");
}

qvecca::AlignedPair load_pair(const std::string& emb_path, const std::string& ling_path,
                              qvecca::CasePolicy policy) {
  std::ifstream emb_in = open_input(emb_path);
  const qvecca::EmbeddingTable emb = qvecca::parse_embeddings(emb_in);
  if (emb.duplicates_dropped > 0) {
    std::cerr << "qvecca: warning: dropped " << emb.duplicates_dropped
              << " duplicate embedding rows (first occurrence wins)\n";
  }
  std::ifstream ling_in = open_input(ling_path);
  const qvecca::LinguisticTable ling = qvecca::parse_linguistic_table(ling_in);
  return qvecca::intersect(emb, ling, policy);
}

int run_build_ling(const std::string& counts_path, std::int64_t min_freq,
                   const std::string& out_path) {
  std::ifstream in = open_input(counts_path);
  const qvecca::CountStore store = qvecca::parse_counts(in);
  const qvecca::LinguisticTable table = qvecca::build_table(store, min_freq);
  OutputSink sink(out_path);
  qvecca::write_linguistic_table(table, sink.stream());
  return 0;
}

int run_qvec(const std::string& emb_path, const std::string& ling_path, const CommonFlags& flags,
             const std::string& alignment_path) {
  const qvecca::AlignedPair pair = load_pair(emb_path, ling_path, flags.case_policy());
  const qvecca::QvecResult result = qvecca::qvec_score(pair);

  if (!alignment_path.empty()) {
    std::ofstream alignment_out(alignment_path, std::ios::binary);
    if (!alignment_out) throw qvecca::Error("cli: cannot write '" + alignment_path + "'");
    qvecca::write_alignment(result, pair.ling_columns, alignment_out);
  }

  OutputSink sink(flags.out_path);
  if (flags.json()) {
    ordered_json doc;
    doc["qvec"] = result.score;
    doc["n_common"] = pair.vocab.size();
    doc["aligned_dimensions"] = result.aligned_count();
    doc["per_dimension"] = result.per_dimension;
    ordered_json alignment = ordered_json::array();
    for (std::size_t i = 0; i < result.alignment.size(); ++i) {
      if (!result.alignment[i]) continue;
      alignment.push_back({{"dimension", i},
                           {"column", pair.ling_columns[static_cast<std::size_t>(
                                result.alignment[i]->column)]},
                           {"r", result.alignment[i]->r}});
    }
    doc["alignment"] = std::move(alignment);
    sink.stream() << doc.dump(2) << '\n';
  } else {
    sink.stream() << "qvec\t" << fmt6(result.score) << '\n'
                  << "n_common\t" << pair.vocab.size() << '\n'
                  << "aligned_dimensions\t" << result.aligned_count() << '\n';
  }
  return 0;
}

int run_qvec_cca(const std::string& emb_path, const std::string& ling_path,
                 const CommonFlags& flags, double ridge, double rank_tol) {
  const qvecca::AlignedPair pair = load_pair(emb_path, ling_path, flags.case_policy());
  const qvecca::CcaResult result = qvecca::first_canonical_correlation(pair, ridge, rank_tol);

  OutputSink sink(flags.out_path);
  if (flags.json()) {
    ordered_json doc;
    doc["qvec_cca"] = result.correlation;
    doc["n_common"] = pair.vocab.size();
    doc["effective_rank_x"] = result.effective_rank_x;
    doc["effective_rank_y"] = result.effective_rank_y;
    doc["v"] = std::vector<double>(result.v.begin(), result.v.end());
    doc["w"] = std::vector<double>(result.w.begin(), result.w.end());
    sink.stream() << doc.dump(2) << '\n';
  } else {
    sink.stream() << "qvec_cca\t" << fmt6(result.correlation) << '\n'
                  << "n_common\t" << pair.vocab.size() << '\n'
                  << "effective_rank_x\t" << result.effective_rank_x << '\n'
                  << "effective_rank_y\t" << result.effective_rank_y << '\n';
  }
  return 0;
}

int run_wordsim(const std::string& emb_path, const std::vector<std::string>& dataset_paths,
                const CommonFlags& flags, const std::string& oov) {
  std::ifstream emb_in = open_input(emb_path);
  const qvecca::EmbeddingTable emb = qvecca::parse_embeddings(emb_in);
  const qvecca::OovPolicy policy =
      oov == "fail" ? qvecca::OovPolicy::fail : qvecca::OovPolicy::skip;

  OutputSink sink(flags.out_path);
  ordered_json results = ordered_json::array();
  if (!flags.json()) {
    sink.stream() << "dataset\tspearman\tcoverage\tpairs_used\tpairs_total\n";
  }
  for (const std::string& path : dataset_paths) {
    std::ifstream ds_in = open_input(path);
    const std::string name = std::filesystem::path(path).stem().string();
    const qvecca::SimilarityDataset dataset = qvecca::parse_simdataset(ds_in, name);
    const qvecca::SimilarityResult r =
        qvecca::evaluate_similarity(emb, dataset, policy, flags.case_policy());
    if (flags.json()) {
      results.push_back({{"dataset", dataset.name},
                         {"spearman", r.spearman},
                         {"coverage", r.coverage},
                         {"pairs_used", r.pairs_used},
                         {"pairs_total", r.pairs_total}});
    } else {
      sink.stream() << dataset.name << '\t' << fmt6(r.spearman) << '\t' << fmt6(r.coverage)
                    << '\t' << r.pairs_used << '\t' << r.pairs_total << '\n';
    }
  }
  if (flags.json()) sink.stream() << results.dump(2) << '\n';
  return 0;
}

int run_metaeval(const std::string& board_path, const std::vector<std::string>& intrinsic,
                 const std::vector<std::string>& extrinsic, const CommonFlags& flags) {
  std::ifstream in = open_input(board_path);
  const qvecca::ScoreBoard board = qvecca::parse_scoreboard(in);
  const qvecca::ReportGrid grid = qvecca::report_grid(board, intrinsic, extrinsic);

  for (const std::string& warning : grid.warnings) {
    std::cerr << "qvecca: warning: " << warning << '\n';
  }

  OutputSink sink(flags.out_path);
  if (flags.json()) {
    ordered_json doc;
    doc["intrinsic"] = grid.intrinsic;
    doc["extrinsic"] = grid.extrinsic;
    ordered_json rows = ordered_json::array();
    for (const auto& row : grid.cells) {
      ordered_json cells = ordered_json::array();
      for (const auto& cell : row) {
        if (cell) {
          cells.push_back({{"r", cell->r}, {"n_used", cell->n_used}});
        } else {
          cells.push_back(nullptr);
        }
      }
      rows.push_back(std::move(cells));
    }
    doc["cells"] = std::move(rows);
    doc["warnings"] = grid.warnings;
    sink.stream() << doc.dump(2) << '\n';
  } else {
    std::ostream& out = sink.stream();
    out << "METRIC";
    for (const std::string& name : grid.extrinsic) out << '\t' << name;
    out << '\n';
    for (std::size_t i = 0; i < grid.intrinsic.size(); ++i) {
      out << grid.intrinsic[i];
      for (std::size_t j = 0; j < grid.extrinsic.size(); ++j) {
        out << '\t' << (grid.cells[i][j] ? fmt6(grid.cells[i][j]->r) : "NA");
      }
      out << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intrinsic evaluation of word embeddings against linguistic matrices"};
  app.require_subcommand(1);

  // build-ling
  std::string counts_path;
  std::int64_t min_freq = 5;
  std::string build_out;
  CLI::App* build = app.add_subcommand(
      "build-ling", "Build a linguistic table from word/property annotation counts");
  build->add_option("counts", counts_path, "Count TSV: word<TAB>property<TAB>count")->required();
  build->add_option("--min-freq", min_freq, "Exclude words with fewer total annotations")
      ->capture_default_str();
  build->add_option("--out", build_out, "Write the table to PATH instead of stdout");

  // qvec
  std::string qv_emb, qv_ling, qv_alignment;
  CommonFlags qv_flags;
  CLI::App* qv = app.add_subcommand("qvec", "Constrained alignment score");
  qv->add_option("embeddings", qv_emb, "Embedding file (word v1 ... vD per line)")->required();
  qv->add_option("linguistic", qv_ling, "Linguistic table TSV")->required();
  qv->add_flag("--case-fold", qv_flags.case_fold, "Lowercase words before matching");
  qv->add_option("--alignment", qv_alignment, "Write the dimension alignment TSV to PATH");
  add_format_flags(qv, &qv_flags);

  // qvec-cca
  std::string cca_emb, cca_ling;
  CommonFlags cca_flags;
  double ridge = qvecca::kDefaultRidge;
  double rank_tol = qvecca::kDefaultRankTol;
  CLI::App* cca = app.add_subcommand("qvec-cca", "First canonical correlation score");
  cca->add_option("embeddings", cca_emb, "Embedding file (word v1 ... vD per line)")->required();
  cca->add_option("linguistic", cca_ling, "Linguistic table TSV")->required();
  cca->add_flag("--case-fold", cca_flags.case_fold, "Lowercase words before matching");
  cca->add_option("--ridge", ridge, "Ridge factor relative to each covariance block's mean diagonal")
      ->capture_default_str();
  cca->add_option("--rank-tol", rank_tol, "Relative eigenvalue cutoff for whitening")
      ->capture_default_str();
  add_format_flags(cca, &cca_flags);

  // wordsim
  std::string ws_emb, ws_oov = "skip";
  std::vector<std::string> ws_datasets;
  CommonFlags ws_flags;
  CLI::App* ws = app.add_subcommand("wordsim", "Word similarity baselines (cosine vs Spearman)");
  ws->add_option("embeddings", ws_emb, "Embedding file (word v1 ... vD per line)")->required();
  ws->add_option("datasets", ws_datasets, "Similarity dataset files (word1 word2 score)")
      ->required();
  ws->add_option("--oov", ws_oov, "Out-of-vocabulary policy")
      ->check(CLI::IsMember({"skip", "fail"}))
      ->capture_default_str();
  ws->add_flag("--case-fold", ws_flags.case_fold, "Lowercase words before matching");
  add_format_flags(ws, &ws_flags);

  // metaeval
  std::string board_path;
  std::vector<std::string> intrinsic, extrinsic;
  CommonFlags me_flags;
  CLI::App* me = app.add_subcommand(
      "metaeval", "Correlate intrinsic with extrinsic scores across models");
  me->add_option("board", board_path, "Scoreboard TSV: MODEL + metric columns, cells real or NA")
      ->required();
  me->add_option("--intrinsic", intrinsic, "Intrinsic metric names (comma separated)")
      ->required()
      ->delimiter(',');
  me->add_option("--extrinsic", extrinsic, "Extrinsic metric names (comma separated)")
      ->required()
      ->delimiter(',');
  add_format_flags(me, &me_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "qvecca: " << e.what() << '\n';
    return 2;
  }

  try {
    if (build->parsed()) return run_build_ling(counts_path, min_freq, build_out);
    if (qv->parsed()) return run_qvec(qv_emb, qv_ling, qv_flags, qv_alignment);
    if (cca->parsed()) return run_qvec_cca(cca_emb, cca_ling, cca_flags, ridge, rank_tol);
    if (ws->parsed()) return run_wordsim(ws_emb, ws_datasets, ws_flags, ws_oov);
    if (me->parsed()) return run_metaeval(board_path, intrinsic, extrinsic, me_flags);
    std::cerr << "qvecca: no subcommand\n";
    return 2;
  } catch (const qvecca::Error& e) {
    std::cerr << "qvecca: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qvecca: internal error: " << e.what() << '\n';
    return 1;
  }
}
