#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qvecca/matio.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string& cli_path() {
  static const std::string path = [] {
    const char* p = std::getenv("QVECCA_CLI");
    REQUIRE(p != nullptr);
    return std::string(p);
  }();
  return path;
}

std::string fixture(const std::string& name) {
  const char* dir = std::getenv("QVECCA_FIXTURES");
  REQUIRE(dir != nullptr);
  return std::string(dir) + "/" + name;
}

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qvecca_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CommandResult run(const std::string& args) {
  const fs::path out = scratch_dir() / "stdout.txt";
  const fs::path err = scratch_dir() / "stderr.txt";
  const std::string command =
      cli_path() + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out);
  result.err = read_file(err);
  return result;
}

}  // namespace

TEST_CASE("qvec-cca on the self pair prints a perfect score") {
  const CommandResult r =
      run("qvec-cca " + fixture("emb_self.txt") + " " + fixture("ling_self.tsv"));
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.starts_with("qvec_cca\t1.000000\n"));
  REQUIRE(r.out.find("effective_rank_x\t3") != std::string::npos);
  REQUIRE(r.out.find("effective_rank_y\t3") != std::string::npos);
}

TEST_CASE("qvec on the all-negative pair prints zero") {
  const CommandResult r =
      run("qvec " + fixture("emb_negative.txt") + " " + fixture("ling_negative.tsv"));
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.starts_with("qvec\t0.000000\n"));
  REQUIRE(r.out.find("aligned_dimensions\t0") != std::string::npos);
}

TEST_CASE("qvec writes the alignment report") {
  const fs::path alignment = scratch_dir() / "alignment.tsv";
  const CommandResult r = run("qvec " + fixture("emb_self.txt") + " " + fixture("ling_self.tsv") +
                              " --alignment " + alignment.string());
  REQUIRE(r.exit_code == 0);
  REQUIRE(read_file(alignment) ==
          "0\tp.one\t1.000000\n"
          "1\tp.two\t1.000000\n"
          "2\tp.three\t1.000000\n");
}

TEST_CASE("wordsim reports score and coverage per dataset") {
  const CommandResult r =
      run("wordsim " + fixture("emb_self.txt") + " " + fixture("sim_small.tsv"));
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.starts_with("dataset\tspearman\tcoverage\tpairs_used\tpairs_total\n"));
  REQUIRE(r.out.find("sim_small\t") != std::string::npos);
  REQUIRE(r.out.find("\t0.800000\t4\t5\n") != std::string::npos);

  const CommandResult strict = run("wordsim " + fixture("emb_self.txt") + " " +
                                   fixture("sim_small.tsv") + " --oov fail");
  REQUIRE(strict.exit_code == 2);
}

TEST_CASE("build-ling emits a reparseable table with the fixture cells") {
  const fs::path out = scratch_dir() / "table1.tsv";
  const CommandResult r =
      run("build-ling " + fixture("table1_counts.tsv") + " --out " + out.string());
  REQUIRE(r.exit_code == 0);

  std::ifstream in(out);
  const qvecca::LinguisticTable table = qvecca::parse_linguistic_table(in);
  REQUIRE(table.words == std::vector<std::string>{"chicken", "duck", "fish"});
  const auto col = std::find(table.column_names.begin(), table.column_names.end(), "nn.animal");
  REQUIRE(col != table.column_names.end());
  REQUIRE(table.matrix(col - table.column_names.begin(), 2) == 0.68);

  // a lower threshold keeps the sparse word
  const CommandResult loose =
      run("build-ling " + fixture("table1_counts.tsv") + " --min-freq 1 --out " + out.string());
  REQUIRE(loose.exit_code == 0);
  std::ifstream in2(out);
  const qvecca::LinguisticTable full = qvecca::parse_linguistic_table(in2);
  REQUIRE(std::find(full.words.begin(), full.words.end(), "minnow") != full.words.end());
}

TEST_CASE("metaeval renders the correlation grid") {
  const CommandResult r = run("metaeval " + fixture("scoreboard.tsv") +
                              " --intrinsic ws353,men,simlex,qvec,qvec_cca"
                              " --extrinsic 20ng,metaphor,senti");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  REQUIRE(line == "METRIC\t20ng\tmetaphor\tsenti");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  REQUIRE(rows == 5);

  // unknown metrics degrade to NA cells plus a warning, not a failure
  const CommandResult na = run("metaeval " + fixture("scoreboard.tsv") +
                               " --intrinsic nope --extrinsic senti");
  REQUIRE(na.exit_code == 0);
  REQUIRE(na.out.find("nope\tNA\n") != std::string::npos);
  REQUIRE(na.err.find("warning") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical output") {
  const std::string tsv_args =
      "qvec-cca " + fixture("emb_self.txt") + " " + fixture("ling_self.tsv");
  const CommandResult first = run(tsv_args);
  const CommandResult second = run(tsv_args);
  REQUIRE(first.exit_code == 0);
  REQUIRE(first.out == second.out);

  const std::string json_args = tsv_args + " --format json";
  const CommandResult jfirst = run(json_args);
  const CommandResult jsecond = run(json_args);
  REQUIRE(jfirst.out == jsecond.out);

  const std::string qvec_args =
      "qvec " + fixture("emb_self.txt") + " " + fixture("ling_self.tsv") + " --format json";
  REQUIRE(run(qvec_args).out == run(qvec_args).out);
}

TEST_CASE("json output carries the full result") {
  const CommandResult r = run("qvec-cca " + fixture("emb_self.txt") + " " +
                              fixture("ling_self.tsv") + " --format json");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.at("qvec_cca").get<double>() > 1.0 - 1e-9);
  REQUIRE(doc.at("n_common").get<int>() == 4);
  REQUIRE(doc.at("v").size() == 3);
  REQUIRE(doc.at("w").size() == 3);

  const CommandResult ws = run("wordsim " + fixture("emb_self.txt") + " " +
                               fixture("sim_small.tsv") + " --format json");
  const nlohmann::json wsdoc = nlohmann::json::parse(ws.out);
  REQUIRE(wsdoc.is_array());
  REQUIRE(wsdoc.at(0).at("pairs_used").get<int>() == 4);
}

TEST_CASE("input problems exit with status 2") {
  REQUIRE(run("qvec-cca does_not_exist.txt " + fixture("ling_self.tsv")).exit_code == 2);
  REQUIRE(run("qvec-cca " + fixture("emb_self.txt") + " " + fixture("ling_self.tsv") +
              " --bogus")
              .exit_code == 2);
  REQUIRE(run("").exit_code == 2);

  // a linguistic cell outside [0,1] is an input error
  const fs::path bad = scratch_dir() / "bad_ling.tsv";
  std::ofstream(bad) << "WORD\tp\na\t1.5\nb\t0.5\n";
  REQUIRE(run("qvec-cca " + fixture("emb_self.txt") + " " + bad.string()).exit_code == 2);
}

TEST_CASE("case folding is exposed on the pair commands") {
  const fs::path emb = scratch_dir() / "cased.txt";
  std::ofstream(emb) << "A 0.1 0.5\nB 0.8 0.2\nC 0.3 0.7\nD 0.6 0.1\n";
  REQUIRE(run("qvec-cca " + emb.string() + " " + fixture("ling_self.tsv")).exit_code == 2);
  const CommandResult folded =
      run("qvec-cca " + emb.string() + " " + fixture("ling_self.tsv") + " --case-fold");
  REQUIRE(folded.exit_code == 0);
  REQUIRE(folded.out.find("n_common\t4") != std::string::npos);
}
