// End-to-end checks of the command-line tool. Each case shells out to the
// built binary (path injected by CMake) and inspects exit codes, output text
// and artifact bytes.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr interleaved
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CSDA_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) {
    output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

// Pulls the first number off the line containing `tag`.
double number_on_line(const std::string& text, const std::string& tag) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find(tag) == std::string::npos) continue;
    const auto pos = line.find_first_of("-0123456789", tag.size());
    REQUIRE(pos != std::string::npos);
    return std::stod(line.substr(pos));
  }
  FAIL("no line containing '", tag, "' in:\n", text);
  return 0.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("csda_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

const std::string kTinyGrid =
    " --windows 48 --length 64 --psi 0 --psi 240 --p-alpha 0.5"
    " --int-power-dbw -110 --seed 5 ";

}  // namespace

TEST_CASE("linkbudget prints the published gains") {
  const RunResult gw = run("linkbudget --scenario gateway");
  CHECK(gw.exit_code == 0);
  CHECK(std::abs(number_on_line(gw.output, "Rx antenna gain") - 49.62) < 0.05);
  CHECK(std::abs(number_on_line(gw.output, "Tx antenna gain") - 33.21) < 0.05);

  const RunResult llo = run("linkbudget --scenario llo");
  CHECK(llo.exit_code == 0);
  CHECK(std::abs(number_on_line(llo.output, "Tx power") - 0.0) < 1e-9);
  CHECK(std::abs(number_on_line(llo.output, "Rx antenna gain") - 26.3) < 0.05);
}

TEST_CASE("linkbudget normalizes out-of-range phase angles with a notice") {
  const RunResult r = run("linkbudget --scenario gateway --psi 400");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("normalized to 40") != std::string::npos);
}

TEST_CASE("linkbudget rejects unknown presets, listing the known ones") {
  const RunResult r = run("linkbudget --scenario leo");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("error: invalid-parameter") != std::string::npos);
  CHECK(r.output.find("gateway") != std::string::npos);
  CHECK(r.output.find("llo") != std::string::npos);
}

TEST_CASE("linkbudget sweep emits the psi curve as CSV") {
  const fs::path dir = temp_dir("sweep");
  fs::create_directories(dir);
  const auto csv = (dir / "sweep.csv").string();
  const RunResult r =
      run("linkbudget --scenario llo --sweep 90 --csv " + csv);
  CHECK(r.exit_code == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "psi_deg,mean_snr_db");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("generate is byte-deterministic under a fixed seed") {
  const fs::path a = temp_dir("gen_a");
  const fs::path b = temp_dir("gen_b");
  CHECK(run("generate --scenario gateway --model 1" + kTinyGrid + "--out " +
            a.string())
            .exit_code == 0);
  CHECK(run("generate --scenario gateway --model 1" + kTinyGrid + "--out " +
            b.string())
            .exit_code == 0);
  CHECK(slurp(a / "values.f64le") == slurp(b / "values.f64le"));
  CHECK(slurp(a / "manifest.jsonl") == slurp(b / "manifest.jsonl"));
  CHECK(fs::exists(a / "resolved_config.json"));
  CHECK(fs::exists(a / "run.log"));

  const fs::path c = temp_dir("gen_c");
  CHECK(run("generate --scenario gateway --model 1 --seed 6 --windows 48 "
            "--length 64 --psi 0 --psi 240 --p-alpha 0.5 --int-power-dbw -110 "
            "--out " +
            c.string())
            .exit_code == 0);
  CHECK(slurp(a / "values.f64le") != slurp(c / "values.f64le"));
}

TEST_CASE("generate --interference none produces a clean-only dataset") {
  const fs::path dir = temp_dir("gen_clean");
  const RunResult r = run(
      "generate --scenario llo --interference none --windows 16 --length 32 "
      "--psi 0 --psi 240 --seed 2 --out " +
      dir.string());
  CHECK(r.exit_code == 0);
  const std::string manifest = slurp(dir / "manifest.jsonl");
  CHECK(manifest.find("\"interfered\"") == std::string::npos);
}

TEST_CASE("full pipeline: generate, train both learners, evaluate") {
  const fs::path data = temp_dir("flow_data");
  const fs::path tree_dir = temp_dir("flow_tree");
  const fs::path cnn_dir = temp_dir("flow_cnn");
  const fs::path report = temp_dir("flow_eval");

  CHECK(run("generate --scenario gateway --model 2" + kTinyGrid + "--out " +
            data.string())
            .exit_code == 0);

  CHECK(run("train --data " + data.string() + " --learner dtree --out " +
            tree_dir.string())
            .exit_code == 0);
  CHECK(fs::exists(tree_dir / "model.json"));

  const RunResult cnn = run("train --data " + data.string() +
                            " --learner cnn --epochs 3 --batch 8 --seed 1 "
                            "--out " +
                            cnn_dir.string());
  CHECK(cnn.exit_code == 0);
  CHECK(fs::exists(cnn_dir / "model.cnn"));
  CHECK(fs::exists(cnn_dir / "training_log.csv"));

  const RunResult ev = run("eval --data " + data.string() + " --model " +
                           (tree_dir / "model.json").string() + " --out " +
                           report.string());
  CHECK(ev.exit_code == 0);
  CHECK(ev.output.find("dtree accuracy") != std::string::npos);
  CHECK(fs::exists(report / "metrics.json"));
  CHECK(fs::exists(report / "confusion.csv"));
  CHECK(fs::exists(report / "breakdown.csv"));

  const RunResult ev2 = run("eval --data " + data.string() + " --model " +
                            (cnn_dir / "model.cnn").string() + " --out " +
                            report.string());
  CHECK(ev2.exit_code == 0);
  CHECK(ev2.output.find("cnn accuracy") != std::string::npos);
}

TEST_CASE("train reports a shape error on a window-length mismatch") {
  const fs::path data = temp_dir("len_data");
  CHECK(run("generate --scenario gateway --model 1" + kTinyGrid + "--out " +
            data.string())
            .exit_code == 0);
  const RunResult r = run("train --data " + data.string() +
                          " --learner dtree --length 1000 --out " +
                          temp_dir("len_out").string());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("error: shape") != std::string::npos);
  CHECK(r.output.find("1000") != std::string::npos);
  CHECK(r.output.find("64") != std::string::npos);
}

TEST_CASE("eval without a model file is an io error") {
  const fs::path data = temp_dir("eval_data");
  CHECK(run("generate --scenario llo --model 1" + kTinyGrid + "--out " +
            data.string())
            .exit_code == 0);
  const RunResult r = run("eval --data " + data.string() +
                          " --model /nonexistent/model.cnn --out " +
                          temp_dir("eval_out").string());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("error: io") != std::string::npos);
}

TEST_CASE("bad seed format is reported distinctly") {
  const RunResult r = run("generate --seed banana --out " +
                          temp_dir("seed_out").string());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("--seed") != std::string::npos);
}
