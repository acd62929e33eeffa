// End-to-end tests of the command-line tool: exit codes, output documents,
// option layering (flags > config file > environment), and determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quasisparse/experiments.hpp"
#include "quasisparse/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace quasisparse;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("quasisparse_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI through the shell; `prefix` can set environment variables.
RunResult run_cli(const std::string& args, const std::string& prefix = "") {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("out" + std::to_string(counter));
  const fs::path err = scratch_dir() / ("err" + std::to_string(counter));
  ++counter;
  std::string cmd = prefix;
  if (!cmd.empty()) {
    cmd += ' ';
  }
  cmd += std::string(QUASISPARSE_CLI_PATH) + " " + args + " > " +
         out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and bad invocations") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("solve --help").exit_code == 0);
  CHECK(run_cli("").exit_code == 1);              // subcommand required
  CHECK(run_cli("solve --bogus 1").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
}

TEST_CASE("solve exit codes reflect termination and input errors") {
  const std::string base = "solve --seed 7 --r 2 --m 12 --n 30 --out " +
                           (scratch_dir() / "r.json").string();
  CHECK(run_cli(base).exit_code == 0);
  CHECK(run_cli(base + " --max-iter 2").exit_code == 2);
  CHECK(run_cli(base + " --algorithm newton").exit_code == 1);
  CHECK(run_cli(base + " --epsilon 2.0").exit_code == 1);
  CHECK(run_cli("solve --r 30 --m 12 --n 30").exit_code == 1);
}

TEST_CASE("solve writes a parseable result and trace") {
  const fs::path out = scratch_dir() / "solve_out.json";
  const fs::path trace = scratch_dir() / "solve_trace.jsonl";
  const RunResult r =
      run_cli("solve --seed 7 --r 2 --m 12 --n 30 --out " + out.string() +
              " --trace " + trace.string());
  REQUIRE(r.exit_code == 0);

  const ResultDocument doc = result_from_json(slurp(out));
  CHECK(doc.algorithm == Algorithm::IFTA);
  CHECK(doc.result.termination == Termination::Converged);
  CHECK(doc.relative_error.has_value());
  CHECK(*doc.relative_error <= 1e-4);
  REQUIRE(doc.seed.has_value());
  CHECK(*doc.seed == 7);

  // One JSONL record per iteration, each carrying the documented keys.
  std::istringstream lines(slurp(trace));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json q = json::parse(line);
    ++count;
    CHECK(q.at("k").get<int>() == count);
    CHECK(q.contains("lambda"));
    CHECK(q.contains("mu"));
    CHECK(q.contains("nnz"));
    CHECK(q.contains("regime"));
    CHECK(q.contains("rel_change"));
    CHECK(q.contains("residual_norm"));
    CHECK(q.contains("t_star"));
  }
  CHECK(count == doc.result.iterations);
}

TEST_CASE("solve is deterministic for a fixed seed") {
  const std::string args = "solve --seed 99 --r 3 --m 12 --n 30 --out -";
  const RunResult r1 = run_cli(args);
  const RunResult r2 = run_cli(args);
  CHECK(r1.exit_code == 0);
  CHECK(r1.out == r2.out);
}

TEST_CASE("operator and signal files round-trip through solve") {
  const fs::path op_path = scratch_dir() / "op.json";
  const fs::path sig_path = scratch_dir() / "sig.json";
  const fs::path direct = scratch_dir() / "direct.json";
  const fs::path from_files = scratch_dir() / "from_files.json";

  REQUIRE(run_cli("solve --seed 21 --r 2 --m 12 --n 30 --dump-operator " +
                  op_path.string() + " --out " + direct.string())
              .exit_code == 0);

  // Rebuild the identical instance via the library to produce the signal
  // document, then solve again purely from files.
  ExperimentSpec gen;
  gen.m = 12;
  gen.n = 30;
  const GeneratedProblem p = generate_problem(21, gen, 2);
  SignalDocument sig;
  sig.b = p.b;
  sig.x_true = p.x_true;
  write_file(sig_path, signal_to_json(sig));

  const RunResult r = run_cli("solve --operator " + op_path.string() +
                              " --signal " + sig_path.string() + " --r 2 " +
                              "--out " + from_files.string());
  REQUIRE(r.exit_code == 0);

  const ResultDocument d1 = result_from_json(slurp(direct));
  const ResultDocument d2 = result_from_json(slurp(from_files));
  CHECK((d1.result.solution - d2.result.solution).norm() == 0.0);
  CHECK(d1.result.iterations == d2.result.iterations);
  REQUIRE(d2.relative_error.has_value());
  CHECK(*d2.relative_error == *d1.relative_error);

  // --operator without --signal is an input error.
  CHECK(run_cli("solve --operator " + op_path.string()).exit_code == 1);
}

TEST_CASE("config file supplies defaults and flags override it") {
  const fs::path cfg = scratch_dir() / "cfg.json";
  write_file(cfg, "{\"r\": 2, \"m\": 12, \"n\": 30, \"seed\": 7, "
                  "\"max-iter\": 2}");
  // Config's max-iter=2 forces the iteration cap exit.
  CHECK(run_cli("solve --config " + cfg.string()).exit_code == 2);
  // An explicit flag beats the config value.
  CHECK(run_cli("solve --config " + cfg.string() + " --max-iter 5000")
            .exit_code == 0);
  // Unknown keys are rejected.
  const fs::path bad = scratch_dir() / "bad.json";
  write_file(bad, "{\"iterations\": 3}");
  CHECK(run_cli("solve --config " + bad.string()).exit_code == 1);
  write_file(bad, "[1,2]");
  CHECK(run_cli("solve --config " + bad.string()).exit_code == 1);
}

TEST_CASE("environment seed applies last, below config and flags") {
  const std::string base = "solve --r 2 --m 12 --n 30 --out -";
  const RunResult explicit_seed = run_cli(base + " --seed 123");
  const RunResult env_seed = run_cli(base, "QUASISPARSE_SEED=123");
  CHECK(env_seed.exit_code == explicit_seed.exit_code);
  CHECK(env_seed.out == explicit_seed.out);

  // Flag wins over environment.
  const RunResult both = run_cli(base + " --seed 123", "QUASISPARSE_SEED=999");
  CHECK(both.out == explicit_seed.out);

  // Config wins over environment.
  const fs::path cfg = scratch_dir() / "seed_cfg.json";
  write_file(cfg, "{\"seed\": 123}");
  const RunResult via_cfg =
      run_cli(base + " --config " + cfg.string(), "QUASISPARSE_SEED=999");
  CHECK(via_cfg.out == explicit_seed.out);

  CHECK(run_cli(base, "QUASISPARSE_SEED=not_a_number").exit_code == 1);
}

TEST_CASE("sweep emits deterministic CSV and honors filters") {
  const fs::path out1 = scratch_dir() / "sweep1.csv";
  const fs::path out2 = scratch_dir() / "sweep2.csv";
  const std::string args =
      "sweep --m 12 --n 30 --levels 1,2 --trials 2 --seed 5 --out ";
  REQUIRE(run_cli(args + out1.string()).exit_code == 0);
  REQUIRE(run_cli(args + out2.string()).exit_code == 0);
  const std::string csv = slurp(out1);
  CHECK(csv == slurp(out2));
  CHECK(csv.rfind("algorithm,r,success_rate,", 0) == 0);

  const RunResult one_alg = run_cli(
      "sweep --m 12 --n 30 --levels 1 --trials 2 --seed 5 "
      "--algorithms ihta --out -");
  CHECK(one_alg.exit_code == 0);
  CHECK(one_alg.out.find("ihta,1,") != std::string::npos);
  CHECK(one_alg.out.find("ifta") == std::string::npos);

  const RunResult as_json = run_cli(
      "sweep --m 12 --n 30 --levels 1 --trials 2 --seed 5 "
      "--format json --out -");
  CHECK(as_json.exit_code == 0);
  const json doc = json::parse(as_json.out);
  CHECK(doc.at("spec").at("master_seed").get<int>() == 5);
  CHECK(doc.at("levels").size() == 3);

  CHECK(run_cli("sweep --m 12 --n 30 --levels 50 --trials 2").exit_code == 1);
  CHECK(run_cli("sweep --format yaml").exit_code == 1);
}

TEST_CASE("prox-table emits the documented grid") {
  const RunResult r =
      run_cli("prox-table --a 1 --lambda 0.25 --gamma-min -1 --gamma-max 1 "
              "--step 0.01 --out -");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "gamma,prox");
  int rows = 0;
  bool saw_zero_row = false;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.rfind("0,", 0) == 0) {
      saw_zero_row = true;
      CHECK(line == "0,0");
    }
  }
  CHECK(rows == 201);
  CHECK(saw_zero_row);

  CHECK(run_cli("prox-table --gamma-min 2 --gamma-max 1").exit_code == 1);
  CHECK(run_cli("prox-table --step 0").exit_code == 1);
  CHECK(run_cli("prox-table --a 0.5 --lambda 0").exit_code == 1);
}

TEST_CASE("prox-table validation cross-checks against the oracle") {
  const RunResult ok =
      run_cli("prox-table --a 3 --lambda 0.5 --gamma-min -2 --gamma-max 2 "
              "--step 0.05 --validate --out -");
  CHECK(ok.exit_code == 0);
  CHECK(ok.err.find("mismatch") == std::string::npos);
}

TEST_CASE("validate passes clean and fails under an injected fault") {
  const RunResult ok = run_cli("validate --samples 60 --out -");
  CHECK(ok.exit_code == 0);
  const json report = json::parse(ok.out);
  CHECK(report.at("passed").get<bool>());
  CHECK(report.at("checks").size() == 5);

  const RunResult bad = run_cli("validate --samples 60 --inject-fault --out -");
  CHECK(bad.exit_code == 1);
  const json bad_report = json::parse(bad.out);
  CHECK(!bad_report.at("passed").get<bool>());
}

}  // TEST_SUITE
