// Command-line interface: solve single instances, run phase-transition
// sweeps, tabulate the prox, and audit the numerics against brute-force
// oracles. Exit codes: 0 success (solve: converged), 1 input/validation
// error, 2 (solve only) iteration cap reached.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quasisparse/experiments.hpp"
#include "quasisparse/fraction_penalty.hpp"
#include "quasisparse/io.hpp"
#include "quasisparse/solvers.hpp"
#include "quasisparse/validation.hpp"

namespace {

using nlohmann::json;
using namespace quasisparse;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') {
      std::cout << '\n';
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output file: " + path);
  }
  out << content;
  if (!content.empty() && content.back() != '\n') {
    out << '\n';
  }
}

// Config files are JSON objects keyed by long option names (e.g.
// {"max-iter": 200}). Values land between built-in/environment defaults and
// explicit flags: flags always win.
class ConfigBinding {
 public:
  template <typename T>
  void bind(const std::string& key, T* target) {
    setters_.emplace(key, [target](const json& v) { *target = v.get<T>(); });
  }

  void apply(const json& doc) const {
    if (!doc.is_object()) {
      throw std::invalid_argument("config file must hold a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
      auto [lo, hi] = setters_.equal_range(key);
      if (lo == hi) {
        throw std::invalid_argument("config file: unknown key '" + key + "'");
      }
      for (auto it = lo; it != hi; ++it) {
        it->second(value);
      }
    }
  }

 private:
  std::multimap<std::string, std::function<void(const json&)>> setters_;
};

std::uint64_t parse_seed_text(const std::string& text) {
  std::uint64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw std::invalid_argument("invalid seed value: '" + text + "'");
  }
  return value;
}

struct SolveArgs {
  std::string algorithm = "ifta";
  double a = 1.0;
  int r = 1;
  double eta = 0.003;
  double epsilon = 0.01;
  double tol = 1e-8;
  int max_iter = 5000;
  std::uint64_t seed = ExperimentSpec{}.master_seed;
  int m = 30;
  int n = 100;
  bool independent_reference = false;
  std::string out = "-";
  std::string trace_path;
  std::string operator_path;
  std::string signal_path;
  std::string dump_operator_path;
};

int cmd_solve(const SolveArgs& args) {
  if (args.operator_path.empty() != args.signal_path.empty()) {
    throw std::invalid_argument(
        "--operator and --signal must be given together");
  }

  std::unique_ptr<QuasiLinearOperator> op;
  DenseVector b;
  std::optional<DenseVector> x_true;
  ResultDocument doc;

  if (!args.operator_path.empty()) {
    op = operator_from_json(read_file(args.operator_path));
    SignalDocument sig = signal_from_json(read_file(args.signal_path));
    if (sig.b.size() != op->rows()) {
      throw std::invalid_argument("signal b does not match operator rows");
    }
    b = std::move(sig.b);
    x_true = std::move(sig.x_true);
  } else {
    ExperimentSpec gen;
    gen.m = args.m;
    gen.n = args.n;
    gen.eta = args.eta;
    gen.a = args.a;
    gen.independent_reference = args.independent_reference;
    GeneratedProblem p = generate_problem(args.seed, gen, args.r);
    op = std::make_unique<LogShiftOperator>(std::move(p.op));
    b = std::move(p.b);
    x_true = std::move(p.x_true);
    doc.seed = args.seed;
  }

  if (!args.dump_operator_path.empty()) {
    write_output(args.dump_operator_path, operator_to_json(*op));
  }

  SolverConfig cfg;
  cfg.a = args.a;
  cfg.sparsity_prior = std::max(1, args.r);
  cfg.epsilon = args.epsilon;
  cfg.tol = args.tol;
  cfg.max_iter = args.max_iter;
  cfg.algorithm = algorithm_from_name(args.algorithm);

  std::ofstream trace;
  IterationCallback callback;
  if (!args.trace_path.empty()) {
    trace.open(args.trace_path, std::ios::binary);
    if (!trace) {
      throw std::invalid_argument("cannot open trace file: " +
                                  args.trace_path);
    }
    callback = [&trace](const IterationRecord& rec, const DenseVector&) {
      trace << trace_line(rec) << '\n';
    };
  }

  const RecoveryResult res = solve(*op, b, cfg, DenseVector(), callback);

  doc.algorithm = cfg.algorithm;
  doc.result = res;
  doc.sparsity_prior = cfg.sparsity_prior;
  if (x_true) {
    doc.relative_error = relative_error(res.solution, *x_true);
  }
  write_output(args.out, result_to_json(doc));

  std::cerr << algorithm_name(cfg.algorithm) << ": "
            << termination_name(res.termination) << " after " << res.iterations
            << " iterations, residual " << format_double(res.residual_norm);
  if (doc.relative_error) {
    std::cerr << ", relative error " << format_double(*doc.relative_error);
  }
  std::cerr << '\n';

  return res.termination == Termination::Converged ? 0 : 2;
}

struct SweepArgs {
  ExperimentSpec spec;
  std::vector<std::string> algorithms;  // empty: keep spec default
  std::string out = "-";
  std::string format = "csv";
};

int cmd_sweep(const SweepArgs& args) {
  ExperimentSpec spec = args.spec;
  if (!args.algorithms.empty()) {
    spec.algorithms.clear();
    for (const std::string& name : args.algorithms) {
      spec.algorithms.push_back(algorithm_from_name(name));
    }
  }
  if (args.format != "csv" && args.format != "json") {
    throw std::invalid_argument("--format must be csv or json");
  }
  const SweepReport report = run_sweep(spec);
  write_output(args.out, args.format == "json" ? sweep_to_json(report)
                                               : sweep_to_csv(report));
  return 0;
}

struct ProxTableArgs {
  double a = 1.0;
  double lambda = 0.5;
  double gamma_min = -5.0;
  double gamma_max = 5.0;
  double step = 0.01;
  std::string out = "-";
  bool validate = false;
};

int cmd_prox_table(const ProxTableArgs& args) {
  if (!(args.step > 0.0)) {
    throw std::invalid_argument("prox-table: step must be positive");
  }
  if (args.gamma_max < args.gamma_min) {
    throw std::invalid_argument("prox-table: empty gamma range");
  }
  const PenaltyParams p{args.a, args.lambda};
  const double t_star = threshold_value(p).threshold;

  const long rows =
      std::lround((args.gamma_max - args.gamma_min) / args.step) + 1;
  // When the grid start is an integer multiple of the step, generate points
  // as k*step so that symmetric grids pair to exact negations.
  const double ratio = args.gamma_min / args.step;
  const bool aligned =
      std::abs(ratio - static_cast<double>(std::llround(ratio))) < 1e-9;
  const long k0 = std::llround(ratio);
  std::string csv = "gamma,prox\n";
  long violations = 0;
  for (long i = 0; i < rows; ++i) {
    const double gamma =
        aligned ? static_cast<double>(k0 + i) * args.step
                : args.gamma_min + static_cast<double>(i) * args.step;
    const double value = prox_scalar(p, gamma);
    csv += format_double(gamma);
    csv += ',';
    csv += format_double(value);
    csv += '\n';
    if (args.validate) {
      const auto oracle = reference::refined_grid_prox(args.a, args.lambda, gamma);
      const double closed_obj =
          reference::objective(args.a, args.lambda, value, gamma);
      const bool objective_ok = closed_obj <= oracle.value + 1e-9;
      const bool near_boundary = std::abs(std::abs(gamma) - t_star) <= 1e-4;
      const bool argmin_ok =
          near_boundary || std::abs(value - oracle.argmin) <= 1e-4;
      if (!objective_ok || !argmin_ok) {
        ++violations;
        if (violations <= 5) {
          std::cerr << "prox-table: mismatch at gamma=" << format_double(gamma)
                    << " closed=" << format_double(value)
                    << " oracle=" << format_double(oracle.argmin) << '\n';
        }
      }
    }
  }
  write_output(args.out, csv);
  if (violations > 0) {
    std::cerr << "prox-table: " << violations
              << " rows disagree with the grid oracle\n";
    return 1;
  }
  return 0;
}

struct ValidateArgs {
  int samples = 1000;
  std::uint64_t seed = ValidationOptions{}.seed;
  double grid_step = 1e-4;
  std::string out = "-";
  bool inject_fault = false;
};

int cmd_validate(const ValidateArgs& args) {
  ValidationOptions opts;
  opts.samples = args.samples;
  opts.seed = args.seed;
  opts.grid_step = args.grid_step;
  if (args.inject_fault) {
    // Deliberate sign corruption, for exercising the failure path.
    opts.prox_override = [](const PenaltyParams& p, double gamma) {
      return -prox_scalar(p, gamma);
    };
  }
  const ValidationReport report = run_validation(opts);
  write_output(args.out, validation_report_to_json(report));
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sparse recovery from quasi-linear measurements F(x)x = b via "
      "iterative fraction thresholding, with soft/hard-thresholding "
      "baselines and phase-transition experiments"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  SweepArgs sweep_args;
  ProxTableArgs prox_args;
  ValidateArgs validate_args;
  std::string config_path;
  ConfigBinding config;

  // Environment fallback: QUASISPARSE_SEED seeds solve and sweep unless a
  // config file or flag overrides it.
  if (const char* env_seed = std::getenv("QUASISPARSE_SEED")) {
    std::uint64_t value = 0;
    try {
      value = parse_seed_text(env_seed);
    } catch (const std::exception& e) {
      std::cerr << "QUASISPARSE_SEED: " << e.what() << '\n';
      return 1;
    }
    solve_args.seed = value;
    sweep_args.spec.master_seed = value;
  }

  CLI::App* solve = app.add_subcommand(
      "solve", "Recover one sparse signal and write the result as JSON");
  solve->add_option("--algorithm", solve_args.algorithm,
                    "Solver: ifta, ista, or ihta")
      ->capture_default_str();
  solve->add_option("--a", solve_args.a, "Penalty shape parameter a > 0")
      ->capture_default_str();
  solve->add_option("--r", solve_args.r, "Sparsity prior r")
      ->capture_default_str();
  solve->add_option("--eta", solve_args.eta,
                    "Nonlinearity strength of generated operators")
      ->capture_default_str();
  solve->add_option("--epsilon", solve_args.epsilon,
                    "Step-size safety margin in (0, 1)")
      ->capture_default_str();
  solve->add_option("--tol", solve_args.tol, "Relative-change stop tolerance")
      ->capture_default_str();
  solve->add_option("--max-iter", solve_args.max_iter, "Iteration cap")
      ->capture_default_str();
  solve->add_option("--seed", solve_args.seed,
                    "Instance seed for generated problems")
      ->capture_default_str();
  solve->add_option("--m", solve_args.m, "Measurement count for generation")
      ->capture_default_str();
  solve->add_option("--n", solve_args.n, "Signal dimension for generation")
      ->capture_default_str();
  solve->add_flag("--independent-reference",
                  solve_args.independent_reference,
                  "Sample the operator anchor independently of the signal");
  solve->add_option("--operator", solve_args.operator_path,
                    "Load the operator from a JSON document");
  solve->add_option("--signal", solve_args.signal_path,
                    "Load measurements (and optional truth) from JSON");
  solve->add_option("--dump-operator", solve_args.dump_operator_path,
                    "Write the operator used to this path");
  solve->add_option("--trace", solve_args.trace_path,
                    "Write one JSON line per iteration to this path");
  solve->add_option("--out", solve_args.out, "Result path ('-' for stdout)")
      ->capture_default_str();
  config.bind("algorithm", &solve_args.algorithm);
  config.bind("a", &solve_args.a);
  config.bind("r", &solve_args.r);
  config.bind("eta", &solve_args.eta);
  config.bind("epsilon", &solve_args.epsilon);
  config.bind("tol", &solve_args.tol);
  config.bind("max-iter", &solve_args.max_iter);
  config.bind("seed", &solve_args.seed);
  config.bind("m", &solve_args.m);
  config.bind("n", &solve_args.n);
  config.bind("independent-reference", &solve_args.independent_reference);
  config.bind("operator", &solve_args.operator_path);
  config.bind("signal", &solve_args.signal_path);
  config.bind("dump-operator", &solve_args.dump_operator_path);
  config.bind("trace", &solve_args.trace_path);
  config.bind("out", &solve_args.out);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Phase-transition experiment over sparsity levels");
  sweep->add_option("--algorithms,--algorithm", sweep_args.algorithms,
                    "Comma-separated subset of ifta,ista,ihta")
      ->delimiter(',');
  sweep->add_option("--levels", sweep_args.spec.sparsity_levels,
                    "Comma-separated sparsity levels")
      ->delimiter(',');
  sweep->add_option("--m", sweep_args.spec.m, "Measurement count")
      ->capture_default_str();
  sweep->add_option("--n", sweep_args.spec.n, "Signal dimension")
      ->capture_default_str();
  sweep->add_option("--trials", sweep_args.spec.trials_per_level,
                    "Trials per sparsity level")
      ->capture_default_str();
  sweep->add_option("--eta", sweep_args.spec.eta, "Nonlinearity strength")
      ->capture_default_str();
  sweep->add_option("--a", sweep_args.spec.a, "Penalty shape parameter")
      ->capture_default_str();
  sweep->add_option("--success-threshold", sweep_args.spec.success_threshold,
                    "Relative error counted as success")
      ->capture_default_str();
  sweep->add_option("--tol", sweep_args.spec.tol, "Solver stop tolerance")
      ->capture_default_str();
  sweep->add_option("--epsilon", sweep_args.spec.epsilon,
                    "Step-size safety margin")
      ->capture_default_str();
  sweep->add_option("--max-iter", sweep_args.spec.max_iter, "Iteration cap")
      ->capture_default_str();
  sweep->add_option("--seed", sweep_args.spec.master_seed, "Master seed")
      ->capture_default_str();
  sweep->add_option("--threads", sweep_args.spec.threads,
                    "Worker threads (0 = hardware)")
      ->capture_default_str();
  sweep->add_flag("--independent-reference",
                  sweep_args.spec.independent_reference,
                  "Sample operator anchors independently of the signals");
  sweep->add_option("--format", sweep_args.format, "Output format: csv, json")
      ->capture_default_str();
  sweep->add_option("--out", sweep_args.out, "Output path ('-' for stdout)")
      ->capture_default_str();
  config.bind("algorithms", &sweep_args.algorithms);
  config.bind("levels", &sweep_args.spec.sparsity_levels);
  config.bind("m", &sweep_args.spec.m);
  config.bind("n", &sweep_args.spec.n);
  config.bind("trials", &sweep_args.spec.trials_per_level);
  config.bind("eta", &sweep_args.spec.eta);
  config.bind("a", &sweep_args.spec.a);
  config.bind("success-threshold", &sweep_args.spec.success_threshold);
  config.bind("tol", &sweep_args.spec.tol);
  config.bind("epsilon", &sweep_args.spec.epsilon);
  config.bind("max-iter", &sweep_args.spec.max_iter);
  config.bind("seed", &sweep_args.spec.master_seed);
  config.bind("threads", &sweep_args.spec.threads);
  config.bind("independent-reference",
              &sweep_args.spec.independent_reference);
  config.bind("format", &sweep_args.format);
  config.bind("out", &sweep_args.out);

  CLI::App* prox_table = app.add_subcommand(
      "prox-table", "Tabulate the penalty prox over a gamma grid as CSV");
  prox_table->add_option("--a", prox_args.a, "Penalty shape parameter")
      ->capture_default_str();
  prox_table->add_option("--lambda", prox_args.lambda, "Penalty weight")
      ->capture_default_str();
  prox_table->add_option("--gamma-min", prox_args.gamma_min, "Grid start")
      ->capture_default_str();
  prox_table->add_option("--gamma-max", prox_args.gamma_max, "Grid end")
      ->capture_default_str();
  prox_table->add_option("--step", prox_args.step, "Grid step")
      ->capture_default_str();
  prox_table->add_flag("--validate", prox_args.validate,
                       "Cross-check each row against the grid oracle");
  prox_table->add_option("--out", prox_args.out,
                         "Output path ('-' for stdout)")
      ->capture_default_str();
  config.bind("lambda", &prox_args.lambda);
  config.bind("gamma-min", &prox_args.gamma_min);
  config.bind("gamma-max", &prox_args.gamma_max);
  config.bind("step", &prox_args.step);

  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "Audit the numerics against brute-force oracles");
  validate_cmd->add_option("--samples", validate_args.samples,
                           "Random probes for the prox oracle check")
      ->capture_default_str();
  validate_cmd->add_option("--seed", validate_args.seed, "Probe seed")
      ->capture_default_str();
  validate_cmd->add_option("--grid-step", validate_args.grid_step,
                           "Oracle grid resolution")
      ->capture_default_str();
  validate_cmd->add_flag("--inject-fault", validate_args.inject_fault,
                         "Corrupt the prox under test (forces failure)");
  validate_cmd->add_option("--out", validate_args.out,
                           "Report path ('-' for stdout)")
      ->capture_default_str();
  config.bind("samples", &validate_args.samples);
  config.bind("grid-step", &validate_args.grid_step);

  for (CLI::App* sub : {solve, sweep, prox_table, validate_cmd}) {
    sub->add_option("--config", config_path,
                    "JSON file of option defaults (keys = long flag names)");
  }

  // Config values must be in place before parsing so that explicit flags
  // override them; scan argv for --config ahead of the real parse.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    }
  }
  if (!config_path.empty()) {
    try {
      config.apply(json::parse(read_file(config_path)));
    } catch (const std::exception& e) {
      std::cerr << "config: " << e.what() << '\n';
      return 1;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(solve_args);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_args);
    }
    if (prox_table->parsed()) {
      return cmd_prox_table(prox_args);
    }
    if (validate_cmd->parsed()) {
      return cmd_validate(validate_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
