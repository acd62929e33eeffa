#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quasisparse/quasilinear.hpp"
#include "quasisparse/solvers.hpp"

namespace quasisparse {

// Phase-transition experiment description. Defaults reproduce the standard
// benchmark: 30x100 Gaussian sensing with a logarithmic shift, 30 trials
// per sparsity level 1..15, success declared at relative error 1e-4.
struct ExperimentSpec {
  int m = 30;
  int n = 100;
  std::vector<int> sparsity_levels = default_levels();
  int trials_per_level = 30;
  double eta = 0.003;
  double a = 1.0;
  double success_threshold = 1e-4;
  double tol = 1e-8;
  std::uint64_t master_seed = 20240901;
  std::vector<Algorithm> algorithms = {Algorithm::IFTA, Algorithm::ISTA,
                                       Algorithm::IHTA};

  // Solver knobs shared by every trial.
  double epsilon = 0.01;
  int max_iter = 5000;

  // By default the operator anchor x0 equals the planted signal, so the
  // measurements satisfy F(x_true) x_true = b exactly. Setting this samples
  // an independent Gaussian anchor instead (the model is then only
  // approximately consistent at x_true).
  bool independent_reference = false;

  // Worker threads for the sweep; 0 picks the hardware concurrency.
  int threads = 0;

  static std::vector<int> default_levels();
};

// Validates dimensions, level ranges (every r must be < m and < n), trial
// and algorithm counts. Throws std::invalid_argument on violations.
void validate(const ExperimentSpec& spec);

struct GeneratedProblem {
  LogShiftOperator op;
  DenseVector x_true;
  DenseVector b;
};

// Deterministic problem instance: i.i.d. standard Gaussian A1, an r-sparse
// Gaussian signal on a uniformly random support, b = F(x_true) x_true.
// r = 0 plants the zero signal.
GeneratedProblem generate_problem(std::uint64_t seed, const ExperimentSpec& spec,
                                  int r);

// ||x_hat - x_true|| / ||x_true||, or ||x_hat|| when x_true = 0.
double relative_error(const DenseVector& x_hat, const DenseVector& x_true);

// Stable per-trial seed derived from (master_seed, r, trial_index) with a
// splitmix64-style mixer; shared by all algorithms so they face identical
// problem instances.
std::uint64_t trial_seed(std::uint64_t master_seed, int r, int trial_index);

struct TrialRecord {
  Algorithm algorithm = Algorithm::IFTA;
  int r = 0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double relative_error = 0.0;
  bool success = false;
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  double fixed_point_residual = 0.0;
  double solution_norm = 0.0;
  bool failed = false;  // solver threw; counted as non-success, never fatal
  std::string error;
};

// Generates the instance for (seed, r), runs one algorithm, grades it.
TrialRecord run_trial(std::uint64_t seed, const ExperimentSpec& spec, int r,
                      Algorithm algorithm);

struct LevelSummary {
  Algorithm algorithm;
  int r;
  double success_rate;
  double mean_relative_error;  // over trials that produced a solution
  double mean_iterations;
  std::vector<TrialRecord> trials;
};

struct SweepReport {
  ExperimentSpec spec;
  std::vector<LevelSummary> levels;  // ordered by algorithm, then r
};

// Full phase-transition sweep. Trials run on a thread pool; aggregation is
// by precomputed index, so results are deterministic for a fixed spec
// regardless of thread count.
SweepReport run_sweep(const ExperimentSpec& spec);

}  // namespace quasisparse
