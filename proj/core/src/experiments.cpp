#include "quasisparse/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace quasisparse {

namespace {

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<int> ExperimentSpec::default_levels() {
  std::vector<int> levels(15);
  std::iota(levels.begin(), levels.end(), 1);
  return levels;
}

void validate(const ExperimentSpec& spec) {
  if (spec.m < 1 || spec.n < 2) {
    throw std::invalid_argument("experiment: need m >= 1 and n >= 2");
  }
  if (spec.sparsity_levels.empty()) {
    throw std::invalid_argument("experiment: no sparsity levels");
  }
  for (int r : spec.sparsity_levels) {
    if (r < 0 || r >= spec.m || r >= spec.n) {
      throw std::invalid_argument(
          "experiment: sparsity levels must satisfy 0 <= r < m and r < n");
    }
  }
  if (spec.trials_per_level < 1) {
    throw std::invalid_argument("experiment: trials_per_level must be >= 1");
  }
  if (spec.algorithms.empty()) {
    throw std::invalid_argument("experiment: no algorithms");
  }
  if (!(spec.eta >= 0.0)) {
    throw std::invalid_argument("experiment: eta must be >= 0");
  }
  if (!(spec.a > 0.0)) {
    throw std::invalid_argument("experiment: a must be positive");
  }
  if (!(spec.success_threshold > 0.0)) {
    throw std::invalid_argument("experiment: success_threshold must be > 0");
  }
  if (!(spec.tol > 0.0)) {
    throw std::invalid_argument("experiment: tol must be positive");
  }
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    throw std::invalid_argument("experiment: epsilon must lie in (0, 1)");
  }
  if (spec.max_iter < 1) {
    throw std::invalid_argument("experiment: max_iter must be >= 1");
  }
  if (spec.threads < 0) {
    throw std::invalid_argument("experiment: threads must be >= 0");
  }
}

std::uint64_t trial_seed(std::uint64_t master_seed, int r, int trial_index) {
  std::uint64_t s = mix64(master_seed);
  s = mix64(s ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(r)));
  s = mix64(s ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(trial_index)));
  return s;
}

GeneratedProblem generate_problem(std::uint64_t seed, const ExperimentSpec& spec,
                                  int r) {
  if (r < 0 || r >= spec.n) {
    throw std::invalid_argument("generate_problem: r out of range");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Draw order is part of the reproducibility contract: A1 row by row,
  // then the support, then the nonzero values, then (only when requested)
  // the independent anchor.
  DenseMatrix a1(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      a1(i, j) = normal(rng);
    }
  }

  DenseVector x_true = DenseVector::Zero(spec.n);
  if (r > 0) {
    std::vector<int> idx(static_cast<std::size_t>(spec.n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < r; ++i) {
      std::uniform_int_distribution<int> pick(i, spec.n - 1);
      std::swap(idx[static_cast<std::size_t>(i)],
                idx[static_cast<std::size_t>(pick(rng))]);
    }
    for (int i = 0; i < r; ++i) {
      x_true[idx[static_cast<std::size_t>(i)]] = normal(rng);
    }
  }

  DenseVector anchor;
  if (spec.independent_reference) {
    anchor.resize(spec.n);
    for (int j = 0; j < spec.n; ++j) {
      anchor[j] = normal(rng);
    }
  } else {
    anchor = x_true;
  }

  LogShiftOperator op(std::move(a1), std::move(anchor), spec.eta);
  DenseVector b = op.apply(x_true, x_true);
  return {std::move(op), std::move(x_true), std::move(b)};
}

double relative_error(const DenseVector& x_hat, const DenseVector& x_true) {
  const double tn = x_true.norm();
  if (tn == 0.0) {
    return x_hat.norm();
  }
  return (x_hat - x_true).norm() / tn;
}

TrialRecord run_trial(std::uint64_t seed, const ExperimentSpec& spec, int r,
                      Algorithm algorithm) {
  TrialRecord rec;
  rec.algorithm = algorithm;
  rec.r = r;
  rec.seed = seed;

  const GeneratedProblem problem = generate_problem(seed, spec, r);

  SolverConfig cfg;
  cfg.a = spec.a;
  cfg.sparsity_prior = std::max(1, r);  // solvers need r >= 1 even for r = 0
  cfg.epsilon = spec.epsilon;
  cfg.tol = spec.tol;
  cfg.max_iter = spec.max_iter;
  cfg.algorithm = algorithm;

  try {
    const RecoveryResult res = solve(problem.op, problem.b, cfg);
    rec.relative_error = relative_error(res.solution, problem.x_true);
    rec.success = rec.relative_error <= spec.success_threshold;
    rec.iterations = res.iterations;
    rec.termination = res.termination;
    rec.fixed_point_residual = res.fixed_point_residual;
    rec.solution_norm = res.solution.norm();
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
    rec.relative_error = std::numeric_limits<double>::quiet_NaN();
    rec.success = false;
  }
  return rec;
}

SweepReport run_sweep(const ExperimentSpec& spec) {
  validate(spec);

  const std::size_t n_levels = spec.sparsity_levels.size();
  const std::size_t n_algs = spec.algorithms.size();
  const std::size_t trials = static_cast<std::size_t>(spec.trials_per_level);

  SweepReport report;
  report.spec = spec;
  report.levels.resize(n_algs * n_levels);
  for (std::size_t ai = 0; ai < n_algs; ++ai) {
    for (std::size_t li = 0; li < n_levels; ++li) {
      LevelSummary& s = report.levels[ai * n_levels + li];
      s.algorithm = spec.algorithms[ai];
      s.r = spec.sparsity_levels[li];
      s.trials.resize(trials);
    }
  }

  struct Task {
    std::size_t summary;
    int r;
    int trial;
    Algorithm alg;
  };
  std::vector<Task> tasks;
  tasks.reserve(n_algs * n_levels * trials);
  for (std::size_t ai = 0; ai < n_algs; ++ai) {
    for (std::size_t li = 0; li < n_levels; ++li) {
      for (std::size_t t = 0; t < trials; ++t) {
        tasks.push_back({ai * n_levels + li, spec.sparsity_levels[li],
                         static_cast<int>(t), spec.algorithms[ai]});
      }
    }
  }

  // Each task writes only its own preassigned slot, so scheduling order
  // cannot affect the report.
  auto run_task = [&](const Task& t) {
    TrialRecord rec =
        run_trial(trial_seed(spec.master_seed, t.r, t.trial), spec, t.r, t.alg);
    rec.trial_index = t.trial;
    report.levels[t.summary].trials[static_cast<std::size_t>(t.trial)] =
        std::move(rec);
  };

  unsigned n_threads = spec.threads > 0
                           ? static_cast<unsigned>(spec.threads)
                           : std::thread::hardware_concurrency();
  if (n_threads < 1) {
    n_threads = 1;
  }
  n_threads = std::min<unsigned>(n_threads,
                                 static_cast<unsigned>(tasks.size()));

  if (n_threads <= 1) {
    for (const Task& t : tasks) {
      run_task(t);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < tasks.size();
           i = next.fetch_add(1)) {
        run_task(tasks[i]);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) {
      pool.emplace_back(worker);
    }
    for (std::thread& th : pool) {
      th.join();
    }
  }

  for (LevelSummary& s : report.levels) {
    std::size_t successes = 0;
    std::size_t solved = 0;
    double err_sum = 0.0;
    double iter_sum = 0.0;
    for (const TrialRecord& rec : s.trials) {
      if (rec.success) {
        ++successes;
      }
      if (!rec.failed) {
        ++solved;
        err_sum += rec.relative_error;
        iter_sum += rec.iterations;
      }
    }
    s.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
    if (solved > 0) {
      s.mean_relative_error = err_sum / static_cast<double>(solved);
      s.mean_iterations = iter_sum / static_cast<double>(solved);
    } else {
      s.mean_relative_error = std::numeric_limits<double>::quiet_NaN();
      s.mean_iterations = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

}  // namespace quasisparse
