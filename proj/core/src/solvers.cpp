#include "quasisparse/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace quasisparse {

namespace {

struct ThresholdOutcome {
  DenseVector x;
  double lambda;
  LambdaRegime regime;
  double threshold;
};

using StepRule = std::function<ThresholdOutcome(const DenseVector& z, double mu)>;

void check_config(const QuasiLinearOperator& op, const DenseVector& b,
                  const SolverConfig& cfg, const DenseVector& x_init) {
  if (!(cfg.a > 0.0)) {
    throw std::invalid_argument("solver: a must be positive");
  }
  if (cfg.sparsity_prior < 1) {
    throw std::invalid_argument("solver: sparsity prior must be >= 1");
  }
  if (cfg.sparsity_prior >= op.cols()) {
    throw std::out_of_range(
        "solver: sparsity prior must be below the signal dimension");
  }
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw std::invalid_argument("solver: epsilon must lie in (0, 1)");
  }
  if (!(cfg.tol > 0.0)) {
    throw std::invalid_argument("solver: tol must be positive");
  }
  if (cfg.max_iter < 1) {
    throw std::invalid_argument("solver: max_iter must be >= 1");
  }
  if (b.size() != op.rows()) {
    throw std::invalid_argument("solver: b has wrong dimension");
  }
  if (x_init.size() != 0 && x_init.size() != op.cols()) {
    throw std::invalid_argument("solver: x_init has wrong dimension");
  }
}

// Fraction-thresholding step. Degenerate steps where z is already r-sparse
// (adaptive lambda 0) reuse the smallest positive lambda seen so far; if
// none exists yet the prox degrades to the identity for that step.
StepRule make_ifta_rule(const SolverConfig& cfg) {
  return [a = cfg.a, r = cfg.sparsity_prior,
          lambda_floor = std::numeric_limits<double>::quiet_NaN()](
             const DenseVector& z, double mu) mutable {
    AdaptiveLambda al = adaptive_lambda(a, mu, z, r);
    double lambda = al.lambda;
    LambdaRegime regime = al.regime;
    double threshold = al.threshold;
    if (lambda > 0.0) {
      if (std::isnan(lambda_floor) || lambda < lambda_floor) {
        lambda_floor = lambda;
      }
    } else if (!std::isnan(lambda_floor)) {
      lambda = lambda_floor;
      const ThresholdRegime tr = threshold_value({a, lambda * mu});
      threshold = tr.threshold;
      regime = tr.regime == Regime::SubCritical ? LambdaRegime::Lambda1
                                                : LambdaRegime::Lambda2;
    }
    DenseVector xn =
        lambda > 0.0 ? prox_vector({a, lambda * mu}, z) : DenseVector(z);
    return ThresholdOutcome{std::move(xn), lambda, regime, threshold};
  };
}

StepRule make_ista_rule(const SolverConfig& cfg) {
  return [r = cfg.sparsity_prior](const DenseVector& z, double mu) {
    const double tau = kth_largest_magnitude(z, r + 1);
    DenseVector xn = soft_threshold(z, tau);
    // The soft threshold tau matches an l1 weight of 2*tau/mu.
    return ThresholdOutcome{std::move(xn), 2.0 * tau / mu,
                            LambdaRegime::Lambda1, tau};
  };
}

StepRule make_ihta_rule(const SolverConfig& cfg) {
  return [r = cfg.sparsity_prior](const DenseVector& z, double /*mu*/) {
    DenseVector xn = keep_largest(z, r);
    const double cut = kth_largest_magnitude(z, r);
    // Hard thresholding is the no-penalty limit; record lambda 0.
    return ThresholdOutcome{std::move(xn), 0.0, LambdaRegime::Lambda2, cut};
  };
}

StepRule make_rule(const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::IFTA:
      return make_ifta_rule(cfg);
    case Algorithm::ISTA:
      return make_ista_rule(cfg);
    case Algorithm::IHTA:
      return make_ihta_rule(cfg);
  }
  throw std::invalid_argument("solver: unknown algorithm");
}

int count_nonzeros(const DenseVector& x) {
  int nnz = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      ++nnz;
    }
  }
  return nnz;
}

RecoveryResult run_loop(const QuasiLinearOperator& op, const DenseVector& b,
                        const SolverConfig& cfg, const DenseVector& x_init,
                        const IterationCallback& callback, StepRule rule) {
  check_config(op, b, cfg, x_init);

  DenseVector x =
      x_init.size() == 0 ? DenseVector(DenseVector::Zero(op.cols())) : x_init;

  RecoveryResult res;
  res.lambda_trace.reserve(
      static_cast<std::size_t>(std::min(cfg.max_iter, 4096)));

  double rel = std::numeric_limits<double>::infinity();
  double last_lambda = 0.0;
  double last_residual = (op.apply(x, x) - b).norm();
  Termination term = Termination::MaxIter;
  int iterations = 0;

  for (int k = 1; k <= cfg.max_iter; ++k) {
    const StepState st = make_step(op, x, cfg.epsilon);
    const DenseVector z = landweber_step(op, x, b, st.mu);
    ThresholdOutcome out = rule(z, st.mu);

    const double dx = (out.x - x).norm();
    const double xn = out.x.norm();
    rel = xn > 0.0 ? dx / xn : dx;
    last_residual = (op.apply(out.x, out.x) - b).norm();
    last_lambda = out.lambda;
    x = std::move(out.x);
    iterations = k;

    res.lambda_trace.push_back({out.lambda, out.regime});
    if (callback) {
      const IterationRecord rec{k,       out.lambda,      out.regime,
                                st.mu,   out.threshold,   count_nonzeros(x),
                                rel,     last_residual};
      callback(rec, x);
    }
    if (rel <= cfg.tol) {
      term = Termination::Converged;
      break;
    }
  }

  res.solution = std::move(x);
  res.iterations = iterations;
  res.termination = term;
  res.final_relative_change = rel;
  res.residual_norm = last_residual;
  res.objective = last_residual * last_residual +
                  last_lambda * penalty(cfg.a, res.solution);
  res.fixed_point_residual = fixed_point_residual(op, b, res.solution, cfg);
  return res;
}

}  // namespace

AdaptiveLambda adaptive_lambda(double a, double mu, const DenseVector& z,
                               int r) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("adaptive_lambda: a must be positive");
  }
  if (!(mu > 0.0)) {
    throw std::invalid_argument("adaptive_lambda: mu must be positive");
  }
  if (r < 1) {
    throw std::invalid_argument("adaptive_lambda: r must be >= 1");
  }
  if (r >= z.size()) {
    throw std::out_of_range("adaptive_lambda: r must be below the dimension");
  }

  std::vector<double> mags(static_cast<std::size_t>(z.size()));
  for (Index i = 0; i < z.size(); ++i) {
    mags[static_cast<std::size_t>(i)] = std::abs(z[i]);
  }
  std::nth_element(mags.begin(), mags.begin() + r, mags.end(),
                   std::greater<double>());
  const double z_r1 = mags[static_cast<std::size_t>(r)];  // (r+1)-th largest
  const double z_r =
      *std::min_element(mags.begin(), mags.begin() + r);  // r-th largest

  const double lambda1 = 2.0 * z_r1 / (a * mu);
  const double critical = 1.0 / (a * a * mu);
  if (lambda1 <= critical) {
    // Threshold of the lambda1*mu penalty: lambda1*mu*a/2 = |z|_(r+1).
    return {lambda1, LambdaRegime::Lambda1, lambda1 * mu * a / 2.0};
  }
  const double s = 2.0 * a * z_r + 1.0;
  const double lambda2 = s * s / (4.0 * a * a * mu);
  // Threshold: sqrt(lambda2*mu) - 1/(2a) = |z|_(r).
  return {lambda2, LambdaRegime::Lambda2,
          std::sqrt(lambda2 * mu) - 1.0 / (2.0 * a)};
}

RecoveryResult ifta_solve(const QuasiLinearOperator& op, const DenseVector& b,
                          const SolverConfig& cfg, const DenseVector& x_init,
                          const IterationCallback& callback) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::IFTA;
  return run_loop(op, b, c, x_init, callback, make_ifta_rule(c));
}

RecoveryResult ista_solve(const QuasiLinearOperator& op, const DenseVector& b,
                          const SolverConfig& cfg, const DenseVector& x_init,
                          const IterationCallback& callback) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::ISTA;
  return run_loop(op, b, c, x_init, callback, make_ista_rule(c));
}

RecoveryResult ihta_solve(const QuasiLinearOperator& op, const DenseVector& b,
                          const SolverConfig& cfg, const DenseVector& x_init,
                          const IterationCallback& callback) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::IHTA;
  return run_loop(op, b, c, x_init, callback, make_ihta_rule(c));
}

RecoveryResult solve(const QuasiLinearOperator& op, const DenseVector& b,
                     const SolverConfig& cfg, const DenseVector& x_init,
                     const IterationCallback& callback) {
  switch (cfg.algorithm) {
    case Algorithm::IFTA:
      return ifta_solve(op, b, cfg, x_init, callback);
    case Algorithm::ISTA:
      return ista_solve(op, b, cfg, x_init, callback);
    case Algorithm::IHTA:
      return ihta_solve(op, b, cfg, x_init, callback);
  }
  throw std::invalid_argument("solve: unknown algorithm");
}

double fixed_point_residual(const QuasiLinearOperator& op,
                            const DenseVector& b, const DenseVector& x,
                            const SolverConfig& cfg) {
  const StepState st = make_step(op, x, cfg.epsilon);
  const DenseVector z = landweber_step(op, x, b, st.mu);
  // One application of the configured thresholding map with fresh state.
  const ThresholdOutcome out = make_rule(cfg)(z, st.mu);
  return (x - out.x).norm();
}

DenseVector soft_threshold(const DenseVector& z, double tau) {
  if (!(tau >= 0.0)) {
    throw std::invalid_argument("soft_threshold: tau must be >= 0");
  }
  DenseVector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double m = std::abs(z[i]) - tau;
    out[i] = m > 0.0 ? (z[i] > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

DenseVector keep_largest(const DenseVector& z, int r) {
  if (r < 0 || r > z.size()) {
    throw std::out_of_range("keep_largest: r out of range");
  }
  std::vector<Index> idx(static_cast<std::size_t>(z.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = static_cast<Index>(i);
  }
  std::sort(idx.begin(), idx.end(), [&z](Index i, Index j) {
    const double ai = std::abs(z[i]);
    const double aj = std::abs(z[j]);
    return ai > aj || (ai == aj && i < j);
  });
  DenseVector out = DenseVector::Zero(z.size());
  for (int k = 0; k < r; ++k) {
    out[idx[static_cast<std::size_t>(k)]] = z[idx[static_cast<std::size_t>(k)]];
  }
  return out;
}

double kth_largest_magnitude(const DenseVector& z, int k) {
  if (k < 1 || k > z.size()) {
    throw std::out_of_range("kth_largest_magnitude: k out of range");
  }
  std::vector<double> mags(static_cast<std::size_t>(z.size()));
  for (Index i = 0; i < z.size(); ++i) {
    mags[static_cast<std::size_t>(i)] = std::abs(z[i]);
  }
  std::nth_element(mags.begin(), mags.begin() + (k - 1), mags.end(),
                   std::greater<double>());
  return mags[static_cast<std::size_t>(k - 1)];
}

const char* algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::IFTA:
      return "ifta";
    case Algorithm::ISTA:
      return "ista";
    case Algorithm::IHTA:
      return "ihta";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  std::string s;
  s.reserve(name.size());
  for (char ch : name) {
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (s == "ifta") return Algorithm::IFTA;
  if (s == "ista") return Algorithm::ISTA;
  if (s == "ihta") return Algorithm::IHTA;
  throw std::invalid_argument("unknown algorithm name: " + name);
}

const char* termination_name(Termination t) {
  return t == Termination::Converged ? "converged" : "max_iter";
}

const char* regime_name(LambdaRegime r) {
  return r == LambdaRegime::Lambda1 ? "lambda1" : "lambda2";
}

}  // namespace quasisparse
