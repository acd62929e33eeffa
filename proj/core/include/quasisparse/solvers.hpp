#pragma once

#include <functional>
#include <vector>

#include "quasisparse/fraction_penalty.hpp"
#include "quasisparse/quasilinear.hpp"

namespace quasisparse {

enum class Algorithm { IFTA, ISTA, IHTA };
enum class Termination { Converged, MaxIter };

// Which adaptive-lambda branch produced the current threshold. ISTA records
// Lambda1 (its soft threshold comes from the small-lambda formula); IHTA
// records Lambda2 (hard thresholding is the large-lambda limit).
enum class LambdaRegime { Lambda1, Lambda2 };

struct SolverConfig {
  double a = 1.0;            // penalty shape parameter
  int sparsity_prior = 1;    // r: expected number of nonzeros
  double epsilon = 0.01;     // step-size safety margin
  double tol = 1e-8;         // relative-change stopping tolerance
  int max_iter = 5000;
  Algorithm algorithm = Algorithm::IFTA;
};

// Per-iteration regularization weight chosen so that the prox threshold
// brackets the r-th largest magnitude of the gradient-step output z:
//
//   lambda1 = 2 |z|_(r+1) / (a mu)          if lambda1 <= 1/(a^2 mu)
//   lambda2 = (2a |z|_(r) + 1)^2 / (4a^2 mu) otherwise
//
// With lambda1 the threshold equals |z|_(r+1) exactly; with lambda2 it
// equals |z|_(r). Either way at most r entries survive thresholding.
struct AdaptiveLambda {
  double lambda;
  LambdaRegime regime;
  double threshold;  // t* of the penalty with weight lambda*mu
};

AdaptiveLambda adaptive_lambda(double a, double mu, const DenseVector& z,
                               int r);

struct LambdaTraceEntry {
  double lambda;
  LambdaRegime regime;
};

// Snapshot of one completed solver iteration, passed to the optional
// observer together with a view of the new iterate (valid only during the
// callback).
struct IterationRecord {
  int k;                 // 1-based iteration number
  double lambda;         // regularization weight used this step
  LambdaRegime regime;
  double mu;             // step size used this step
  double threshold;      // prox/thresholding cut magnitude
  int nnz;               // nonzeros in the new iterate
  double rel_change;     // ||x_k - x_{k-1}|| / ||x_k||
  double residual_norm;  // ||F(x_k) x_k - b||
};

using IterationCallback =
    std::function<void(const IterationRecord&, const DenseVector& iterate)>;

struct RecoveryResult {
  DenseVector solution;
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  double final_relative_change = 0.0;
  double objective = 0.0;             // ||F(x)x - b||^2 + lambda_last * P_a(x)
  double residual_norm = 0.0;         // ||F(x)x - b||
  double fixed_point_residual = 0.0;  // ||x - G(B(x))|| at the solution
  std::vector<LambdaTraceEntry> lambda_trace;
};

// Iterative fraction thresholding: x_{k+1} = prox_{lambda mu P_a}(B_mu(x_k))
// with per-iteration adaptive lambda and mu = (1-eps)/||F(x_k)||^2.
RecoveryResult ifta_solve(const QuasiLinearOperator& op, const DenseVector& b,
                          const SolverConfig& cfg,
                          const DenseVector& x_init = DenseVector(),
                          const IterationCallback& callback = nullptr);

// Soft-thresholding baseline: same gradient step, threshold at the
// (r+1)-th largest magnitude of z each iteration.
RecoveryResult ista_solve(const QuasiLinearOperator& op, const DenseVector& b,
                          const SolverConfig& cfg,
                          const DenseVector& x_init = DenseVector(),
                          const IterationCallback& callback = nullptr);

// Hard-thresholding baseline: keep the r largest magnitudes of z
// (ties broken toward the lowest index), zero the rest.
RecoveryResult ihta_solve(const QuasiLinearOperator& op, const DenseVector& b,
                          const SolverConfig& cfg,
                          const DenseVector& x_init = DenseVector(),
                          const IterationCallback& callback = nullptr);

// Dispatch on cfg.algorithm.
RecoveryResult solve(const QuasiLinearOperator& op, const DenseVector& b,
                     const SolverConfig& cfg,
                     const DenseVector& x_init = DenseVector(),
                     const IterationCallback& callback = nullptr);

// ||x - G(B(x))||_2 for the fraction-thresholding map at x: one gradient
// step plus adaptive prox, no history. Near-zero at a fixed point.
double fixed_point_residual(const QuasiLinearOperator& op,
                            const DenseVector& b, const DenseVector& x,
                            const SolverConfig& cfg);

// Componentwise soft threshold sign(z)*max(|z| - tau, 0).
DenseVector soft_threshold(const DenseVector& z, double tau);

// Keep the r entries of largest magnitude (ties toward the lowest index),
// zero the rest.
DenseVector keep_largest(const DenseVector& z, int r);

// k-th largest magnitude of z, 1-based; requires 1 <= k <= size.
double kth_largest_magnitude(const DenseVector& z, int k);

const char* algorithm_name(Algorithm alg);
Algorithm algorithm_from_name(const std::string& name);
const char* termination_name(Termination t);
const char* regime_name(LambdaRegime r);

}  // namespace quasisparse
