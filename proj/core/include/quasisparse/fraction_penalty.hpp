#pragma once

#include "quasisparse/types.hpp"

namespace quasisparse {

// Parameters of the weighted fraction penalty lambda * P_a(x),
// P_a(x) = sum_i a|x_i| / (a|x_i| + 1).
//
// Inside the solvers `lambda` holds the product of the regularization weight
// and the step size, since the proximal step is always taken on
// lambda*mu*P_a.
struct PenaltyParams {
  double a;
  double lambda;
};

// The scalar prox has two parameter regimes with distinct threshold
// formulas; they meet continuously at lambda = 1/a^2.
enum class Regime {
  SubCritical,   // lambda <= 1/a^2, threshold = lambda*a/2
  SuperCritical  // lambda >  1/a^2, threshold = sqrt(lambda) - 1/(2a)
};

struct ThresholdRegime {
  Regime regime;
  double threshold;
};

// a|t| / (a|t| + 1); increasing in |t|, 0 at 0, -> 1 as |t| -> inf.
double rho(double a, double t);

// P_a(x) = sum_i rho(a, x_i).
double penalty(double a, const DenseVector& x);

// Threshold t* below which the scalar prox snaps to zero, with its regime.
ThresholdRegime threshold_value(const PenaltyParams& p);

// Value of the half-quadratic scalar objective (beta-gamma)^2 + lambda*rho_a(beta).
double scalar_objective(const PenaltyParams& p, double beta, double gamma);

// Closed-form stationary point of the scalar objective on the sign(gamma)
// branch, via the trigonometric root of the depressed cubic in u = 1+a|beta|:
//
//   u = (c/3) * (1 + 2*cos(phi/3 - pi/3)),  c = 1 + a|gamma|,
//   phi = arccos(27*lambda*a^2 / (4*c^3) - 1),
//   g = sign(gamma) * (u - 1) / a.
//
// Defined for |gamma| >= t*; the arccos argument then lies in [-1, 1].
// Arguments beyond 1 by more than a tiny slack (|gamma| well below the
// representable domain) raise std::domain_error; arguments within the slack
// are clamped so the boundary case |gamma| = t* at lambda = 1/a^2 collapses
// cleanly to g = 0.
double g_function(const PenaltyParams& p, double gamma);

// Proximal operator of lambda*rho_a: returns g_function(gamma) when
// |gamma| > t*, else exactly 0 (ties resolve to 0). Total over the reals
// for valid params.
double prox_scalar(const PenaltyParams& p, double gamma);

// Componentwise prox_scalar.
DenseVector prox_vector(const PenaltyParams& p, const DenseVector& x);

}  // namespace quasisparse
