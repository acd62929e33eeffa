#include "quasisparse/fraction_penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace quasisparse {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Slack for clamping the arccos argument at the domain boundary; beyond it
// the caller asked for a point strictly below the threshold.
constexpr double kDomainSlack = 1e-9;

void check_params(const PenaltyParams& p) {
  if (!(p.a > 0.0)) {
    throw std::invalid_argument("fraction penalty: a must be positive");
  }
  if (!(p.lambda > 0.0)) {
    throw std::invalid_argument("fraction penalty: lambda must be positive");
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double rho(double a, double t) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("fraction penalty: a must be positive");
  }
  const double at = a * std::abs(t);
  return at / (at + 1.0);
}

double penalty(double a, const DenseVector& x) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    s += rho(a, x[i]);
  }
  return s;
}

ThresholdRegime threshold_value(const PenaltyParams& p) {
  check_params(p);
  const double critical = 1.0 / (p.a * p.a);
  if (p.lambda <= critical) {
    return {Regime::SubCritical, p.lambda * p.a / 2.0};
  }
  return {Regime::SuperCritical, std::sqrt(p.lambda) - 1.0 / (2.0 * p.a)};
}

double scalar_objective(const PenaltyParams& p, double beta, double gamma) {
  const double d = beta - gamma;
  return d * d + p.lambda * rho(p.a, beta);
}

double g_function(const PenaltyParams& p, double gamma) {
  check_params(p);
  const double a = p.a;
  const double c = 1.0 + a * std::abs(gamma);
  double arg = 27.0 * p.lambda * a * a / (4.0 * c * c * c) - 1.0;
  if (arg > 1.0) {
    if (arg > 1.0 + kDomainSlack) {
      throw std::domain_error(
          "g_function: gamma below the prox threshold, no real root");
    }
    arg = 1.0;
  } else if (arg < -1.0) {
    // Unreachable for valid params (27*lambda*a^2 / (4c^3) >= 0), kept for
    // floating-point safety.
    arg = -1.0;
  }
  const double phi = std::acos(arg);
  const double u = (c / 3.0) * (1.0 + 2.0 * std::cos(phi / 3.0 - kPi / 3.0));
  return sign(gamma) * (u - 1.0) / a;
}

double prox_scalar(const PenaltyParams& p, double gamma) {
  const double t = threshold_value(p).threshold;
  if (std::abs(gamma) > t) {
    return g_function(p, gamma);
  }
  return 0.0;
}

DenseVector prox_vector(const PenaltyParams& p, const DenseVector& x) {
  const double t = threshold_value(p).threshold;
  DenseVector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    out[i] = std::abs(x[i]) > t ? g_function(p, x[i]) : 0.0;
  }
  return out;
}

}  // namespace quasisparse
