#include "quasisparse/quasilinear.hpp"

#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

namespace quasisparse {

namespace {

constexpr std::uint64_t kPowerStartSeed = 0x9d2c5680u;

void warn_if_overdetermined(Index m, Index n) {
  if (m >= n) {
    std::clog << "quasisparse: operator has rows >= cols (" << m << " x " << n
              << "); sparse recovery expects an underdetermined system\n";
  }
}

}  // namespace

DenseVector QuasiLinearOperator::apply(const DenseVector& anchor,
                                       const DenseVector& x) const {
  check_anchor(anchor);
  if (x.size() != cols()) {
    throw std::invalid_argument("quasilinear apply: x has wrong dimension");
  }
  return matrix_at(anchor) * x;
}

DenseVector QuasiLinearOperator::apply_adjoint(const DenseVector& anchor,
                                               const DenseVector& v) const {
  check_anchor(anchor);
  if (v.size() != rows()) {
    throw std::invalid_argument("quasilinear adjoint: v has wrong dimension");
  }
  return matrix_at(anchor).transpose() * v;
}

void QuasiLinearOperator::check_anchor(const DenseVector& anchor) const {
  if (anchor.size() != cols()) {
    throw std::invalid_argument("quasilinear: anchor has wrong dimension");
  }
}

LinearOperator::LinearOperator(DenseMatrix a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.cols() == 0) {
    throw std::invalid_argument("LinearOperator: empty matrix");
  }
  warn_if_overdetermined(a_.rows(), a_.cols());
}

DenseMatrix LinearOperator::matrix_at(const DenseVector& anchor) const {
  check_anchor(anchor);
  return a_;
}

DenseVector LinearOperator::apply(const DenseVector& anchor,
                                  const DenseVector& x) const {
  check_anchor(anchor);
  if (x.size() != cols()) {
    throw std::invalid_argument("quasilinear apply: x has wrong dimension");
  }
  return a_ * x;
}

DenseVector LinearOperator::apply_adjoint(const DenseVector& anchor,
                                          const DenseVector& v) const {
  check_anchor(anchor);
  if (v.size() != rows()) {
    throw std::invalid_argument("quasilinear adjoint: v has wrong dimension");
  }
  return a_.transpose() * v;
}

LogShiftOperator::LogShiftOperator(DenseMatrix a1, DenseVector x0, double eta)
    : a1_(std::move(a1)), x0_(std::move(x0)), eta_(eta) {
  if (a1_.rows() == 0 || a1_.cols() == 0) {
    throw std::invalid_argument("LogShiftOperator: empty matrix");
  }
  if (x0_.size() != a1_.cols()) {
    throw std::invalid_argument(
        "LogShiftOperator: x0 dimension does not match cols");
  }
  if (!(eta_ >= 0.0)) {
    throw std::invalid_argument("LogShiftOperator: eta must be >= 0");
  }
  warn_if_overdetermined(a1_.rows(), a1_.cols());
}

double LogShiftOperator::shift_coefficient(const DenseVector& anchor) const {
  check_anchor(anchor);
  if (eta_ == 0.0) {
    return 0.0;  // exact reduction to the linear model
  }
  return eta_ * std::log((anchor - x0_).norm() + 1.0);
}

DenseMatrix LogShiftOperator::matrix_at(const DenseVector& anchor) const {
  const double c = shift_coefficient(anchor);
  if (c == 0.0) {
    return a1_;
  }
  return a1_.array() + c;
}

DenseVector LogShiftOperator::apply(const DenseVector& anchor,
                                    const DenseVector& x) const {
  if (x.size() != cols()) {
    throw std::invalid_argument("quasilinear apply: x has wrong dimension");
  }
  const double c = shift_coefficient(anchor);
  DenseVector out = a1_ * x;
  if (c != 0.0) {
    out.array() += c * x.sum();
  }
  return out;
}

DenseVector LogShiftOperator::apply_adjoint(const DenseVector& anchor,
                                            const DenseVector& v) const {
  if (v.size() != rows()) {
    throw std::invalid_argument("quasilinear adjoint: v has wrong dimension");
  }
  const double c = shift_coefficient(anchor);
  DenseVector out = a1_.transpose() * v;
  if (c != 0.0) {
    out.array() += c * v.sum();
  }
  return out;
}

DenseVector landweber_step(const QuasiLinearOperator& op, const DenseVector& y,
                           const DenseVector& b, double mu) {
  if (b.size() != op.rows()) {
    throw std::invalid_argument("landweber_step: b has wrong dimension");
  }
  const DenseVector residual = b - op.apply(y, y);
  return y + mu * op.apply_adjoint(y, residual);
}

SpectralEstimate spectral_norm_sq(const QuasiLinearOperator& op,
                                  const DenseVector& y, double tol,
                                  int max_iter) {
  // Materialize once; each power step is then two dense mat-vecs.
  const DenseMatrix f = op.matrix_at(y);
  const Index n = f.cols();

  std::mt19937_64 rng(kPowerStartSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = normal(rng);
  }
  const double vn = v.norm();
  if (vn == 0.0) {
    throw std::runtime_error("spectral_norm_sq: degenerate start vector");
  }
  v /= vn;

  double rayleigh = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const DenseVector w = f * v;           // v stays unit norm
    const double rq = w.squaredNorm();     // v^T F^T F v
    const DenseVector u = f.transpose() * w;
    const double un = u.norm();
    if (un == 0.0) {
      // F^T F v = 0: v is in the null space; the estimate is whatever the
      // Rayleigh quotient says (0 for a zero operator).
      return {rq, true, it};
    }
    if (it > 1 && std::abs(rq - rayleigh) <= tol * rq) {
      return {rq, true, it};
    }
    rayleigh = rq;
    v = u / un;
  }
  return {rayleigh, false, max_iter};
}

StepState make_step(const QuasiLinearOperator& op, const DenseVector& y,
                    double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("make_step: epsilon must lie in (0, 1)");
  }
  const SpectralEstimate est = spectral_norm_sq(op, y);
  if (!(est.value > 0.0)) {
    throw std::runtime_error("make_step: operator norm vanished at iterate");
  }
  return {(1.0 - epsilon) / est.value, est.value};
}

}  // namespace quasisparse
