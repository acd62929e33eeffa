#pragma once

#include "quasisparse/types.hpp"

namespace quasisparse {

// Matrix-valued map F: R^n -> R^{m x n}. Measurements follow the
// quasi-linear model A(x) = F(x) x = b, which reduces to ordinary
// compressed sensing when F is constant.
class QuasiLinearOperator {
 public:
  virtual ~QuasiLinearOperator() = default;

  virtual Index rows() const = 0;  // m
  virtual Index cols() const = 0;  // n

  // Materializes F(anchor) as a dense matrix.
  virtual DenseMatrix matrix_at(const DenseVector& anchor) const = 0;

  // F(anchor) * x. Default materializes; subclasses override with
  // structure-exploiting versions.
  virtual DenseVector apply(const DenseVector& anchor,
                            const DenseVector& x) const;

  // F(anchor)^T * v.
  virtual DenseVector apply_adjoint(const DenseVector& anchor,
                                    const DenseVector& v) const;

 protected:
  void check_anchor(const DenseVector& anchor) const;
};

// Constant map F(x) = A for all x: the ordinary linear sensing model.
class LinearOperator final : public QuasiLinearOperator {
 public:
  explicit LinearOperator(DenseMatrix a);

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  DenseMatrix matrix_at(const DenseVector& anchor) const override;
  DenseVector apply(const DenseVector& anchor,
                    const DenseVector& x) const override;
  DenseVector apply_adjoint(const DenseVector& anchor,
                            const DenseVector& v) const override;

  const DenseMatrix& a() const { return a_; }

 private:
  DenseMatrix a_;
};

// F(x) = A1 + eta * ln(||x - x0||_2 + 1) * A2 with A2 the all-ones matrix.
// A2 is never stored: (c * A2) * v = c * sum(v) * ones(m), and
// (c * A2)^T * v = c * sum(v) * ones(n).
class LogShiftOperator final : public QuasiLinearOperator {
 public:
  LogShiftOperator(DenseMatrix a1, DenseVector x0, double eta);

  Index rows() const override { return a1_.rows(); }
  Index cols() const override { return a1_.cols(); }
  DenseMatrix matrix_at(const DenseVector& anchor) const override;
  DenseVector apply(const DenseVector& anchor,
                    const DenseVector& x) const override;
  DenseVector apply_adjoint(const DenseVector& anchor,
                            const DenseVector& v) const override;

  // eta * ln(||anchor - x0|| + 1), the scalar weight on A2.
  double shift_coefficient(const DenseVector& anchor) const;

  const DenseMatrix& a1() const { return a1_; }
  const DenseVector& x0() const { return x0_; }
  double eta() const { return eta_; }

 private:
  DenseMatrix a1_;
  DenseVector x0_;
  double eta_;
};

// Gradient step on the residual: y + mu * F(y)^T (b - F(y) y).
DenseVector landweber_step(const QuasiLinearOperator& op, const DenseVector& y,
                           const DenseVector& b, double mu);

struct SpectralEstimate {
  double value = 0.0;     // estimate of ||F(y)||_2^2
  bool converged = true;  // false: iteration cap hit, value is best effort
  int iterations = 0;
};

// Power iteration on F(y)^T F(y) from a fixed seeded start vector, stopping
// when the Rayleigh quotient's relative change drops below tol.
SpectralEstimate spectral_norm_sq(const QuasiLinearOperator& op,
                                  const DenseVector& y, double tol = 1e-8,
                                  int max_iter = 500);

// Step size state for one solver iteration: mu = (1 - epsilon) / ||F(y)||_2^2.
struct StepState {
  double mu;
  double spectral_norm_sq;
};

StepState make_step(const QuasiLinearOperator& op, const DenseVector& y,
                    double epsilon);

}  // namespace quasisparse
