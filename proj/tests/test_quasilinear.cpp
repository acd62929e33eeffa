#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "quasisparse/quasilinear.hpp"

using namespace quasisparse;

namespace {

DenseMatrix seeded_gaussian(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      a(i, j) = normal(rng);
    }
  }
  return a;
}

DenseVector seeded_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = normal(rng);
  }
  return v;
}

}  // namespace

TEST_SUITE("quasilinear") {

TEST_CASE("linear operator ignores the anchor") {
  const DenseMatrix a = seeded_gaussian(4, 9, 11);
  const LinearOperator op(a);
  const DenseVector x = seeded_vector(9, 12);
  const DenseVector anchor1 = seeded_vector(9, 13);
  const DenseVector anchor2 = seeded_vector(9, 14);
  CHECK((op.apply(anchor1, x) - a * x).norm() == 0.0);
  CHECK((op.apply(anchor1, x) - op.apply(anchor2, x)).norm() == 0.0);
  CHECK((op.matrix_at(anchor1) - a).norm() == 0.0);
  const DenseVector v = seeded_vector(4, 15);
  CHECK((op.apply_adjoint(anchor1, v) - a.transpose() * v).norm() == 0.0);
}

TEST_CASE("log-shift coefficient and exact linear reduction") {
  const DenseMatrix a1 = seeded_gaussian(4, 9, 21);
  const DenseVector x0 = DenseVector::Zero(9);
  const LogShiftOperator op(a1, x0, 0.5);

  // ||anchor - x0|| = e - 1 makes the log term exactly 1.
  DenseVector anchor = DenseVector::Zero(9);
  anchor[0] = std::exp(1.0) - 1.0;
  CHECK(op.shift_coefficient(anchor) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(op.shift_coefficient(x0) == 0.0);

  const LogShiftOperator flat(a1, seeded_vector(9, 22), 0.0);
  CHECK(flat.shift_coefficient(anchor) == 0.0);
  CHECK((flat.matrix_at(anchor) - a1).norm() == 0.0);  // exact, not approximate
}

TEST_CASE("structured apply matches the materialized matrix") {
  const DenseMatrix a1 = seeded_gaussian(5, 11, 31);
  const DenseVector x0 = seeded_vector(11, 32);
  const LogShiftOperator op(a1, x0, 0.07);
  const DenseVector anchor = seeded_vector(11, 33);
  const DenseVector x = seeded_vector(11, 34);
  const DenseVector v = seeded_vector(5, 35);

  const DenseMatrix f = op.matrix_at(anchor);
  const double c = op.shift_coefficient(anchor);
  CHECK((f - (a1.array() + c).matrix()).norm() == 0.0);
  CHECK((op.apply(anchor, x) - f * x).norm() <= 1e-12 * f.norm() * x.norm());
  CHECK((op.apply_adjoint(anchor, v) - f.transpose() * v).norm() <=
        1e-12 * f.norm() * v.norm());

  // Adjoint identity <F x, v> = <x, F^T v>.
  const double lhs = op.apply(anchor, x).dot(v);
  const double rhs = x.dot(op.apply_adjoint(anchor, v));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("dimension mismatches throw") {
  const LogShiftOperator op(seeded_gaussian(3, 7, 41), DenseVector::Zero(7),
                            0.1);
  CHECK_THROWS_AS(op.apply(DenseVector::Zero(6), DenseVector::Zero(7)),
                  std::invalid_argument);
  CHECK_THROWS_AS(op.apply(DenseVector::Zero(7), DenseVector::Zero(6)),
                  std::invalid_argument);
  CHECK_THROWS_AS(op.apply_adjoint(DenseVector::Zero(7), DenseVector::Zero(7)),
                  std::invalid_argument);
  CHECK_THROWS_AS(op.matrix_at(DenseVector::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(
      LogShiftOperator(seeded_gaussian(3, 7, 42), DenseVector::Zero(6), 0.1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      LogShiftOperator(seeded_gaussian(3, 7, 43), DenseVector::Zero(7), -0.1),
      std::invalid_argument);
}

TEST_CASE("square or tall operators warn but construct") {
  std::ostringstream captured;
  std::streambuf* old = std::clog.rdbuf(captured.rdbuf());
  const LinearOperator square(seeded_gaussian(4, 4, 51));
  std::clog.rdbuf(old);
  CHECK(captured.str().find("rows >= cols") != std::string::npos);
  CHECK(square.rows() == 4);
}

TEST_CASE("landweber step on a hand-checked example") {
  DenseMatrix a(2, 2);
  a << 1.0, 0.0, 0.0, 2.0;
  const LinearOperator op(a);  // warns (square); harmless here
  DenseVector y(2), b(2);
  y << 1.0, 1.0;
  b << 2.0, 2.0;
  // residual = b - Ay = (1, 0); step = y + mu * A^T residual = (1.1, 1).
  const DenseVector out = landweber_step(op, y, b, 0.1);
  CHECK(out[0] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(landweber_step(op, y, DenseVector::Zero(3), 0.1),
                  std::invalid_argument);
}

TEST_CASE("landweber step with a safe step size reduces the residual") {
  const DenseMatrix a1 = seeded_gaussian(6, 14, 61);
  const LogShiftOperator op(a1, DenseVector::Zero(14), 0.01);
  const DenseVector x_star = seeded_vector(14, 62);
  const DenseVector b = op.apply(x_star, x_star);
  const DenseVector y = seeded_vector(14, 63);

  const StepState st = make_step(op, y, 0.01);
  const DenseVector y2 = landweber_step(op, y, b, st.mu);
  const double before = (op.apply(y, y) - b).norm();
  // One gradient step on the local linearization shrinks that
  // linearization's residual: || F(y) y2 - b || < || F(y) y - b ||.
  const double after_linearized = (op.apply(y, y2) - b).norm();
  CHECK(after_linearized < before);
}

TEST_CASE("spectral norm estimate matches an SVD oracle") {
  const DenseMatrix a1 = seeded_gaussian(6, 10, 71);
  const LinearOperator lin(a1);
  const DenseVector anchor = DenseVector::Zero(10);

  Eigen::JacobiSVD<DenseMatrix> svd(a1);
  const double sigma1_sq =
      svd.singularValues()[0] * svd.singularValues()[0];

  const SpectralEstimate est = spectral_norm_sq(lin, anchor);
  CHECK(est.converged);
  CHECK(est.iterations >= 1);
  CHECK(est.value == doctest::Approx(sigma1_sq).epsilon(1e-6));

  // Same check through the log-shift structure.
  const LogShiftOperator op(a1, DenseVector::Zero(10), 0.2);
  const DenseVector y = seeded_vector(10, 72);
  Eigen::JacobiSVD<DenseMatrix> svd2(op.matrix_at(y));
  const double ref = svd2.singularValues()[0] * svd2.singularValues()[0];
  CHECK(spectral_norm_sq(op, y).value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("spectral norm estimation is deterministic") {
  const DenseMatrix a1 = seeded_gaussian(6, 10, 81);
  const LogShiftOperator op(a1, DenseVector::Zero(10), 0.1);
  const DenseVector y = seeded_vector(10, 82);
  const SpectralEstimate e1 = spectral_norm_sq(op, y);
  const SpectralEstimate e2 = spectral_norm_sq(op, y);
  CHECK(e1.value == e2.value);
  CHECK(e1.iterations == e2.iterations);
}

TEST_CASE("make_step scales the step into the safe interval") {
  const DenseMatrix a1 = seeded_gaussian(6, 10, 91);
  const LinearOperator op(a1);
  const DenseVector y = DenseVector::Zero(10);
  const StepState st = make_step(op, y, 0.01);
  CHECK(st.mu > 0.0);
  CHECK(st.mu * st.spectral_norm_sq == doctest::Approx(0.99).epsilon(1e-12));
  CHECK_THROWS_AS(make_step(op, y, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_step(op, y, 1.0), std::invalid_argument);

  const LinearOperator zero(DenseMatrix::Zero(3, 5));
  CHECK_THROWS_AS(make_step(zero, DenseVector::Zero(5), 0.01),
                  std::runtime_error);
}

}  // TEST_SUITE
