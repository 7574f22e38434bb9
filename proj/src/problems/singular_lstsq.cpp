#include <algorithm>
#include <stdexcept>

#include "galet/problems.hpp"
#include "galet/rng.hpp"

namespace galet {

SingularLstsqProblem::SingularLstsqProblem(int m_rows, int d_y, int d_x, std::uint64_t seed) {
  if (m_rows <= 0 || d_x <= 0 || m_rows >= d_y)
    throw std::invalid_argument("singular-lstsq needs 0 < m_rows < d_y and d_x > 0");
  SplitMix64 rng(seed);

  Matrix G(m_rows, d_y);
  for (int i = 0; i < m_rows; ++i)
    for (int j = 0; j < d_y; ++j) G(i, j) = rng.gaussian();
  for (int i = 0; i < m_rows; ++i) {
    for (int j = 0; j < i; ++j) G.row(i) -= G.row(i).dot(G.row(j)) * G.row(j);
    G.row(i) /= G.row(i).norm();
  }
  Vector sv(m_rows);
  for (int i = 0; i < m_rows; ++i) sv(i) = 1.0 + rng.uniform();
  A = sv.asDiagonal() * G;

  Matrix C(d_y, d_x);
  for (int i = 0; i < d_y; ++i)
    for (int j = 0; j < d_x; ++j) C(i, j) = rng.gaussian();
  B = A * C;

  y_target = Vector(d_y);
  for (int i = 0; i < d_y; ++i) y_target(i) = rng.gaussian();

  singular_values = sv;
  std::sort(singular_values.data(), singular_values.data() + singular_values.size());
}

double SingularLstsqProblem::f(const Vector& x, const Vector& y) const {
  return 0.5 * (y - y_target).squaredNorm() + 0.5 * x.squaredNorm();
}

Vector SingularLstsqProblem::grad_x_f(const Vector& x, const Vector&) const { return x; }

Vector SingularLstsqProblem::grad_y_f(const Vector&, const Vector& y) const {
  return y - y_target;
}

double SingularLstsqProblem::g(const Vector& x, const Vector& y) const {
  return 0.5 * (A * y - B * x).squaredNorm();
}

Vector SingularLstsqProblem::grad_x_g(const Vector& x, const Vector& y) const {
  return -B.transpose() * (A * y - B * x);
}

Vector SingularLstsqProblem::grad_y_g(const Vector& x, const Vector& y) const {
  return A.transpose() * (A * y - B * x);
}

Vector SingularLstsqProblem::hvp_yy_g(const Vector&, const Vector&, const Vector& v) const {
  return A.transpose() * (A * v);
}

Vector SingularLstsqProblem::hvp_xy_g(const Vector&, const Vector&, const Vector& v) const {
  return -B.transpose() * (A * v);
}

std::optional<Matrix> SingularLstsqProblem::hessian_yy_dense(const Vector&, const Vector&) const {
  return A.transpose() * A;
}

ProblemConstants SingularLstsqProblem::constants() const {
  ProblemConstants c;
  const double lo = singular_values(0);
  const double hi = singular_values(singular_values.size() - 1);
  c.mu_g = lo * lo;  // smallest nonzero eigenvalue of A'A
  c.lambda_g = lo * lo;
  c.l_g1 = hi * hi;
  c.l_g2 = 0.0;
  c.l_f1 = 1.0;
  return c;
}

}  // namespace galet
