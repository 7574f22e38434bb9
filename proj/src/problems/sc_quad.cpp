#include <algorithm>
#include <stdexcept>
#include <utility>

#include "galet/problems.hpp"
#include "galet/rng.hpp"

namespace galet {

StronglyConvexQuadProblem::StronglyConvexQuadProblem(Matrix Q_, Matrix P_, Vector r_, Matrix F_yy_,
                                                     Vector b_y_, Matrix F_xx_, Vector b_x_)
    : Q(std::move(Q_)),
      P(std::move(P_)),
      r(std::move(r_)),
      F_yy(std::move(F_yy_)),
      F_xx(std::move(F_xx_)),
      b_y(std::move(b_y_)),
      b_x(std::move(b_x_)) {
  if (Q.rows() != Q.cols() || P.rows() != Q.rows() || r.size() != Q.rows())
    throw std::invalid_argument("sc-quad: inconsistent dimensions");
}

StronglyConvexQuadProblem StronglyConvexQuadProblem::random(int d_y, int d_x,
                                                            std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix G(d_y, d_y);
  for (int i = 0; i < d_y; ++i)
    for (int j = 0; j < d_y; ++j) G(i, j) = rng.gaussian();
  for (int i = 0; i < d_y; ++i) {
    for (int j = 0; j < i; ++j) G.row(i) -= G.row(i).dot(G.row(j)) * G.row(j);
    G.row(i) /= G.row(i).norm();
  }
  Vector ev(d_y);
  for (int i = 0; i < d_y; ++i) ev(i) = 1.0 + rng.uniform();
  Matrix Q = G.transpose() * (ev.asDiagonal() * G);

  Matrix P(d_y, d_x);
  for (int i = 0; i < d_y; ++i)
    for (int j = 0; j < d_x; ++j) P(i, j) = 0.5 * rng.gaussian();
  Vector r(d_y);
  for (int i = 0; i < d_y; ++i) r(i) = rng.gaussian();
  Vector y_t(d_y);
  for (int i = 0; i < d_y; ++i) y_t(i) = rng.gaussian();

  StronglyConvexQuadProblem p(std::move(Q), std::move(P), std::move(r),
                              Matrix::Identity(d_y, d_y), -y_t, Matrix::Identity(d_x, d_x),
                              Vector::Zero(d_x));
  p.mu_q = *std::min_element(ev.data(), ev.data() + d_y);
  p.l_q = *std::max_element(ev.data(), ev.data() + d_y);
  return p;
}

double StronglyConvexQuadProblem::f(const Vector& x, const Vector& y) const {
  return 0.5 * y.dot(F_yy * y) + b_y.dot(y) + 0.5 * x.dot(F_xx * x) + b_x.dot(x);
}

Vector StronglyConvexQuadProblem::grad_x_f(const Vector& x, const Vector&) const {
  return F_xx * x + b_x;
}

Vector StronglyConvexQuadProblem::grad_y_f(const Vector&, const Vector& y) const {
  return F_yy * y + b_y;
}

double StronglyConvexQuadProblem::g(const Vector& x, const Vector& y) const {
  return 0.5 * y.dot(Q * y) + x.dot(P.transpose() * y) + r.dot(y);
}

Vector StronglyConvexQuadProblem::grad_x_g(const Vector&, const Vector& y) const {
  return P.transpose() * y;
}

Vector StronglyConvexQuadProblem::grad_y_g(const Vector& x, const Vector& y) const {
  return Q * y + P * x + r;
}

Vector StronglyConvexQuadProblem::hvp_yy_g(const Vector&, const Vector&, const Vector& v) const {
  return Q * v;
}

Vector StronglyConvexQuadProblem::hvp_xy_g(const Vector&, const Vector&, const Vector& v) const {
  return P.transpose() * v;
}

std::optional<double> StronglyConvexQuadProblem::g_star(const Vector& x) const {
  return g(x, ll_solution(x));
}

std::optional<Matrix> StronglyConvexQuadProblem::hessian_yy_dense(const Vector&,
                                                                  const Vector&) const {
  return Q;
}

ProblemConstants StronglyConvexQuadProblem::constants() const {
  ProblemConstants c;
  if (mu_q) {
    c.mu_g = *mu_q;
    c.lambda_g = *mu_q;
  }
  if (l_q) c.l_g1 = *l_q;
  c.l_g2 = 0.0;
  return c;
}

Vector StronglyConvexQuadProblem::ll_solution(const Vector& x) const {
  return Q.ldlt().solve(-(P * x + r));
}

Vector scq_hypergradient(const StronglyConvexQuadProblem& p, const Vector& x) {
  Eigen::FullPivLU<Matrix> lu(p.Q);
  if (!lu.isInvertible()) throw std::invalid_argument("scq_hypergradient: Q is singular");
  const Vector s = lu.solve(-(p.P * x + p.r));
  return p.grad_x_f(x, s) - p.P.transpose() * lu.solve(p.grad_y_f(x, s));
}

}  // namespace galet
