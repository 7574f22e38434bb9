#include <cmath>

#include "galet/problems.hpp"

namespace galet {

namespace {
// residual of the inner objective; g = r^2 / 2
double resid(double x, const Vector& y) { return x + y(0) - std::sin(y(1)); }
}  // namespace

double Example1Problem::f(const Vector& x, const Vector& y) const {
  return x(0) * x(0) + y(0) - std::sin(y(1));
}

Vector Example1Problem::grad_x_f(const Vector& x, const Vector&) const {
  Vector out(1);
  out(0) = 2.0 * x(0);
  return out;
}

Vector Example1Problem::grad_y_f(const Vector&, const Vector& y) const {
  Vector out(2);
  out(0) = 1.0;
  out(1) = -std::cos(y(1));
  return out;
}

double Example1Problem::g(const Vector& x, const Vector& y) const {
  const double r = resid(x(0), y);
  return 0.5 * r * r;
}

Vector Example1Problem::grad_x_g(const Vector& x, const Vector& y) const {
  Vector out(1);
  out(0) = resid(x(0), y);
  return out;
}

Vector Example1Problem::grad_y_g(const Vector& x, const Vector& y) const {
  const double r = resid(x(0), y);
  Vector out(2);
  out(0) = r;
  out(1) = -std::cos(y(1)) * r;
  return out;
}

Vector Example1Problem::hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const {
  const double c = std::cos(y(1));
  const double s = std::sin(y(1));
  const double r = resid(x(0), y);
  Vector out(2);
  out(0) = v(0) - c * v(1);
  out(1) = -c * v(0) + (c * c + s * r) * v(1);
  return out;
}

Vector Example1Problem::hvp_xy_g(const Vector&, const Vector& y, const Vector& v) const {
  Vector out(1);
  out(0) = v(0) - std::cos(y(1)) * v(1);
  return out;
}

std::optional<Matrix> Example1Problem::hessian_yy_dense(const Vector& x, const Vector& y) const {
  const double c = std::cos(y(1));
  const double s = std::sin(y(1));
  const double r = resid(x(0), y);
  Matrix H(2, 2);
  H << 1.0, -c, -c, c * c + s * r;
  return H;
}

std::optional<double> Example1Problem::optimality_gap(const Vector& x, const Vector& y) const {
  return example1_optimality_gap(x(0), y);
}

ProblemConstants Example1Problem::constants() const {
  ProblemConstants c;
  c.mu_g = 1.0;  // PL constant; higher-order constants are residual-dependent
  return c;
}

Example1Derivatives example1_derivatives(double x, const Vector& y) {
  const double c = std::cos(y(1));
  const double s = std::sin(y(1));
  const double r = x + y(0) - std::sin(y(1));
  Example1Derivatives d;
  d.grad_y_g = Vector(2);
  d.grad_y_g << r, -c * r;
  d.hess_yy = Matrix(2, 2);
  d.hess_yy << 1.0, -c, -c, c * c + s * r;
  d.hess_yx = Vector(2);
  d.hess_yx << 1.0, -c;
  d.grad_x_f = Vector(1);
  d.grad_x_f << 2.0 * x;
  d.grad_y_f = Vector(2);
  d.grad_y_f << 1.0, -c;
  return d;
}

double example1_optimality_gap(double x, const Vector& y) {
  const double a = x - 0.5;
  const double b = 0.5 + y(0) - std::sin(y(1));
  return a * a + b * b;
}

}  // namespace galet
