#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "galet/linalg.hpp"

namespace galet {

// Lipschitz / PL constants a problem can declare. Unset means unknown;
// diagnostics that need an unknown constant are skipped, never guessed.
struct ProblemConstants {
  std::optional<double> mu_g;      // PL constant of g(x, .)
  std::optional<double> lambda_g;  // lower bound on nonzero singular values of the yy-Hessian
  std::optional<double> l_f0;
  std::optional<double> l_f1;
  std::optional<double> l_g1;
  std::optional<double> l_g2;
};

// Abstract bilevel problem: upper-level f(x, y), lower-level g(x, y).
// Solvers and metrics consume problems only through this interface.
// Implementations must be stateless after construction (safe for concurrent
// evaluation) and supply analytic Hessian-vector products:
//   hvp_yy_g(x, y, v) = H_yy g(x,y) * v      (dim_y -> dim_y)
//   hvp_xy_g(x, y, v) = H_xy g(x,y) * v      (dim_y -> dim_x)
class BilevelOracle {
 public:
  virtual ~BilevelOracle() = default;

  virtual int dim_x() const = 0;
  virtual int dim_y() const = 0;
  virtual std::string name() const = 0;

  virtual double f(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_x_f(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_y_f(const Vector& x, const Vector& y) const = 0;

  virtual double g(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_x_g(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_y_g(const Vector& x, const Vector& y) const = 0;

  virtual Vector hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const = 0;
  virtual Vector hvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const = 0;

  // optional capabilities
  virtual std::optional<double> g_star(const Vector&) const { return std::nullopt; }
  virtual std::optional<Matrix> hessian_yy_dense(const Vector&, const Vector&) const {
    return std::nullopt;
  }
  virtual std::optional<double> optimality_gap(const Vector&, const Vector&) const {
    return std::nullopt;
  }
  virtual ProblemConstants constants() const { return {}; }
};

struct PlCheckRow {
  double lhs;  // ||grad_y g||^2
  double rhs;  // 2 mu_g (g - g*)
  bool pass;
};

struct PlCheckReport {
  std::vector<PlCheckRow> rows;
  bool all_pass;
};

// PL inequality ||grad_y g(x,y)||^2 >= 2 mu_g (g(x,y) - g*(x)) at each point,
// with slack 1e-10 * (1 + |rhs|). Requires g*.
PlCheckReport check_pl_inequality(const BilevelOracle& oracle, double mu_g,
                                  const std::vector<std::pair<Vector, Vector>>& points);

struct FdReport {
  double max_err_grad_x_f = 0;
  double max_err_grad_y_f = 0;
  double max_err_grad_x_g = 0;
  double max_err_grad_y_g = 0;
  double max_err_hvp_yy = 0;
  double max_err_hvp_xy = 0;
  double rel_tol = 0;
  bool pass = false;
  double worst() const;
};

// Central-difference check of all analytic derivatives at the given points.
// Gradients are compared against differences of f and g; HVPs against
// differences of the gradients along deterministic random unit directions.
// Errors are ||analytic - fd|| / max(1, ||analytic||).
FdReport fd_verify(const BilevelOracle& oracle,
                   const std::vector<std::pair<Vector, Vector>>& points, double step = 1e-5,
                   double rel_tol = 1e-5);

}  // namespace galet
