#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "galet/oracle.hpp"

namespace galet {

// min_x  f = x^2 + y1 - sin(y2)   s.t.  y in argmin  g = (x + y1 - sin(y2))^2 / 2
//
// g*(x) = 0 for every x, g satisfies PL with mu_g = 1, and the lower-level
// Hessian is rank 1 on the solution set. The global minimizers have x = 0.5
// and 0.5 + y1 - sin(y2) = 0, which gives a closed-form optimality gap.
class Example1Problem : public BilevelOracle {
 public:
  int dim_x() const override { return 1; }
  int dim_y() const override { return 2; }
  std::string name() const override { return "example1"; }

  double f(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  Vector hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const override;
  Vector hvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const override;

  std::optional<double> g_star(const Vector&) const override { return 0.0; }
  std::optional<Matrix> hessian_yy_dense(const Vector& x, const Vector& y) const override;
  std::optional<double> optimality_gap(const Vector& x, const Vector& y) const override;
  ProblemConstants constants() const override;
};

struct Example1Derivatives {
  Vector grad_y_g;   // residual * (1, -cos y2)
  Matrix hess_yy;    // [[1, -c], [-c, c^2 + s r]]
  Vector hess_yx;    // (1, -cos y2), the single column of the yx-Hessian
  Vector grad_x_f;   // (2x)
  Vector grad_y_f;   // (1, -cos y2)
};

Example1Derivatives example1_derivatives(double x, const Vector& y);

// (x - 0.5)^2 + (0.5 + y1 - sin y2)^2
double example1_optimality_gap(double x, const Vector& y);

// g = ||A y - B x||^2 / 2 with wide A (rank = rows < dim_y), so the
// yy-Hessian A'A is singular PSD and g is PL but not strongly convex.
// B = A C keeps B x in range(A), hence g*(x) = 0 exactly.
// f = ||y - y_target||^2 / 2 + ||x||^2 / 2.
//
// A is generated as diag(sv) * V with orthonormal rows V and singular values
// sv in [1, 2), so the spectrum (mu_g, lambda_g, l_g1) is exact by construction.
class SingularLstsqProblem : public BilevelOracle {
 public:
  SingularLstsqProblem(int m_rows, int d_y, int d_x, std::uint64_t seed);

  int dim_x() const override { return static_cast<int>(B.cols()); }
  int dim_y() const override { return static_cast<int>(A.cols()); }
  std::string name() const override { return "singular-lstsq"; }

  double f(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  Vector hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const override;
  Vector hvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const override;

  std::optional<double> g_star(const Vector&) const override { return 0.0; }
  std::optional<Matrix> hessian_yy_dense(const Vector&, const Vector&) const override;
  ProblemConstants constants() const override;

  Matrix A, B;
  Vector y_target;
  Vector singular_values;  // of A, ascending
};

// g = y'Qy/2 + x'P'y + r'y with symmetric positive definite Q, so the
// lower-level solution S(x) = -Q^{-1}(P x + r) is unique and the implicit
// gradient of x -> f(x, S(x)) has a closed form.
// f = y'F_yy y/2 + b_y'y + x'F_xx x/2 + b_x'x.
class StronglyConvexQuadProblem : public BilevelOracle {
 public:
  StronglyConvexQuadProblem(Matrix Q, Matrix P, Vector r, Matrix F_yy, Vector b_y, Matrix F_xx,
                            Vector b_x);

  // random instance: Q with eigenvalues in [1, 2), f = ||y - y_t||^2/2 + ||x||^2/2
  static StronglyConvexQuadProblem random(int d_y, int d_x, std::uint64_t seed);

  int dim_x() const override { return static_cast<int>(P.cols()); }
  int dim_y() const override { return static_cast<int>(Q.rows()); }
  std::string name() const override { return "sc-quad"; }

  double f(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  Vector hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const override;
  Vector hvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const override;

  std::optional<double> g_star(const Vector& x) const override;
  std::optional<Matrix> hessian_yy_dense(const Vector&, const Vector&) const override;
  ProblemConstants constants() const override;

  Vector ll_solution(const Vector& x) const;  // S(x)

  Matrix Q, P;
  Vector r;
  Matrix F_yy, F_xx;
  Vector b_y, b_x;
  std::optional<double> mu_q;  // min eigenvalue when known from the generator
  std::optional<double> l_q;   // max eigenvalue when known
};

// grad of x -> f(x, S(x)) in closed form:
//   grad_x f(x, S(x)) - P' Q^{-1} grad_y f(x, S(x))
// Throws std::invalid_argument when Q is singular.
Vector scq_hypergradient(const StronglyConvexQuadProblem& p, const Vector& x);

// Data hyper-cleaning at desk scale. Binary logistic regression on two
// gaussian clusters; a fraction p_c of training labels is flipped and the
// upper level learns per-sample weights sigma(x_i) from a clean validation set:
//   g(x, y) = mean_i sigma(x_i) CE(y; u_i, v_i)      (train, corrupted)
//   f(x, y) = mean_j CE(y; u_j, v_j)                 (validation, clean)
// y = (theta, bias) in R^{p+1}. g* has no closed form and is reported as
// unavailable.
class SyntheticHypercleanProblem : public BilevelOracle {
 public:
  SyntheticHypercleanProblem(Matrix X_tr, Vector v_tr, Matrix X_val, Vector v_val,
                             std::vector<int> flip_indices);

  int dim_x() const override { return static_cast<int>(X_tr.rows()); }
  int dim_y() const override { return static_cast<int>(X_tr.cols()); }
  std::string name() const override { return "hyperclean-syn"; }

  double f(const Vector& x, const Vector& y) const override;
  Vector grad_x_f(const Vector& x, const Vector& y) const override;
  Vector grad_y_f(const Vector& x, const Vector& y) const override;
  double g(const Vector& x, const Vector& y) const override;
  Vector grad_x_g(const Vector& x, const Vector& y) const override;
  Vector grad_y_g(const Vector& x, const Vector& y) const override;
  Vector hvp_yy_g(const Vector& x, const Vector& y, const Vector& v) const override;
  Vector hvp_xy_g(const Vector& x, const Vector& y, const Vector& v) const override;

  std::optional<Matrix> hessian_yy_dense(const Vector& x, const Vector& y) const override;

  Matrix X_tr, X_val;       // rows (u_i, 1), bias column appended
  Vector v_tr, v_val;       // labels in {0, 1}; v_tr after corruption
  std::vector<int> flips;   // sorted corrupted train indices
};

// Two unit-covariance gaussian clusters with class means +-1.5/sqrt(p) per
// coordinate; exactly round(p_c * n_tr) train labels flipped (chosen by a
// partial Fisher-Yates pass so the count is deterministic). Validation stays
// clean. Fully determined by the seed.
SyntheticHypercleanProblem generate_hyperclean_data(int n_tr, int n_val, int p, double p_c,
                                                    std::uint64_t seed);

// registry for the CLI: construct by name with string parameters
std::vector<std::string> problem_names();
std::vector<std::string> problem_param_names(const std::string& name);
std::unique_ptr<BilevelOracle> make_problem(const std::string& name,
                                            const std::map<std::string, std::string>& params);

}  // namespace galet
