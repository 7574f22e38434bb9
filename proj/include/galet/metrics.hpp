#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "galet/linalg.hpp"
#include "galet/oracle.hpp"

namespace galet {

struct ResidualTriple {
  double r_x = 0.0;
  double r_w = 0.0;
  std::optional<double> r_y;  // empty when the problem has no g*

  double max_available() const;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int k_min = 0;
  int k_max = 0;
};

// r_x = ||grad_x_f + hvp_xy(w)||^2, r_w = ||hvp_yy(grad_y_f + hvp_yy(w))||^2,
// r_y = g - g* when available (clamped at 0 against roundoff)
ResidualTriple residuals(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                         const Vector& w);

// ||grad_x_f||^2 + ||grad_y_f||^2 + (g - g*). Deliberately *not* a valid
// stationarity measure on PL problems; kept as the negative control.
// Throws UnsupportedDiagnostic without g*.
double val_kkt_score(const BilevelOracle& oracle, const Vector& x, const Vector& y);

// w-dagger = -pinv(hessian_yy) * grad_y_f. Throws UnsupportedDiagnostic
// without the dense-Hessian capability.
Vector minimal_norm_w(const BilevelOracle& oracle, const Vector& x, const Vector& y);

// F(x, y; w-dagger) + c * (g - g*) with F(x,y;w) = f + w' grad_y_g
double lyapunov_value(const BilevelOracle& oracle, const Vector& x, const Vector& y, double c);

// estimate g*(x) by `steps` GD iterations on g(x, .) from y, stepsize from a
// power-iteration estimate of the curvature; used where g* is unavailable
double approx_g_star(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                     int steps = 500);

// least squares on (log k, log running_average) for k >= k_min; k_min < 0
// selects the default burn-in of 10% of the largest k. The running average is
// positional over the whole series. Throws std::invalid_argument on fewer
// than 3 usable points or non-positive data in the fit window.
RateFit fit_rate(const std::vector<std::pair<int, double>>& series, int k_min = -1);

}  // namespace galet
