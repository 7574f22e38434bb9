#pragma once

#include <array>
#include <utility>
#include <vector>

#include "galet/linalg.hpp"
#include "galet/oracle.hpp"

namespace galet {

struct AxisSpec {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 2;  // grid values lo + i*(hi-lo)/(steps-1)
};

struct GridSpec {
  std::array<AxisSpec, 3> axes;  // (x, y1, y2)

  void validate() const;  // steps >= 2, lo < hi
};

struct BruteForceResult {
  double x_best = 0.0;
  Vector y_best;
  double f_best = 0.0;
  double g_at_best = 0.0;
  double feasibility_tol = 0.0;
};

// enumerate the grid, keep g <= feasibility_tol, minimize f. Ties resolve to
// the first point in row-major (x, y1, y2) order so partitioned enumeration
// stays deterministic. Throws NoFeasiblePoint when the band is empty.
BruteForceResult brute_force_example1(const GridSpec& grid, double feasibility_tol = 1e-3,
                                      int workers = 1);

struct WErrorCurve {
  std::vector<double> err;  // err[t] = ||w_t - w_dagger||, t = 0..t_max
  double decay_bound = 0.0;     // (1 - rho * lambda_hat^2) + 1e-6
  double worst_factor = 0.0;    // max err[t+1]/err[t] while above the noise floor
  bool monotone = true;         // no increase while above the noise floor
  bool decay_ok = true;
};

// run the pl-variant w iteration from 0 against the pseudoinverse target.
// Ratios are only judged while err[t] > 1e-9 * max(1, ||w_dagger||); below
// that the iteration sits at the accumulation floor of roundoff.
// Throws UnsupportedDiagnostic without the dense-Hessian capability.
WErrorCurve w_gd_vs_pinv(const BilevelOracle& oracle, const Vector& x, const Vector& y, double rho,
                         int t_max);

struct RankProbeRow {
  int rank_augmented = 0;  // rank of [hessian_yy | hessian_yx]
  int rank_hessian = 0;    // rank of hessian_yy
};

// numerical ranks at 1e-9 relative tolerance. hessian_yx (d_y x d_x) is
// assembled through hvp_xy_g on y-basis vectors, which yields its transpose
// row by row. Throws UnsupportedDiagnostic without the dense-Hessian capability.
std::vector<RankProbeRow> rank_probe(const BilevelOracle& oracle,
                                     const std::vector<std::pair<Vector, Vector>>& points);

}  // namespace galet
