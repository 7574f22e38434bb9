#include "galet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "galet/errors.hpp"

namespace galet {

double ResidualTriple::max_available() const {
  return std::max({r_x, r_w, r_y.value_or(0.0)});
}

ResidualTriple residuals(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                         const Vector& w) {
  ResidualTriple t;
  t.r_x = (oracle.grad_x_f(x, y) + oracle.hvp_xy_g(x, y, w)).squaredNorm();
  const Vector inner = oracle.grad_y_f(x, y) + oracle.hvp_yy_g(x, y, w);
  t.r_w = oracle.hvp_yy_g(x, y, inner).squaredNorm();
  if (const auto gs = oracle.g_star(x)) t.r_y = std::max(0.0, oracle.g(x, y) - *gs);
  return t;
}

double val_kkt_score(const BilevelOracle& oracle, const Vector& x, const Vector& y) {
  const auto gs = oracle.g_star(x);
  if (!gs)
    throw UnsupportedDiagnostic("val_kkt_score: problem '" + oracle.name() + "' has no g*");
  return oracle.grad_x_f(x, y).squaredNorm() + oracle.grad_y_f(x, y).squaredNorm() +
         (oracle.g(x, y) - *gs);
}

Vector minimal_norm_w(const BilevelOracle& oracle, const Vector& x, const Vector& y) {
  const auto H = oracle.hessian_yy_dense(x, y);
  if (!H)
    throw UnsupportedDiagnostic("minimal_norm_w: problem '" + oracle.name() +
                                "' has no dense yy-Hessian");
  return -(linalg::pseudoinverse(*H) * oracle.grad_y_f(x, y));
}

double lyapunov_value(const BilevelOracle& oracle, const Vector& x, const Vector& y, double c) {
  if (c < 0.0) throw std::invalid_argument("lyapunov_value: c must be nonnegative");
  const auto gs = oracle.g_star(x);
  if (!gs)
    throw UnsupportedDiagnostic("lyapunov_value: problem '" + oracle.name() + "' has no g*");
  const Vector wd = minimal_norm_w(oracle, x, y);
  const double big_f = oracle.f(x, y) + wd.dot(oracle.grad_y_g(x, y));
  return big_f + c * (oracle.g(x, y) - *gs);
}

double approx_g_star(const BilevelOracle& oracle, const Vector& x, const Vector& y, int steps) {
  if (steps <= 0) throw std::invalid_argument("approx_g_star: steps must be positive");
  // curvature estimate by power iteration on the yy-Hessian at (x, y)
  Vector v = Vector::Ones(y.size()).normalized();
  double lam = 1.0;
  for (int it = 0; it < 20; ++it) {
    Vector hv = oracle.hvp_yy_g(x, y, v);
    const double nrm = hv.norm();
    if (nrm <= 0.0) break;
    lam = v.dot(hv);
    v = hv / nrm;
  }
  const double step = lam > 0.0 ? 1.0 / lam : 1e-2;
  Vector z = y;
  for (int it = 0; it < steps; ++it) z -= step * oracle.grad_y_g(x, z);
  return oracle.g(x, z);
}

RateFit fit_rate(const std::vector<std::pair<int, double>>& series, int k_min) {
  if (series.empty()) throw std::invalid_argument("fit_rate: empty series");
  if (k_min < 0) {
    int max_k = 0;
    for (const auto& [k, v] : series) max_k = std::max(max_k, k);
    k_min = std::max(1, static_cast<int>(std::lround(0.1 * max_k)));
  }
  if (k_min < 1) k_min = 1;

  std::vector<double> lx, ly;
  double running_sum = 0.0;
  std::size_t count = 0;
  int fit_min = 0, fit_max = 0;
  for (const auto& [k, v] : series) {
    running_sum += v;
    ++count;
    // rows below k_min (including the k = 0 starting point, which has no
    // abscissa under the log) feed the running average but never the fit
    if (k < k_min) continue;
    const double avg = running_sum / static_cast<double>(count);
    if (avg <= 0.0)
      throw std::invalid_argument("fit_rate: non-positive running average in fit window");
    lx.push_back(std::log(static_cast<double>(k)));
    ly.push_back(std::log(avg));
    if (lx.size() == 1) fit_min = k;
    fit_max = k;
  }
  if (lx.size() < 3) throw std::invalid_argument("fit_rate: fewer than 3 points after filtering");

  // a flat series would leave the centered sums at roundoff scale; report the
  // degenerate perfect fit directly instead
  bool flat = true;
  for (const double y : ly) flat = flat && y == ly.front();
  if (flat) {
    RateFit fit;
    fit.slope = 0.0;
    fit.intercept = ly.front();
    fit.r_squared = 1.0;
    fit.k_min = fit_min;
    fit.k_max = fit_max;
    return fit;
  }

  const std::size_t n = lx.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissa");

  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  fit.k_min = fit_min;
  fit.k_max = fit_max;
  return fit;
}

}  // namespace galet
