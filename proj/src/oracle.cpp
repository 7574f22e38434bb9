#include "galet/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "galet/errors.hpp"
#include "galet/rng.hpp"

namespace galet {

PlCheckReport check_pl_inequality(const BilevelOracle& oracle, double mu_g,
                                  const std::vector<std::pair<Vector, Vector>>& points) {
  if (mu_g <= 0.0) throw std::invalid_argument("check_pl_inequality: mu_g must be positive");
  PlCheckReport report;
  report.all_pass = true;
  report.rows.reserve(points.size());
  for (const auto& [x, y] : points) {
    const auto gs = oracle.g_star(x);
    if (!gs)
      throw UnsupportedDiagnostic("check_pl_inequality: problem '" + oracle.name() +
                                  "' has no g*");
    PlCheckRow row;
    row.lhs = oracle.grad_y_g(x, y).squaredNorm();
    row.rhs = 2.0 * mu_g * (oracle.g(x, y) - *gs);
    row.pass = row.lhs >= row.rhs - 1e-10 * (1.0 + std::abs(row.rhs));
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

double FdReport::worst() const {
  return std::max({max_err_grad_x_f, max_err_grad_y_f, max_err_grad_x_g, max_err_grad_y_g,
                   max_err_hvp_yy, max_err_hvp_xy});
}

namespace {

double rel_err(const Vector& analytic, const Vector& fd) {
  return (analytic - fd).norm() / std::max(1.0, analytic.norm());
}

Vector random_unit(SplitMix64& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
  const double nrm = v.norm();
  return nrm > 0.0 ? Vector(v / nrm) : Vector::Unit(n, 0);
}

}  // namespace

FdReport fd_verify(const BilevelOracle& oracle,
                   const std::vector<std::pair<Vector, Vector>>& points, double step,
                   double rel_tol) {
  FdReport rep;
  rep.rel_tol = rel_tol;
  SplitMix64 dir_rng(0x5eedfd5eedfdULL);
  for (const auto& [x, y] : points) {
    auto f_of_x = [&](const Vector& xx) { return oracle.f(xx, y); };
    auto f_of_y = [&](const Vector& yy) { return oracle.f(x, yy); };
    auto g_of_x = [&](const Vector& xx) { return oracle.g(xx, y); };
    auto g_of_y = [&](const Vector& yy) { return oracle.g(x, yy); };

    rep.max_err_grad_x_f = std::max(
        rep.max_err_grad_x_f,
        rel_err(oracle.grad_x_f(x, y), linalg::central_diff_grad(f_of_x, x, step)));
    rep.max_err_grad_y_f = std::max(
        rep.max_err_grad_y_f,
        rel_err(oracle.grad_y_f(x, y), linalg::central_diff_grad(f_of_y, y, step)));
    rep.max_err_grad_x_g = std::max(
        rep.max_err_grad_x_g,
        rel_err(oracle.grad_x_g(x, y), linalg::central_diff_grad(g_of_x, x, step)));
    rep.max_err_grad_y_g = std::max(
        rep.max_err_grad_y_g,
        rel_err(oracle.grad_y_g(x, y), linalg::central_diff_grad(g_of_y, y, step)));

    // HVPs against directional differences of the analytic gradients
    const Vector v = random_unit(dir_rng, oracle.dim_y());
    const Vector fd_yy =
        (oracle.grad_y_g(x, y + step * v) - oracle.grad_y_g(x, y - step * v)) / (2.0 * step);
    rep.max_err_hvp_yy = std::max(rep.max_err_hvp_yy, rel_err(oracle.hvp_yy_g(x, y, v), fd_yy));
    const Vector fd_xy =
        (oracle.grad_x_g(x, y + step * v) - oracle.grad_x_g(x, y - step * v)) / (2.0 * step);
    rep.max_err_hvp_xy = std::max(rep.max_err_hvp_xy, rel_err(oracle.hvp_xy_g(x, y, v), fd_xy));
  }
  rep.pass = rep.worst() <= rel_tol;
  return rep;
}

}  // namespace galet
