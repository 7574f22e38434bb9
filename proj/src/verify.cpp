#include "galet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "galet/errors.hpp"
#include "galet/metrics.hpp"
#include "galet/problems.hpp"

namespace galet {

void GridSpec::validate() const {
  for (const auto& a : axes) {
    if (a.steps < 2) throw std::invalid_argument("grid axis needs steps >= 2");
    if (!(a.lo < a.hi)) throw std::invalid_argument("grid axis needs lo < hi");
  }
}

namespace {

double axis_value(const AxisSpec& a, int i) {
  return a.lo + static_cast<double>(i) * (a.hi - a.lo) / static_cast<double>(a.steps - 1);
}

struct GridBest {
  double f = std::numeric_limits<double>::infinity();
  long long flat = -1;  // row-major index; lower wins ties
  double x = 0.0, y1 = 0.0, y2 = 0.0, g = 0.0;
};

}  // namespace

BruteForceResult brute_force_example1(const GridSpec& grid, double feasibility_tol, int workers) {
  grid.validate();
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  const Example1Problem prob;
  const auto& [ax, ay1, ay2] = grid.axes;

  auto scan = [&](int x_begin, int x_end) {
    GridBest best;
    Vector xv(1), yv(2);
    for (int i = x_begin; i < x_end; ++i) {
      xv(0) = axis_value(ax, i);
      for (int j = 0; j < ay1.steps; ++j) {
        yv(0) = axis_value(ay1, j);
        for (int l = 0; l < ay2.steps; ++l) {
          yv(1) = axis_value(ay2, l);
          const double gv = prob.g(xv, yv);
          if (gv > feasibility_tol) continue;
          const double fv = prob.f(xv, yv);
          const long long flat =
              (static_cast<long long>(i) * ay1.steps + j) * ay2.steps + l;
          if (fv < best.f || (fv == best.f && flat < best.flat)) {
            best = GridBest{fv, flat, xv(0), yv(0), yv(1), gv};
          }
        }
      }
    }
    return best;
  };

  GridBest best;
  if (workers == 1) {
    best = scan(0, ax.steps);
  } else {
    const int n = std::min(workers, ax.steps);
    std::vector<GridBest> partial(n);
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int t = 0; t < n; ++t) {
      const int lo = ax.steps * t / n;
      const int hi = ax.steps * (t + 1) / n;
      pool.emplace_back([&, t, lo, hi] { partial[t] = scan(lo, hi); });
    }
    for (auto& th : pool) th.join();
    for (const auto& p : partial) {
      if (p.flat < 0) continue;
      if (p.f < best.f || (p.f == best.f && p.flat < best.flat)) best = p;
    }
  }

  if (best.flat < 0)
    throw NoFeasiblePoint("no grid point with g <= feasibility_tol; refine the grid or widen "
                          "the tolerance");
  BruteForceResult res;
  res.x_best = best.x;
  res.y_best = Vector(2);
  res.y_best << best.y1, best.y2;
  res.f_best = best.f;
  res.g_at_best = best.g;
  res.feasibility_tol = feasibility_tol;
  return res;
}

WErrorCurve w_gd_vs_pinv(const BilevelOracle& oracle, const Vector& x, const Vector& y, double rho,
                         int t_max) {
  if (t_max < 1) throw std::invalid_argument("w_gd_vs_pinv: t_max must be >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("w_gd_vs_pinv: rho must be positive");
  const auto H = oracle.hessian_yy_dense(x, y);
  if (!H)
    throw UnsupportedDiagnostic("w_gd_vs_pinv: problem '" + oracle.name() +
                                "' has no dense yy-Hessian");
  const Vector w_dag = minimal_norm_w(oracle, x, y);
  const double lam_hat = linalg::smallest_nonzero_singular_value(*H);
  const double floor = 1e-9 * std::max(1.0, w_dag.norm());

  WErrorCurve curve;
  curve.decay_bound = (1.0 - rho * lam_hat * lam_hat) + 1e-6;
  curve.err.reserve(static_cast<std::size_t>(t_max) + 1);

  const Vector gyf = oracle.grad_y_f(x, y);
  Vector w = Vector::Zero(y.size());
  curve.err.push_back((w - w_dag).norm());
  for (int t = 0; t < t_max; ++t) {
    w -= rho * oracle.hvp_yy_g(x, y, gyf + oracle.hvp_yy_g(x, y, w));
    const double e = (w - w_dag).norm();
    const double prev = curve.err.back();
    if (prev > floor) {
      if (e > prev) curve.monotone = false;
      const double factor = prev > 0.0 ? e / prev : 0.0;
      curve.worst_factor = std::max(curve.worst_factor, factor);
      if (factor > curve.decay_bound) curve.decay_ok = false;
    }
    curve.err.push_back(e);
  }
  return curve;
}

std::vector<RankProbeRow> rank_probe(const BilevelOracle& oracle,
                                     const std::vector<std::pair<Vector, Vector>>& points) {
  std::vector<RankProbeRow> rows;
  rows.reserve(points.size());
  const int d_x = oracle.dim_x();
  const int d_y = oracle.dim_y();
  for (const auto& [x, y] : points) {
    const auto H = oracle.hessian_yy_dense(x, y);
    if (!H)
      throw UnsupportedDiagnostic("rank_probe: problem '" + oracle.name() +
                                  "' has no dense yy-Hessian");
    Matrix yx(d_y, d_x);
    for (int j = 0; j < d_y; ++j) {
      // row j of hessian_yx is hvp_xy_g applied to e_j, transposed
      const Vector col = oracle.hvp_xy_g(x, y, Vector::Unit(d_y, j));
      yx.row(j) = col.transpose();
    }
    Matrix aug(d_y, d_y + d_x);
    aug.leftCols(d_y) = *H;
    aug.rightCols(d_x) = yx;

    auto rank_of = [](const Matrix& m) {
      Eigen::JacobiSVD<Matrix> svd(m);
      const Vector& sv = svd.singularValues();
      if (sv.size() == 0 || sv(0) == 0.0) return 0;
      const double cutoff = 1e-9 * sv(0);
      int r = 0;
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
      return r;
    };
    rows.push_back(RankProbeRow{rank_of(aug), rank_of(*H)});
  }
  return rows;
}

}  // namespace galet
