#include "galet/solver.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "galet/errors.hpp"
#include "galet/metrics.hpp"

namespace galet {

WVariant parse_w_variant(const std::string& s) {
  if (s == "pl") return WVariant::pl;
  if (s == "sc") return WVariant::sc;
  throw std::invalid_argument("w_variant must be 'pl' or 'sc', got '" + s + "'");
}

std::string to_string(WVariant v) { return v == WVariant::pl ? "pl" : "sc"; }

void GaletConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (n_inner < 1) throw std::invalid_argument("n_inner must be >= 1");
  if (t_inner < 1) throw std::invalid_argument("t_inner must be >= 1");
  if (k_outer < 0) throw std::invalid_argument("k_outer must be >= 0");
  if (stop_tol && !(*stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");
}

namespace {

bool exceeds_threshold(const Vector& v) {
  return !v.allFinite() || v.lpNorm<Eigen::Infinity>() > kDivergenceThreshold;
}

[[noreturn]] void throw_divergence(const std::string& where, const Vector& x, const Vector& y,
                                   const Vector& w, int k) {
  Iterate it;
  it.x = x;
  it.y = y;
  it.w = w;
  it.k = k;
  std::string msg = where + ": iterate exceeded the divergence threshold";
  if (k >= 0) msg += " at k=" + std::to_string(k);
  throw DivergenceError(msg, std::move(it));
}

}  // namespace

Vector ll_step(const BilevelOracle& oracle, const Vector& x, const Vector& y, double beta) {
  Vector out = y - beta * oracle.grad_y_g(x, y);
  if (exceeds_threshold(out)) throw_divergence("ll_step", x, y, Vector::Zero(y.size()), -1);
  return out;
}

Vector w_increment_pl(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                      const Vector& w) {
  return oracle.hvp_yy_g(x, y, oracle.grad_y_f(x, y) + oracle.hvp_yy_g(x, y, w));
}

Vector w_increment_sc(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                      const Vector& w) {
  return oracle.grad_y_f(x, y) + oracle.hvp_yy_g(x, y, w);
}

WSolveResult w_solve(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                     const GaletConfig& config, const std::optional<Vector>& w_init) {
  if (config.t_inner < 1) throw std::invalid_argument("w_solve: t_inner must be >= 1");
  WSolveResult res;
  res.w = (config.w_warm_start && w_init) ? *w_init : Vector::Zero(y.size());
  // grad_y_f is constant across the T steps; evaluate it once
  const Vector gyf = oracle.grad_y_f(x, y);
  for (int t = 0; t < config.t_inner; ++t) {
    Vector d;
    if (config.w_variant == WVariant::pl)
      d = oracle.hvp_yy_g(x, y, gyf + oracle.hvp_yy_g(x, y, res.w));
    else
      d = gyf + oracle.hvp_yy_g(x, y, res.w);
    res.w -= config.rho * d;
    if (exceeds_threshold(res.w)) throw_divergence("w_solve", x, y, res.w, -1);
  }
  res.iterations = config.t_inner;
  return res;
}

Vector ul_increment(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                    const Vector& w) {
  return oracle.grad_x_f(x, y) + oracle.hvp_xy_g(x, y, w);
}

RunResult galet_run(const BilevelOracle& oracle, const Vector& x0, const Vector& y0,
                    const GaletConfig& config, const TraceOptions& opts,
                    const StepObserver& observer) {
  config.validate();
  if (x0.size() != oracle.dim_x() || y0.size() != oracle.dim_y())
    throw std::invalid_argument("galet_run: initial point dimensions do not match the oracle");

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t_start]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  RunResult res;
  res.last.x = x0;
  res.last.y = y0;
  res.last.w = Vector::Zero(oracle.dim_y());
  res.last.k = 0;

  Vector& x = res.last.x;
  Vector& y = res.last.y;
  Vector& w = res.last.w;

  const bool has_g_star = static_cast<bool>(oracle.g_star(x0));
  const bool use_approx = opts.approx_g_star && !has_g_star;

  try {
    for (int k = 0; k < config.k_outer; ++k) {
      res.last.k = k;
      TraceRecord row;
      row.k = k;

      // residuals at the pre-update triple (x^k, y^k, w^k)
      ResidualTriple triple = residuals(oracle, x, y, w);
      if (!triple.r_y && use_approx)
        triple.r_y =
            std::max(0.0, oracle.g(x, y) - approx_g_star(oracle, x, y, opts.approx_g_star_steps));
      row.r_x = triple.r_x;
      row.r_w = triple.r_w;
      row.r_y = triple.r_y;
      if (has_g_star) row.val_kkt_score = val_kkt_score(oracle, x, y);
      row.optimality_gap = oracle.optimality_gap(x, y);

      if (config.stop_tol && triple.max_available() <= *config.stop_tol) {
        row.wall_time_ms = elapsed_ms();
        res.trace.push_back(row);
        res.stopped_early = true;
        res.stop_residuals_partial = !triple.r_y.has_value();
        break;
      }

      for (int n = 0; n < config.n_inner; ++n) y = ll_step(oracle, x, y, config.beta);

      const WSolveResult ws =
          w_solve(oracle, x, y, config, config.w_warm_start ? std::optional<Vector>(w)
                                                            : std::nullopt);
      w = ws.w;

      const Vector d_x = ul_increment(oracle, x, y, w);
      row.dx_norm_sq = d_x.squaredNorm();
      if (opts.record_b_k) {
        if (const auto H = oracle.hessian_yy_dense(x, y)) {
          const Vector w_dag = -(linalg::pseudoinverse(*H) * oracle.grad_y_f(x, y));
          row.b_k = (w - w_dag).norm();
        }
      }
      if (observer) observer(StepInfo{k, x, y, w, d_x});

      x -= config.alpha * d_x;
      if (exceeds_threshold(x) || exceeds_threshold(y)) throw_divergence("galet_run", x, y, w, k);

      row.wall_time_ms = elapsed_ms();
      res.trace.push_back(row);
    }
  } catch (DivergenceError& e) {
    e.trace = res.trace;
    e.last.k = res.last.k;
    throw;
  }

  if (!res.stopped_early) res.last.k = config.k_outer;
  return res;
}

}  // namespace galet
