#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "galet/linalg.hpp"
#include "galet/oracle.hpp"

namespace galet {

enum class WVariant { pl, sc };

WVariant parse_w_variant(const std::string& s);  // "pl" | "sc"
std::string to_string(WVariant v);

struct GaletConfig {
  double alpha = 0.3;  // UL stepsize
  double beta = 1.0;   // LL stepsize
  double rho = 0.1;    // w stepsize
  int n_inner = 1;     // N
  int t_inner = 1;     // T
  int k_outer = 30;    // K
  WVariant w_variant = WVariant::pl;
  bool w_warm_start = false;
  std::optional<double> stop_tol;  // off by default: run the full K

  void validate() const;  // throws std::invalid_argument
};

struct Iterate {
  Vector x, y, w;
  int k = 0;
};

// One row per outer iteration. r_x / r_w / r_y are evaluated at the iterate
// *before* the updates (the rate statement's evaluation point); dx_norm_sq and
// b_k belong to the update computed during the iteration. Optionals that stay
// empty mean the capability is missing, never zero.
struct TraceRecord {
  int k = 0;
  double r_x = 0.0;
  double r_w = 0.0;
  std::optional<double> r_y;
  std::optional<double> dx_norm_sq;
  std::optional<double> val_kkt_score;
  std::optional<double> optimality_gap;
  std::optional<double> b_k;
  double wall_time_ms = 0.0;
};

// thrown when any iterate norm exceeds the divergence threshold (1e12) or a
// gradient turns non-finite; carries the last finite state and partial trace
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& msg, Iterate last_iterate)
      : std::runtime_error(msg), last(std::move(last_iterate)) {}

  Iterate last;
  std::vector<TraceRecord> trace;  // filled by galet_run before rethrow
};

inline constexpr double kDivergenceThreshold = 1e12;

struct TraceOptions {
  bool record_b_k = false;      // needs the dense-Hessian capability
  bool approx_g_star = false;   // estimate g* by inner GD when the problem lacks it
  int approx_g_star_steps = 500;
};

// observer sees the update of iteration k after d_x is formed, before x moves
struct StepInfo {
  int k;
  const Vector& x;       // x^k
  const Vector& y_next;  // y^{k+1}
  const Vector& w_next;  // w^{k+1}
  const Vector& d_x;
};
using StepObserver = std::function<void(const StepInfo&)>;

struct RunResult {
  Iterate last;
  std::vector<TraceRecord> trace;
  bool stopped_early = false;
  bool stop_residuals_partial = false;  // early stop had no r_y to consult
};

struct WSolveResult {
  Vector w;
  int iterations = 0;
};

// y' = y - beta * grad_y_g(x, y)
Vector ll_step(const BilevelOracle& oracle, const Vector& x, const Vector& y, double beta);

// d_w = hvp_yy(grad_y_f + hvp_yy(w)), two HVPs
Vector w_increment_pl(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                      const Vector& w);

// d_w = grad_y_f + hvp_yy(w), the ablation direction
Vector w_increment_sc(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                      const Vector& w);

// T steps of w <- w - rho * increment, from 0 unless warm-started via w_init
WSolveResult w_solve(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                     const GaletConfig& config,
                     const std::optional<Vector>& w_init = std::nullopt);

// d_x = grad_x_f + hvp_xy(w)
Vector ul_increment(const BilevelOracle& oracle, const Vector& x, const Vector& y,
                    const Vector& w);

RunResult galet_run(const BilevelOracle& oracle, const Vector& x0, const Vector& y0,
                    const GaletConfig& config, const TraceOptions& opts = {},
                    const StepObserver& observer = nullptr);

}  // namespace galet
