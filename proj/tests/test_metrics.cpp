#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "galet/errors.hpp"
#include "galet/metrics.hpp"
#include "galet/problems.hpp"
#include "galet/rng.hpp"
#include "galet/solver.hpp"
#include "test_support.hpp"

using galet::Matrix;
using galet::SplitMix64;
using galet::UnsupportedDiagnostic;
using galet::Vector;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

std::vector<std::pair<int, double>> series_from(int k_max, double (*fn)(int)) {
  std::vector<std::pair<int, double>> s;
  for (int k = 0; k <= k_max; ++k) s.emplace_back(k, fn(k));
  return s;
}

}  // namespace

TEST_CASE("residuals at the reference point with w = 0") {
  galet::Example1Problem p;
  auto t = galet::residuals(p, vec1(1.0), vec2(0.0, 0.0), Vector::Zero(2));
  CHECK(t.r_x == 4.0);  // ||2x||^2
  CHECK(t.r_w == 8.0);  // ||H grad_y_f||^2 = ||(2,-2)||^2
  REQUIRE(t.r_y.has_value());
  CHECK(*t.r_y == 0.5);
  CHECK(t.max_available() == 8.0);
}

TEST_CASE("residuals vanish at a global minimizer with the right multiplier") {
  galet::Example1Problem p;
  Vector x = vec1(0.5), y = vec2(-0.5, 0.0);
  Vector wd = galet::minimal_norm_w(p, x, y);
  auto t = galet::residuals(p, x, y, wd);
  CHECK(t.r_x <= 1e-12);
  CHECK(t.r_w <= 1e-12);
  CHECK(*t.r_y == 0.0);
}

TEST_CASE("r_y clamps tiny negative gaps and disappears without g_star") {
  galet::testing::MinimalOracle p(2, 2);
  auto t = galet::residuals(p, Vector::Zero(2), Vector::Zero(2), Vector::Zero(2));
  CHECK_FALSE(t.r_y.has_value());
  CHECK(t.max_available() == 0.0);

  auto scq = galet::StronglyConvexQuadProblem::random(4, 2, 31);
  SplitMix64 rng(71);
  for (int i = 0; i < 50; ++i) {
    Vector x = galet::testing::gaussian_vector(rng, 2);
    auto triple = galet::residuals(scq, x, scq.ll_solution(x), Vector::Zero(4));
    REQUIRE(triple.r_y.has_value());
    CHECK(*triple.r_y >= 0.0);  // never negative even when g - g* rounds below zero
    CHECK(*triple.r_y <= 1e-12);
  }
}

TEST_CASE("minimal_norm_w on closed forms") {
  galet::Example1Problem p;
  Vector wd = galet::minimal_norm_w(p, vec1(1.0), vec2(0.0, 0.0));
  CHECK(wd(0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(wd(1) == doctest::Approx(0.5).epsilon(1e-12));

  galet::SingularLstsqProblem lstsq(3, 6, 3, 77);
  Vector w0 = galet::minimal_norm_w(lstsq, Vector::Zero(3), lstsq.y_target);
  CHECK(w0.norm() <= 1e-14);  // grad_y_f = 0 there

  auto scq = galet::StronglyConvexQuadProblem::random(4, 2, 31);
  SplitMix64 rng(72);
  Vector x = galet::testing::gaussian_vector(rng, 2);
  Vector y = galet::testing::gaussian_vector(rng, 4);
  Vector expect = -scq.Q.ldlt().solve(scq.grad_y_f(x, y));
  CHECK((galet::minimal_norm_w(scq, x, y) - expect).norm() <= 1e-10);

  galet::testing::MinimalOracle bare(2, 2);
  CHECK_THROWS_AS(galet::minimal_norm_w(bare, Vector::Zero(2), Vector::Zero(2)),
                  UnsupportedDiagnostic);
}

TEST_CASE("the minimal-norm multiplier zeroes r_w everywhere") {
  galet::Example1Problem e1;
  for (const auto& [x, y] : galet::testing::random_points(e1, 300, 73, true)) {
    Vector wd = galet::minimal_norm_w(e1, x, y);
    auto t = galet::residuals(e1, x, y, wd);
    double scale = 1.0 + e1.grad_y_f(x, y).squaredNorm();
    CHECK(t.r_w <= 1e-12 * scale);
  }
  galet::SingularLstsqProblem lstsq(3, 6, 3, 77);
  for (const auto& [x, y] : galet::testing::random_points(lstsq, 100, 74, false)) {
    Vector wd = galet::minimal_norm_w(lstsq, x, y);
    auto t = galet::residuals(lstsq, x, y, wd);
    double scale = 1.0 + lstsq.grad_y_f(x, y).squaredNorm();
    CHECK(t.r_w <= 1e-12 * scale);
  }
}

TEST_CASE("r_x ignores null-space shifts of the multiplier") {
  // hvp_xy annihilates null(H) on this problem family, so r_x cannot tell
  // w-dagger from w-dagger + (null-space component)
  galet::SingularLstsqProblem p(3, 6, 3, 77);
  Matrix h = *p.hessian_yy_dense(Vector::Zero(3), Vector::Zero(6));
  Matrix pinv_h = galet::linalg::pseudoinverse(h);
  Matrix null_proj = Matrix::Identity(6, 6) - pinv_h * h;
  SplitMix64 rng(75);
  for (int i = 0; i < 50; ++i) {
    Vector x = galet::testing::gaussian_vector(rng, 3);
    Vector y = galet::testing::gaussian_vector(rng, 6);
    Vector wd = galet::minimal_norm_w(p, x, y);
    Vector n = null_proj * galet::testing::gaussian_vector(rng, 6);
    auto base = galet::residuals(p, x, y, wd);
    auto shifted = galet::residuals(p, x, y, wd + n);
    CHECK(std::abs(base.r_x - shifted.r_x) <= 1e-10 * (1.0 + base.r_x));
  }
}

TEST_CASE("val_kkt_score closed forms and lower bound") {
  galet::Example1Problem p;
  CHECK(galet::val_kkt_score(p, vec1(1.0), vec2(0.0, 0.0)) == 6.5);  // 4 + 2 + 0.5
  CHECK(galet::val_kkt_score(p, vec1(0.5), vec2(-0.5, 0.0)) == 3.0);  // 1 + 2 + 0

  for (const auto& [x, y] : galet::testing::random_points(p, 300, 76, true)) {
    auto t = galet::residuals(p, x, y, Vector::Zero(2));
    CHECK(galet::val_kkt_score(p, x, y) >= *t.r_y - 1e-12);
  }

  galet::testing::MinimalOracle bare(2, 2);
  CHECK_THROWS_AS(galet::val_kkt_score(bare, Vector::Zero(2), Vector::Zero(2)),
                  UnsupportedDiagnostic);
}

TEST_CASE("val_kkt_score stays bounded away from zero at the T = 1 stall") {
  // the negative control: a strictly positive floor at points where the true
  // residuals also stall, versus ~0 only at genuinely stationary points
  galet::Example1Problem p;
  CHECK(galet::val_kkt_score(p, vec1(0.10948510685271917),
                             vec2(0.6117886160086712, 2.335953178633834)) >= 0.9);
}

TEST_CASE("lyapunov_value closed forms") {
  galet::Example1Problem p;
  // F = f + w-dagger' grad_y_g; at (1, (0,0)): f = 1, w-dagger = (-0.5, 0.5),
  // grad_y_g = (1, -1) so the correction is -1; plus c * 0.5
  CHECK(galet::lyapunov_value(p, vec1(1.0), vec2(0.0, 0.0), 1.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(galet::lyapunov_value(p, vec1(1.0), vec2(0.0, 0.0), 0.0) ==
        doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(galet::lyapunov_value(p, vec1(1.0), vec2(0.0, 0.0), 4.0) ==
        doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(galet::lyapunov_value(p, vec1(1.0), vec2(0.0, 0.0), -1.0),
                  std::invalid_argument);
  galet::testing::MinimalOracle bare(2, 2);
  CHECK_THROWS_AS(galet::lyapunov_value(bare, Vector::Zero(2), Vector::Zero(2), 1.0),
                  UnsupportedDiagnostic);
}

TEST_CASE("lyapunov_value reduces to f on the lower-level solution set") {
  auto scq = galet::StronglyConvexQuadProblem::random(4, 2, 31);
  SplitMix64 rng(77);
  for (int i = 0; i < 30; ++i) {
    Vector x = galet::testing::gaussian_vector(rng, 2);
    Vector s = scq.ll_solution(x);
    double v = galet::lyapunov_value(scq, x, s, 3.0);
    CHECK(v == doctest::Approx(scq.f(x, s)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("lyapunov sequence is non-increasing along well-tuned runs") {
  galet::Example1Problem p;
  galet::GaletConfig c;
  c.alpha = 0.15;
  c.beta = 0.5;
  c.rho = 0.05;
  c.t_inner = 200;
  c.k_outer = 50;
  const std::vector<std::pair<Vector, Vector>> starts = {{vec1(-3.0), vec2(2.0, 1.0)},
                                                         {vec1(2.0), vec2(-2.0, -1.0)}};
  for (const auto& [x0, y0] : starts) {
    Vector x = x0, y = y0;
    double prev = galet::lyapunov_value(p, x, y, 1.0);
    for (int k = 0; k < c.k_outer; ++k) {
      Vector y_next = y;
      for (int n = 0; n < c.n_inner; ++n) y_next = galet::ll_step(p, x, y_next, c.beta);
      auto ws = galet::w_solve(p, x, y_next, c);
      Vector d = galet::ul_increment(p, x, y_next, ws.w);
      x = x - c.alpha * d;
      y = y_next;
      double cur = galet::lyapunov_value(p, x, y, 1.0);
      CHECK(cur <= prev + 1e-8);
      prev = cur;
    }
  }
}

TEST_CASE("approx_g_star recovers known lower-level optima") {
  galet::SingularLstsqProblem lstsq(3, 6, 3, 77);
  SplitMix64 rng(78);
  Vector x = galet::testing::gaussian_vector(rng, 3);
  Vector y = galet::testing::gaussian_vector(rng, 6);
  double approx = galet::approx_g_star(lstsq, x, y);
  CHECK(approx >= 0.0);
  CHECK(approx <= 1e-8);

  auto scq = galet::StronglyConvexQuadProblem::random(4, 2, 31);
  Vector xq = galet::testing::gaussian_vector(rng, 2);
  Vector yq = galet::testing::gaussian_vector(rng, 4);
  double target = *scq.g_star(xq);
  CHECK(galet::approx_g_star(scq, xq, yq) ==
        doctest::Approx(target).epsilon(1e-8).scale(1.0));

  // more steps cannot make it worse on a convex problem
  double rough = galet::approx_g_star(scq, xq, yq, 20);
  double fine = galet::approx_g_star(scq, xq, yq, 2000);
  CHECK(fine - target <= rough - target + 1e-12);
}

TEST_CASE("fit_rate frozen reference: 7/k decays at slope -0.846") {
  std::vector<std::pair<int, double>> s;
  for (int k = 1; k <= 1000; ++k) s.emplace_back(k, 7.0 / k);
  auto fit = galet::fit_rate(s, 100);
  CHECK(fit.slope == doctest::Approx(-0.845735067468).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(2.899437633665).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(0.999925898451).epsilon(1e-9));
  CHECK(fit.k_min == 100);
  CHECK(fit.k_max == 1000);
}

TEST_CASE("fit_rate sees a summable series as rate 1: the running average is ~1/k") {
  std::vector<std::pair<int, double>> s;
  double v = 1.0;
  for (int k = 1; k <= 200; ++k) {
    v *= 0.5;
    s.emplace_back(k, v);
  }
  // past k ~ 54 the partial sums are exactly 1, so the average is exactly 1/k
  auto fit = galet::fit_rate(s, 100);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_rate on a constant series is flat with perfect fit") {
  auto ones = series_from(200, [](int) { return 1.0; });
  auto fit = galet::fit_rate(ones, 10);
  CHECK(fit.slope == 0.0);
  CHECK(fit.intercept == 0.0);
  CHECK(fit.r_squared == 1.0);

  auto s = series_from(200, [](int) { return 3.25; });
  fit = galet::fit_rate(s, 10);
  CHECK(fit.slope == 0.0);
  CHECK(fit.intercept == std::log(3.25));
  CHECK(fit.r_squared == 1.0);
}

TEST_CASE("fit_rate slope is invariant to scaling; intercept shifts by log c") {
  std::vector<std::pair<int, double>> s, s_scaled;
  for (int k = 0; k <= 500; ++k) {
    double v = (k == 0) ? 5.0 : 5.0 / std::pow(k, 1.3);
    s.emplace_back(k, v);
    s_scaled.emplace_back(k, 100.0 * v);
  }
  auto a = galet::fit_rate(s, 50);
  auto b = galet::fit_rate(s_scaled, 50);
  CHECK(std::abs(a.slope - b.slope) <= 1e-9);
  CHECK(b.intercept - a.intercept == doctest::Approx(std::log(100.0)).epsilon(1e-9));
  CHECK(std::abs(a.r_squared - b.r_squared) <= 1e-9);
}

TEST_CASE("fit_rate default burn-in is 10 percent of the largest k") {
  std::vector<std::pair<int, double>> s;
  for (int k = 0; k <= 1000; ++k) s.emplace_back(k, k == 0 ? 7.0 : 7.0 / k);
  auto by_default = galet::fit_rate(s);
  auto explicit_fit = galet::fit_rate(s, 100);
  CHECK(by_default.slope == explicit_fit.slope);
  CHECK(by_default.intercept == explicit_fit.intercept);
  CHECK(by_default.k_min == 100);
}

TEST_CASE("fit_rate input validation") {
  CHECK_THROWS_AS(galet::fit_rate({}), std::invalid_argument);
  CHECK_THROWS_AS(galet::fit_rate({{1, 1.0}, {2, 0.5}}, 1), std::invalid_argument);

  auto s = series_from(100, [](int) { return 0.0; });
  CHECK_THROWS_AS(galet::fit_rate(s, 10), std::invalid_argument);  // log of zero

  auto fine = series_from(100, [](int k) { return 1.0 / (k + 1); });
  CHECK_THROWS_AS(galet::fit_rate(fine, 99), std::invalid_argument);  // < 3 points left

  // k = 0 rows feed the running average but are excluded from the fit
  // (log 0 is undefined), so a k_min of 0 behaves like k_min = 1
  auto with_zero = galet::fit_rate(fine, 0);
  auto from_one = galet::fit_rate(fine, 1);
  CHECK(with_zero.slope == from_one.slope);
}
