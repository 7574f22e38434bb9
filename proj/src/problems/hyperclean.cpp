#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "galet/problems.hpp"
#include "galet/rng.hpp"

namespace galet {

namespace {

// overflow-safe logistic
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z), the CE building block: CE = softplus(z) - v z
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

SyntheticHypercleanProblem::SyntheticHypercleanProblem(Matrix X_tr_, Vector v_tr_, Matrix X_val_,
                                                       Vector v_val_, std::vector<int> flip_indices)
    : X_tr(std::move(X_tr_)),
      X_val(std::move(X_val_)),
      v_tr(std::move(v_tr_)),
      v_val(std::move(v_val_)),
      flips(std::move(flip_indices)) {
  if (X_tr.cols() != X_val.cols() || v_tr.size() != X_tr.rows() || v_val.size() != X_val.rows())
    throw std::invalid_argument("hyperclean-syn: inconsistent dimensions");
  std::sort(flips.begin(), flips.end());
}

double SyntheticHypercleanProblem::f(const Vector&, const Vector& y) const {
  const Vector z = X_val * y;
  double acc = 0.0;
  for (int j = 0; j < z.size(); ++j) acc += softplus(z(j)) - v_val(j) * z(j);
  return acc / static_cast<double>(z.size());
}

Vector SyntheticHypercleanProblem::grad_x_f(const Vector& x, const Vector&) const {
  return Vector::Zero(x.size());
}

Vector SyntheticHypercleanProblem::grad_y_f(const Vector&, const Vector& y) const {
  const Vector z = X_val * y;
  Vector s(z.size());
  for (int j = 0; j < z.size(); ++j) s(j) = sigmoid(z(j)) - v_val(j);
  return X_val.transpose() * s / static_cast<double>(z.size());
}

double SyntheticHypercleanProblem::g(const Vector& x, const Vector& y) const {
  const Vector z = X_tr * y;
  double acc = 0.0;
  for (int i = 0; i < z.size(); ++i)
    acc += sigmoid(x(i)) * (softplus(z(i)) - v_tr(i) * z(i));
  return acc / static_cast<double>(z.size());
}

Vector SyntheticHypercleanProblem::grad_x_g(const Vector& x, const Vector& y) const {
  const Vector z = X_tr * y;
  Vector out(x.size());
  for (int i = 0; i < z.size(); ++i) {
    const double sx = sigmoid(x(i));
    out(i) = sx * (1.0 - sx) * (softplus(z(i)) - v_tr(i) * z(i));
  }
  return out / static_cast<double>(z.size());
}

Vector SyntheticHypercleanProblem::grad_y_g(const Vector& x, const Vector& y) const {
  const Vector z = X_tr * y;
  Vector s(z.size());
  for (int i = 0; i < z.size(); ++i) s(i) = sigmoid(x(i)) * (sigmoid(z(i)) - v_tr(i));
  return X_tr.transpose() * s / static_cast<double>(z.size());
}

Vector SyntheticHypercleanProblem::hvp_yy_g(const Vector& x, const Vector& y,
                                            const Vector& v) const {
  const Vector z = X_tr * y;
  const Vector xv = X_tr * v;
  Vector s(z.size());
  for (int i = 0; i < z.size(); ++i) {
    const double sz = sigmoid(z(i));
    s(i) = sigmoid(x(i)) * sz * (1.0 - sz) * xv(i);
  }
  return X_tr.transpose() * s / static_cast<double>(z.size());
}

Vector SyntheticHypercleanProblem::hvp_xy_g(const Vector& x, const Vector& y,
                                            const Vector& v) const {
  const Vector z = X_tr * y;
  const Vector xv = X_tr * v;
  Vector out(x.size());
  for (int i = 0; i < z.size(); ++i) {
    const double sx = sigmoid(x(i));
    out(i) = sx * (1.0 - sx) * (sigmoid(z(i)) - v_tr(i)) * xv(i);
  }
  return out / static_cast<double>(z.size());
}

std::optional<Matrix> SyntheticHypercleanProblem::hessian_yy_dense(const Vector& x,
                                                                   const Vector& y) const {
  const Vector z = X_tr * y;
  Vector wts(z.size());
  for (int i = 0; i < z.size(); ++i) {
    const double sz = sigmoid(z(i));
    wts(i) = sigmoid(x(i)) * sz * (1.0 - sz);
  }
  wts /= static_cast<double>(z.size());
  return X_tr.transpose() * wts.asDiagonal() * X_tr;
}

SyntheticHypercleanProblem generate_hyperclean_data(int n_tr, int n_val, int p, double p_c,
                                                    std::uint64_t seed) {
  if (n_tr <= 0 || n_val <= 0 || p <= 0) throw std::invalid_argument("dimensions must be positive");
  if (p_c < 0.0 || p_c >= 1.0) throw std::invalid_argument("p_c must lie in [0, 1)");
  SplitMix64 rng(seed);
  const double margin = 1.5 / std::sqrt(static_cast<double>(p));

  auto sample = [&](int n, Matrix& X, Vector& v) {
    X = Matrix(n, p + 1);
    v = Vector(n);
    for (int i = 0; i < n; ++i) {
      v(i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
      const double mu = v(i) == 1.0 ? margin : -margin;
      for (int j = 0; j < p; ++j) X(i, j) = mu + rng.gaussian();
      X(i, p) = 1.0;  // bias column
    }
  };

  Matrix X_tr, X_val;
  Vector v_tr, v_val;
  sample(n_tr, X_tr, v_tr);
  sample(n_val, X_val, v_val);

  const int n_flip = static_cast<int>(std::lround(p_c * n_tr));
  std::vector<int> idx(n_tr);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n_flip; ++i) {
    const int j = i + rng.uniform_int(n_tr - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> flips(idx.begin(), idx.begin() + n_flip);
  for (int i : flips) v_tr(i) = 1.0 - v_tr(i);

  return SyntheticHypercleanProblem(std::move(X_tr), std::move(v_tr), std::move(X_val),
                                    std::move(v_val), std::move(flips));
}

}  // namespace galet
