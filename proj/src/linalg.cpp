#include "galet/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace galet::linalg {

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("matvec: dimension mismatch");
  return m * v;
}

Matrix pseudoinverse(const Matrix& m, double tol) {
  if (!m.allFinite()) throw std::invalid_argument("pseudoinverse: non-finite entries");
  if (tol <= 0.0) throw std::invalid_argument("pseudoinverse: tol must be positive");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  const double cutoff = tol * sv(0);
  Vector inv = Vector::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double smallest_nonzero_singular_value(const Matrix& m, double tol) {
  if (!m.allFinite())
    throw std::invalid_argument("smallest_nonzero_singular_value: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0)
    throw std::invalid_argument("smallest_nonzero_singular_value: all-zero matrix");
  const double cutoff = tol * sv(0);
  double best = 0.0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) best = sv(i);  // singular values come sorted descending
  if (best == 0.0)
    throw std::invalid_argument("smallest_nonzero_singular_value: all-zero matrix");
  return best;
}

Vector central_diff_grad(const ScalarField& h, const Vector& p, double step) {
  if (step <= 0.0) throw std::invalid_argument("central_diff_grad: step must be positive");
  Vector out(p.size());
  Vector q = p;
  for (int i = 0; i < p.size(); ++i) {
    const double saved = q(i);
    q(i) = saved + step;
    const double hi = h(q);
    q(i) = saved - step;
    const double lo = h(q);
    q(i) = saved;
    if (!std::isfinite(hi) || !std::isfinite(lo))
      throw std::runtime_error("central_diff_grad: non-finite function value");
    out(i) = (hi - lo) / (2.0 * step);
  }
  return out;
}

}  // namespace galet::linalg
