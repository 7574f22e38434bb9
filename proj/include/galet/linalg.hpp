#pragma once

#include <Eigen/Dense>
#include <functional>

namespace galet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

// Dense matrix-vector product with dimension checking.
Vector matvec(const Matrix& m, const Vector& v);

// Moore-Penrose pseudoinverse by SVD. Singular values <= tol * sigma_max are
// treated as zero. tol is relative.
Matrix pseudoinverse(const Matrix& m, double tol = 1e-9);

// Smallest singular value strictly above tol * sigma_max.
// Throws std::invalid_argument for an all-zero matrix.
double smallest_nonzero_singular_value(const Matrix& m, double tol = 1e-9);

using ScalarField = std::function<double(const Vector&)>;

// Central finite differences: component i is (h(p+s e_i) - h(p-s e_i)) / 2s.
Vector central_diff_grad(const ScalarField& h, const Vector& p, double step = 1e-5);

}  // namespace linalg
}  // namespace galet
