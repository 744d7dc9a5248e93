#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hyperbloch/rng.hpp"

// Small dense complex-matrix utilities shared by the representation layer.

namespace hyperbloch::linalg {

using Matrix = Eigen::MatrixXcd;

inline double frobenius(const Matrix& m) { return m.norm(); }

inline double unitarity_residual(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases
// folded back into Q.
inline Matrix haar_unitary(int n, rng::Stream& stream) {
  Matrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = stream.complex_gaussian();
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : std::complex<double>(1.0);
  }
  return q;
}

// Unitary factor of the polar decomposition. Newton iteration
// X <- (X + X^{-*})/2 converges quadratically for the nearly-unitary inputs
// produced by retraction steps; falls back to an SVD otherwise.
inline Matrix polar_unitary(const Matrix& m) {
  Matrix x = m;
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  for (int iter = 0; iter < 16; ++iter) {
    const Matrix next = 0.5 * (x + x.inverse().adjoint());
    const double step = (next - x).norm();
    x = next;
    if (step < 1e-15) break;
  }
  if ((x.adjoint() * x - id).norm() < 1e-13) return x;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Dimension of the joint commutant {X : X M_i = M_i X for all i}, computed as
// the nullity of the stacked Sylvester system (I (x) M_i - M_i^T (x) I) with
// the given singular-value threshold.
inline int commutant_dimension(const std::vector<Matrix>& mats,
                               double sv_tol = 1e-8) {
  if (mats.empty()) throw std::invalid_argument("commutant of empty family");
  const int n = static_cast<int>(mats.front().rows());
  const int nn = n * n;
  Matrix sys(static_cast<int>(mats.size()) * nn, nn);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const Matrix& m = mats[k];
    // vec(M X - X M) = (I (x) M - M^T (x) I) vec(X), column-major vec.
    Matrix block = Matrix::Zero(nn, nn);
    for (int j = 0; j < n; ++j)
      block.block(j * n, j * n, n, n) = m;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int r = 0; r < n; ++r)
          block(j * n + r, i * n + r) -= m(i, j);
    sys.block(static_cast<int>(k) * nn, 0, nn, nn) = block;
  }
  Eigen::JacobiSVD<Matrix> svd(sys);
  const auto& sv = svd.singularValues();
  int nullity = nn - static_cast<int>(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < sv_tol) ++nullity;
  return nullity;
}

}  // namespace hyperbloch::linalg
