// SPDX-License-Identifier: Apache-2.0
#include "qpt/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qpt {

bool all_finite(const CMat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) return false;
  return true;
}

double hermitian_deviation(const CMat& m) {
  if (m.rows() != m.cols()) throw NotSquare("matrix is not square");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const CMat& m, double tol) {
  if (hermitian_deviation(m) > tol) throw NotHermitian("matrix is not Hermitian within tolerance");
}

namespace {

void fix_column_phases(CMat& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      double a = std::abs(v(r, c));
      if (a > 1e-8) {
        v.col(c) *= std::conj(v(r, c)) / a;
        break;
      }
    }
  }
}

}  // namespace

EigResult hermitian_eig(const CMat& m) {
  require_hermitian(m);
  CMat sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed to converge");

  const Eigen::Index n = m.rows();
  EigResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  fix_column_phases(out.vectors);
  return out;
}

CMat psd_sqrt(const CMat& m) {
  EigResult eig = hermitian_eig(m);
  RVec lam = eig.values;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-9) throw NotPSD("matrix has an eigenvalue below -1e-9");
    if (lam(i) < 0.0) lam(i) = 0.0;
  }
  CMat scaled = eig.vectors;
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) scaled.col(c) *= std::sqrt(lam(c));
  CMat root = scaled * eig.vectors.adjoint();
  return (root + root.adjoint()) / 2.0;
}

CMat pseudo_inverse(const CMat& m, double rcond) {
  if (!(rcond > 0.0 && rcond < 1.0)) throw BadConfig("rcond must lie in (0, 1)");
  if (!all_finite(m)) throw Error("pseudo_inverse: non-finite input");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return CMat::Zero(m.cols(), m.rows());
  double cutoff = rcond * sv(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

CVec vec_rm(const CMat& m) {
  CVec v(m.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(k++) = m(r, c);
  return v;
}

CMat unvec_rm(const CVec& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw DimensionMismatch("unvec: size does not match rows*cols");
  CMat m(rows, cols);
  Eigen::Index k = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = v(k++);
  return m;
}

}  // namespace qpt
