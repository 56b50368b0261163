// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qpt/errors.hpp"

namespace qpt {

using cplx = std::complex<double>;
// Row-major storage; flat index of entry (a, b) is a*cols + b throughout.
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RVec = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;

bool all_finite(const CMat& m);

// max |m - m†| entry; NotSquare if m is not square.
double hermitian_deviation(const CMat& m);

void require_hermitian(const CMat& m, double tol = kHermitianTol);

struct EigResult {
  RVec values;   // descending
  CMat vectors;  // columns; each scaled so its first component above 1e-8 is real positive
};

EigResult hermitian_eig(const CMat& m);

// Hermitian square root; eigenvalues in [-1e-9, 0) are clipped to 0,
// anything lower raises NotPSD.
CMat psd_sqrt(const CMat& m);

// Moore-Penrose pseudo-inverse; singular values below rcond * sigma_max are dropped.
CMat pseudo_inverse(const CMat& m, double rcond = 1e-10);

// Row-major vectorization: vec(m)[r*cols + c] = m(r, c).
CVec vec_rm(const CMat& m);
CMat unvec_rm(const CVec& v, int rows, int cols);

}  // namespace qpt
