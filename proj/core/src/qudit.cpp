// SPDX-License-Identifier: Apache-2.0
#include "qpt/qudit.hpp"

#include <algorithm>
#include <cmath>

namespace qpt {

PureState::PureState(CVec amplitudes) : a_(std::move(amplitudes)) {
  if (a_.size() < 1) throw InvalidState("pure state needs at least one amplitude");
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < a_.size(); ++i) {
    if (!std::isfinite(a_(i).real()) || !std::isfinite(a_(i).imag()))
      throw InvalidState("pure state has non-finite amplitude");
    norm2 += std::norm(a_(i));
  }
  if (std::abs(norm2 - 1.0) > 1e-12) throw InvalidState("pure state is not normalized within 1e-12");
}

DensityMatrix::DensityMatrix(CMat rho) : m_(std::move(rho)) {
  if (m_.rows() != m_.cols()) throw NotSquare("density matrix must be square");
  if (!all_finite(m_)) throw InvalidState("density matrix has non-finite entries");
  if (hermitian_deviation(m_) > 1e-10) throw NotHermitian("density matrix is not Hermitian within 1e-10");
  cplx tr = m_.trace();
  if (std::abs(tr - cplx(1.0, 0.0)) > 1e-10) throw InvalidState("density matrix trace is not 1 within 1e-10");
  EigResult eig = hermitian_eig(m_);
  if (eig.values(eig.values.size() - 1) < -1e-9)
    throw NotPSD("density matrix has an eigenvalue below -1e-9");
}

DensityMatrix density_from_pure(const PureState& psi) {
  const CVec& a = psi.amplitudes();
  CMat rho = a * a.adjoint();
  return DensityMatrix(std::move(rho));
}

double fidelity_raw(const CMat& a, const CMat& b) {
  CMat ra = psd_sqrt(a);
  CMat inner = ra * b * ra;
  CMat root = psd_sqrt((inner + inner.adjoint()) / 2.0);
  double f = root.trace().real();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("fidelity: dimension mismatch");
  return fidelity_raw(a.matrix(), b.matrix());
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double projection_probability(const DensityMatrix& rho, const PureState& phi) {
  if (rho.dim() != phi.dim()) throw DimensionMismatch("projection_probability: dimension mismatch");
  cplx v = (phi.amplitudes().adjoint() * rho.matrix() * phi.amplitudes())(0, 0);
  return std::clamp(v.real(), 0.0, 1.0);
}

}  // namespace qpt
