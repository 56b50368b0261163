// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qpt/numkernel.hpp"

namespace qpt {

// Normalized complex amplitude vector over the d slit basis elements.
class PureState {
 public:
  explicit PureState(CVec amplitudes);

  int dim() const { return static_cast<int>(a_.size()); }
  const CVec& amplitudes() const { return a_; }

 private:
  CVec a_;
};

// d x d Hermitian, unit-trace, PSD matrix; validated at construction.
// Near-violations coming out of noisy tomography must go through
// make_physical (tomography module) instead of being clamped here.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMat rho);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& matrix() const { return m_; }

 private:
  CMat m_;
};

DensityMatrix density_from_pure(const PureState& psi);

// Tr sqrt(sqrt(a) b sqrt(a)), clamped to [0, 1].
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

// Same formula on raw Hermitian PSD-within-noise matrices (no validation).
double fidelity_raw(const CMat& a, const CMat& b);

// Tr rho^2.
double purity(const DensityMatrix& rho);

// <phi| rho |phi>, clamped to [0, 1].
double projection_probability(const DensityMatrix& rho, const PureState& phi);

}  // namespace qpt
