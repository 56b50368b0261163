// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qpt/qudit.hpp"

namespace qpt {

// d+1 mutually unbiased orthonormal bases; bases[0] is computational.
struct MubSet {
  int dim;
  std::vector<std::vector<PureState>> bases;
};

// Supported dimensions: any prime, plus d = 4 (explicit table).
// Unbiasedness and per-basis orthonormality are re-verified numerically at
// build time; a failure there is an internal defect, not caller error.
MubSet build_mubs(int d);

// max over cross-basis pairs of | |<e_i^a|e_j^b>|^2 - 1/d |.
double unbiasedness_check(const MubSet& s);

// Rank-1 projectors in basis-major order: index b*d + k.
std::vector<DensityMatrix> mub_projectors(const MubSet& s);

}  // namespace qpt
