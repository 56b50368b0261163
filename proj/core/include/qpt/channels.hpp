// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "qpt/numkernel.hpp"
#include "qpt/qudit.hpp"

namespace qpt {

enum class Pauli { X, Y, Z };

// AS flips slit labels (sigma_x), PS flips relative phases (sigma_z),
// APS does both (sigma_y).
enum class ShiftKind { AS, PS, APS };

// Two-level Pauli embedded into the (nu, alpha) plane of a d-level system.
CMat embed_pauli(int d, int nu, int alpha, Pauli x);

struct PairWeight {
  int nu;
  int alpha;
  double p;
};

struct ShiftWeights {
  double identity = 1.0;
  std::vector<PairWeight> pairs;

  // Equal weight 1/(1 + C(d,2)) on the identity and every nu < alpha pair.
  static ShiftWeights uniform(int d);
  // Equal weight 1/d on the identity and on pairs (0, alpha) only.
  static ShiftWeights uniform_about_zero(int d);
};

// Operator-sum channel. Construction verifies sum E†E <= 1 (largest
// eigenvalue at most 1 + 1e-9) and records whether the sum equals the
// identity within 1e-9.
class KrausChannel {
 public:
  KrausChannel(int dim, std::vector<CMat> operators,
               std::optional<std::vector<double>> weights = std::nullopt);

  int dim() const { return dim_; }
  const std::vector<CMat>& operators() const { return ops_; }
  const std::optional<std::vector<double>>& weights() const { return weights_; }
  bool trace_preserving() const { return trace_preserving_; }
  // max |sum E†E - I| entry.
  double completeness_defect() const { return completeness_defect_; }

 private:
  int dim_;
  std::vector<CMat> ops_;
  std::optional<std::vector<double>> weights_;
  bool trace_preserving_;
  double completeness_defect_;
};

KrausChannel identity_channel(int d);
KrausChannel shift_channel(int d, ShiftKind kind, const ShiftWeights& w);
// (1-p) rho + p/(3(d-1)) sum over sigma in {x,y,z} and nu < alpha.
KrausChannel depolarizing_channel(int d, double p);

// Raw operator sum, no renormalization; trace equals the channel throughput.
CMat apply_raw(const KrausChannel& ch, const CMat& rho);

struct ApplyResult {
  DensityMatrix state;  // renormalized output
  double throughput;    // trace of the raw operator sum
};

ApplyResult apply(const KrausChannel& ch, const DensityMatrix& rho);

// d^2 x d^2 process matrix over the matrix-unit basis A[a*d+b] = |a><b|.
// Hermiticity is enforced; the smallest eigenvalue is recorded so noisy
// reconstructions stay representable while PSD-requiring consumers can check.
class ChiMatrix {
 public:
  ChiMatrix(int dim, CMat m);

  int dim() const { return dim_; }
  const CMat& matrix() const { return m_; }
  double min_eigenvalue() const { return min_eig_; }

 private:
  int dim_;
  CMat m_;
  double min_eig_;
};

ChiMatrix chi_from_kraus(const KrausChannel& ch);
// Eigendecomposition of chi; eigenvalues in [-1e-8, 0) are clipped, lower
// values raise NotPSD.
KrausChannel kraus_from_chi(const ChiMatrix& chi);

}  // namespace qpt
