// SPDX-License-Identifier: Apache-2.0
#include "qpt/channels.hpp"

#include <cmath>
#include <set>
#include <utility>

namespace qpt {

CMat embed_pauli(int d, int nu, int alpha, Pauli x) {
  if (!(0 <= nu && nu < alpha && alpha < d))
    throw BadIndices("embed_pauli requires 0 <= nu < alpha <= d-1");
  CMat m = CMat::Zero(d, d);
  switch (x) {
    case Pauli::X:
      m(nu, alpha) = 1.0;
      m(alpha, nu) = 1.0;
      break;
    case Pauli::Y:
      m(nu, alpha) = cplx(0.0, -1.0);
      m(alpha, nu) = cplx(0.0, 1.0);
      break;
    case Pauli::Z:
      m(nu, nu) = 1.0;
      m(alpha, alpha) = -1.0;
      break;
  }
  return m;
}

ShiftWeights ShiftWeights::uniform(int d) {
  if (d < 2) throw BadIndices("shift weights need d >= 2");
  int npairs = d * (d - 1) / 2;
  double p = 1.0 / (1.0 + npairs);
  ShiftWeights w;
  w.identity = p;
  for (int nu = 0; nu < d; ++nu)
    for (int alpha = nu + 1; alpha < d; ++alpha) w.pairs.push_back({nu, alpha, p});
  return w;
}

ShiftWeights ShiftWeights::uniform_about_zero(int d) {
  if (d < 2) throw BadIndices("shift weights need d >= 2");
  double p = 1.0 / d;
  ShiftWeights w;
  w.identity = p;
  for (int alpha = 1; alpha < d; ++alpha) w.pairs.push_back({0, alpha, p});
  return w;
}

KrausChannel::KrausChannel(int dim, std::vector<CMat> operators,
                           std::optional<std::vector<double>> weights)
    : dim_(dim), ops_(std::move(operators)), weights_(std::move(weights)) {
  if (dim_ < 1) throw InvalidChannel("channel dimension must be positive");
  if (ops_.empty()) throw InvalidChannel("channel needs at least one Kraus operator");
  for (const CMat& e : ops_) {
    if (e.rows() != dim_ || e.cols() != dim_)
      throw DimensionMismatch("Kraus operator shape does not match channel dimension");
    if (!all_finite(e)) throw InvalidChannel("Kraus operator has non-finite entries");
  }
  CMat sum = CMat::Zero(dim_, dim_);
  for (const CMat& e : ops_) sum += e.adjoint() * e;
  EigResult eig = hermitian_eig((sum + sum.adjoint()) / 2.0);
  if (eig.values(0) > 1.0 + 1e-9)
    throw InvalidChannel("sum E†E exceeds the identity: largest eigenvalue > 1 + 1e-9");
  completeness_defect_ = (sum - CMat::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
  trace_preserving_ = completeness_defect_ <= 1e-9;
}

KrausChannel identity_channel(int d) {
  std::vector<CMat> ops;
  ops.push_back(CMat::Identity(d, d));
  return KrausChannel(d, std::move(ops), std::vector<double>{1.0});
}

KrausChannel shift_channel(int d, ShiftKind kind, const ShiftWeights& w) {
  Pauli sigma = kind == ShiftKind::AS ? Pauli::X : (kind == ShiftKind::PS ? Pauli::Z : Pauli::Y);
  double total = w.identity;
  if (w.identity < 0.0) throw BadWeights("identity weight must be nonnegative");
  std::set<std::pair<int, int>> seen;
  for (const PairWeight& pw : w.pairs) {
    if (pw.p < 0.0) throw BadWeights("pair weight must be nonnegative");
    if (!(0 <= pw.nu && pw.nu < pw.alpha && pw.alpha < d))
      throw BadIndices("pair weight indices must satisfy 0 <= nu < alpha <= d-1");
    if (!seen.insert({pw.nu, pw.alpha}).second) throw BadWeights("duplicate pair weight");
    total += pw.p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw BadWeights("weights must sum to 1 within 1e-12");

  std::vector<CMat> ops;
  std::vector<double> probs;
  ops.push_back(std::sqrt(w.identity) * CMat::Identity(d, d));
  probs.push_back(w.identity);
  for (const PairWeight& pw : w.pairs) {
    ops.push_back(std::sqrt(pw.p) * embed_pauli(d, pw.nu, pw.alpha, sigma));
    probs.push_back(pw.p);
  }
  return KrausChannel(d, std::move(ops), std::move(probs));
}

KrausChannel depolarizing_channel(int d, double p) {
  if (d < 2) throw BadIndices("depolarizing channel needs d >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw BadProbability("depolarizing probability must lie in [0, 1]");
  double q = p / (3.0 * (d - 1));
  std::vector<CMat> ops;
  std::vector<double> probs;
  ops.push_back(std::sqrt(1.0 - p) * CMat::Identity(d, d));
  probs.push_back(1.0 - p);
  for (Pauli sigma : {Pauli::X, Pauli::Y, Pauli::Z}) {
    for (int nu = 0; nu < d; ++nu) {
      for (int alpha = nu + 1; alpha < d; ++alpha) {
        ops.push_back(std::sqrt(q) * embed_pauli(d, nu, alpha, sigma));
        probs.push_back(q);
      }
    }
  }
  return KrausChannel(d, std::move(ops), std::move(probs));
}

CMat apply_raw(const KrausChannel& ch, const CMat& rho) {
  if (rho.rows() != ch.dim() || rho.cols() != ch.dim())
    throw DimensionMismatch("apply: state dimension does not match channel");
  CMat out = CMat::Zero(ch.dim(), ch.dim());
  for (const CMat& e : ch.operators()) out += e * rho * e.adjoint();
  return (out + out.adjoint()) / 2.0;
}

ApplyResult apply(const KrausChannel& ch, const DensityMatrix& rho) {
  CMat out = apply_raw(ch, rho.matrix());
  double tr = out.trace().real();
  if (tr < 1e-12) throw ZeroTrace("channel output trace is below 1e-12");
  return ApplyResult{DensityMatrix(out / tr), tr};
}

ChiMatrix::ChiMatrix(int dim, CMat m) : dim_(dim), m_(std::move(m)) {
  const int n = dim_ * dim_;
  if (m_.rows() != n || m_.cols() != n)
    throw DimensionMismatch("chi matrix must be d^2 x d^2");
  if (!all_finite(m_)) throw InvalidChannel("chi matrix has non-finite entries");
  if (hermitian_deviation(m_) > 1e-9) throw NotHermitian("chi matrix is not Hermitian within 1e-9");
  m_ = (m_ + m_.adjoint()) / 2.0;
  EigResult eig = hermitian_eig(m_);
  min_eig_ = eig.values(eig.values.size() - 1);
}

ChiMatrix chi_from_kraus(const KrausChannel& ch) {
  const int n = ch.dim() * ch.dim();
  CMat chi = CMat::Zero(n, n);
  for (const CMat& e : ch.operators()) {
    CVec v = vec_rm(e);
    chi += v * v.adjoint();
  }
  return ChiMatrix(ch.dim(), std::move(chi));
}

KrausChannel kraus_from_chi(const ChiMatrix& chi) {
  const int d = chi.dim();
  EigResult eig = hermitian_eig(chi.matrix());
  std::vector<CMat> ops;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    double lam = eig.values(i);
    if (lam < -1e-8) throw NotPSD("chi matrix eigenvalue below -1e-8");
    if (lam <= 0.0) continue;
    CVec col = eig.vectors.col(i);
    ops.push_back(std::sqrt(lam) * unvec_rm(col, d, d));
  }
  if (ops.empty()) ops.push_back(CMat::Zero(d, d));
  return KrausChannel(d, std::move(ops));
}

}  // namespace qpt
