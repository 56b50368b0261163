// SPDX-License-Identifier: Apache-2.0
#include "qpt/tomography.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "qpt/rng.hpp"

namespace qpt {

namespace {

int pair_index(int d, int j, int k) {
  // lex position of (j, k), j < k, among all ascending pairs
  return j * d - j * (j + 1) / 2 + (k - j - 1);
}

CMat density_of(const PureState& s) {
  return s.amplitudes() * s.amplitudes().adjoint();
}

}  // namespace

PreparationBasis preparation_basis(int d) {
  if (d < 2) throw BadIndices("preparation basis needs d >= 2");
  const int npairs = d * (d - 1) / 2;
  const int n = d * d;
  const double r = 1.0 / std::sqrt(2.0);

  PreparationBasis prep;
  prep.dim = d;
  prep.states.reserve(n);
  for (int k = 0; k < d; ++k) {
    CVec v = CVec::Zero(d);
    v(k) = 1.0;
    prep.states.emplace_back(std::move(v));
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      CVec v = CVec::Zero(d);
      v(j) = r;
      v(k) = r;
      prep.states.emplace_back(std::move(v));
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      CVec v = CVec::Zero(d);
      v(j) = r;
      v(k) = cplx(0.0, r);
      prep.states.emplace_back(std::move(v));
    }
  }

  prep.expansion = CMat::Zero(n, n);
  const cplx half_1i(0.5, 0.5);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      int row = k * d + l;
      if (k == l) {
        prep.expansion(row, k) = 1.0;
      } else if (k < l) {
        int pi = pair_index(d, k, l);
        prep.expansion(row, d + pi) = 1.0;
        prep.expansion(row, d + npairs + pi) = cplx(0.0, 1.0);
        prep.expansion(row, k) = -half_1i;
        prep.expansion(row, l) = -half_1i;
      } else {
        int pi = pair_index(d, l, k);
        prep.expansion(row, d + pi) = 1.0;
        prep.expansion(row, d + npairs + pi) = cplx(0.0, -1.0);
        prep.expansion(row, k) = -std::conj(half_1i);
        prep.expansion(row, l) = -std::conj(half_1i);
      }
    }
  }

  // The coefficients are analytic; verify the reconstruction is exact and
  // the prepared set is well conditioned as a basis.
  std::vector<CMat> densities;
  densities.reserve(n);
  for (const PureState& s : prep.states) densities.push_back(density_of(s));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      CMat unit = CMat::Zero(d, d);
      unit(k, l) = 1.0;
      CMat combo = CMat::Zero(d, d);
      for (int j = 0; j < n; ++j) combo += prep.expansion(k * d + l, j) * densities[j];
      if ((combo - unit).cwiseAbs().maxCoeff() > 1e-12)
        throw IllConditioned("preparation expansion does not reproduce the matrix units");
    }
  }
  CMat basis_mat(n, n);
  for (int j = 0; j < n; ++j) basis_mat.col(j) = vec_rm(densities[j]);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis_mat);
  double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  if (!(cond < 1e6)) throw IllConditioned("prepared states are not a usable basis");
  return prep;
}

std::vector<MeasurementRecord> simulate_measurements(const KrausChannel& ch,
                                                     const PreparationBasis& prep,
                                                     const MubSet& mubs,
                                                     std::optional<long long> shots,
                                                     std::uint64_t seed) {
  const int d = ch.dim();
  if (prep.dim != d || mubs.dim != d)
    throw DimensionMismatch("simulate_measurements: dimension mismatch");
  if (shots && *shots < 1) throw BadProbability("shot count must be at least 1");

  const int nbases = static_cast<int>(mubs.bases.size());
  std::vector<MeasurementRecord> records;
  records.reserve(static_cast<size_t>(d * d) * nbases * d);

  for (int p = 0; p < d * d; ++p) {
    CMat out = apply_raw(ch, density_of(prep.states[p]));
    for (int b = 0; b < nbases; ++b) {
      std::vector<double> probs(d);
      double total = 0.0;
      for (int k = 0; k < d; ++k) {
        const CVec& e = mubs.bases[b][k].amplitudes();
        double v = (e.adjoint() * out * e)(0, 0).real();
        probs[k] = std::clamp(v, 0.0, 1.0);
        total += probs[k];
      }
      if (!shots) {
        for (int k = 0; k < d; ++k)
          records.push_back({p, b, k, probs[k], 0});
        continue;
      }
      if (total < 1e-12) throw ZeroTrace("all outcome probabilities vanish for a basis");
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(p) * 1024 + b));
      std::vector<double> cdf(d);
      double acc = 0.0;
      for (int k = 0; k < d; ++k) {
        acc += probs[k] / total;
        cdf[k] = acc;
      }
      cdf[d - 1] = 1.0;
      std::vector<long long> counts(d, 0);
      for (long long s = 0; s < *shots; ++s) {
        double u = rng.uniform();
        int k = 0;
        while (cdf[k] <= u) ++k;
        ++counts[k];
      }
      for (int k = 0; k < d; ++k)
        records.push_back({p, b, k, static_cast<double>(counts[k]) / static_cast<double>(*shots),
                           *shots});
    }
  }
  return records;
}

namespace {

// Spectrum projection onto the probability simplex; input trace-normalized.
CMat simplex_project(const CMat& herm) {
  EigResult eig = hermitian_eig(herm);
  RVec lam = eig.values;
  const Eigen::Index n = lam.size();
  while (true) {
    double deficit = 0.0;
    bool any_negative = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam(i) < 0.0) {
        deficit += lam(i);
        lam(i) = 0.0;
        any_negative = true;
      }
    }
    if (!any_negative) break;
    Eigen::Index positive = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (lam(i) > 0.0) ++positive;
    if (positive == 0) break;
    double shift = deficit / static_cast<double>(positive);
    for (Eigen::Index i = 0; i < n; ++i)
      if (lam(i) > 0.0) lam(i) += shift;
  }
  double total = lam.sum();
  if (total <= 0.0) throw ZeroTrace("simplex projection collapsed the spectrum");
  lam /= total;
  CMat scaled = eig.vectors;
  for (Eigen::Index c = 0; c < n; ++c) scaled.col(c) *= lam(c);
  CMat out = scaled * eig.vectors.adjoint();
  return (out + out.adjoint()) / 2.0;
}

CMat make_physical_raw(const CMat& raw) {
  if (hermitian_deviation(raw) > 1e-8)
    throw NotHermitian("make_physical input is not Hermitian within 1e-8");
  CMat herm = (raw + raw.adjoint()) / 2.0;
  double tr = herm.trace().real();
  if (std::abs(tr) < 1e-12) throw ZeroTrace("make_physical input has vanishing trace");
  return simplex_project(herm / tr);
}

}  // namespace

DensityMatrix make_physical(const CMat& raw) {
  return DensityMatrix(make_physical_raw(raw));
}

QstResult qst_linear_inversion(const std::vector<MeasurementRecord>& prep_records,
                               const MubSet& mubs) {
  const int d = mubs.dim;
  const int nbases = static_cast<int>(mubs.bases.size());
  std::vector<char> seen(static_cast<size_t>(nbases) * d, 0);
  CMat acc = CMat::Zero(d, d);
  double total = 0.0;
  for (const MeasurementRecord& r : prep_records) {
    if (r.basis < 0 || r.basis >= nbases || r.outcome < 0 || r.outcome >= d)
      throw IncompleteRecords("record indexes an unknown projector");
    size_t slot = static_cast<size_t>(r.basis) * d + r.outcome;
    if (seen[slot]) throw IncompleteRecords("duplicate record for a projector");
    seen[slot] = 1;
    const CVec& e = mubs.bases[r.basis][r.outcome].amplitudes();
    acc += r.probability * (e * e.adjoint());
    total += r.probability;
  }
  for (char s : seen)
    if (!s) throw IncompleteRecords("missing projector record");

  double t_hat = total / (nbases);  // nbases == d + 1
  CMat raw = acc - t_hat * CMat::Identity(d, d);
  double tr = raw.trace().real();
  if (tr < 1e-12) throw ZeroTrace("reconstructed state has vanishing trace");
  return QstResult{make_physical(raw), tr, raw};
}

SqptEstimate sqpt(const std::vector<CMat>& raw_outputs, const PreparationBasis& prep) {
  const int d = prep.dim;
  const int n = d * d;
  if (static_cast<int>(raw_outputs.size()) != n)
    throw MissingOutputs("sqpt needs one output per preparation state");
  for (const CMat& m : raw_outputs)
    if (m.rows() != d || m.cols() != d)
      throw DimensionMismatch("sqpt output has wrong shape");

  CMat chi(n, n);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      CMat unit_out = CMat::Zero(d, d);
      for (int j = 0; j < n; ++j) {
        cplx c = prep.expansion(k * d + l, j);
        if (c != cplx(0.0, 0.0)) unit_out += c * raw_outputs[j];
      }
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) chi(i * d + k, j * d + l) = unit_out(i, j);
    }
  }
  double residual = ((chi - chi.adjoint()) / 2.0).norm();
  CMat herm = (chi + chi.adjoint()) / 2.0;
  return SqptEstimate{ChiMatrix(d, std::move(herm)), residual};
}

SqptEstimate sqpt(const std::vector<DensityMatrix>& outputs, const PreparationBasis& prep) {
  std::vector<CMat> raw;
  raw.reserve(outputs.size());
  for (const DensityMatrix& m : outputs) raw.push_back(m.matrix());
  return sqpt(raw, prep);
}

SqptRun run_sqpt(const KrausChannel& ch, std::optional<long long> shots, std::uint64_t seed) {
  const int d = ch.dim();
  PreparationBasis prep = preparation_basis(d);
  MubSet mubs = build_mubs(d);
  std::vector<MeasurementRecord> records = simulate_measurements(ch, prep, mubs, shots, seed);

  const int per_prep = static_cast<int>(mubs.bases.size()) * d;
  std::vector<QstResult> outputs;
  std::vector<CMat> raws;
  outputs.reserve(d * d);
  raws.reserve(d * d);
  for (int p = 0; p < d * d; ++p) {
    std::vector<MeasurementRecord> slice(records.begin() + static_cast<size_t>(p) * per_prep,
                                         records.begin() + static_cast<size_t>(p + 1) * per_prep);
    QstResult qst = qst_linear_inversion(slice, mubs);
    raws.push_back(qst.raw);
    outputs.push_back(std::move(qst));
  }
  SqptEstimate est = sqpt(raws, prep);
  return SqptRun{std::move(est.chi), est.anti_hermitian_residual, std::move(records),
                 std::move(outputs)};
}

TransferMatrix transfer_from_chi(const ChiMatrix& chi) {
  const int d = chi.dim();
  CMat t(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) t(i * d + j, k * d + l) = chi.matrix()(i * d + k, j * d + l);
  return TransferMatrix{d, std::move(t)};
}

ApplyResult predict_output(const ChiMatrix& chi, const DensityMatrix& rho_in) {
  if (chi.dim() != rho_in.dim()) throw DimensionMismatch("predict_output: dimension mismatch");
  const int d = chi.dim();
  TransferMatrix t = transfer_from_chi(chi);
  CMat out = unvec_rm(t.matrix * vec_rm(rho_in.matrix()), d, d);
  out = (out + out.adjoint()) / 2.0;
  double tr = out.trace().real();
  if (tr < 1e-12) throw ZeroTrace("predicted output trace is below 1e-12");
  return ApplyResult{make_physical(out), tr};
}

DensityMatrix recover(const ChiMatrix& chi, const DensityMatrix& rho_out, double rcond,
                      bool strict, int* effective_rank) {
  if (chi.dim() != rho_out.dim()) throw DimensionMismatch("recover: dimension mismatch");
  if (!(rcond > 0.0 && rcond < 1.0)) throw BadConfig("rcond must lie in (0, 1)");
  const int d = chi.dim();
  const int n = d * d;
  TransferMatrix t = transfer_from_chi(chi);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() > 0 ? rcond * sv(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  if (effective_rank) *effective_rank = rank;
  if (strict && rank < n)
    throw SingularBeyondRecovery("transfer matrix is rank-deficient at the requested rcond");

  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  CMat pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();

  CMat in = unvec_rm(pinv * vec_rm(rho_out.matrix()), d, d);
  in = (in + in.adjoint()) / 2.0;
  double tr = in.trace().real();
  if (std::abs(tr) < 1e-12) throw ZeroTrace("recovered state has vanishing trace");
  return make_physical(in);
}

double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("process_fidelity: dimension mismatch");
  double tra = a.matrix().trace().real();
  double trb = b.matrix().trace().real();
  if (tra < 1e-12 || trb < 1e-12) throw ZeroTrace("chi matrix trace is below 1e-12");
  CMat choi_a = make_physical_raw(a.matrix() / tra);
  CMat choi_b = make_physical_raw(b.matrix() / trb);
  double f = fidelity_raw(choi_a, choi_b);
  return std::clamp(f * f, 0.0, 1.0);
}

}  // namespace qpt
