// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "qpt/channels.hpp"
#include "qpt/mub.hpp"

namespace qpt {

// d^2 preparation states {|n>} + {(|j>+|k>)/sqrt2} + {(|j>+i|k>)/sqrt2},
// with analytic expansion of every matrix unit |k><l| over the prepared
// density matrices: row (k*d + l) of `expansion` holds the coefficients.
struct PreparationBasis {
  int dim;
  std::vector<PureState> states;
  CMat expansion;
};

PreparationBasis preparation_basis(int d);

// One projective outcome; shots == 0 marks an exact probability.
struct MeasurementRecord {
  int prep;
  int basis;
  int outcome;
  double probability;
  long long shots;
};

// Exact mode (shots == nullopt): probability = <e| E_raw(rho) |e>, the raw
// operator-sum value, so per-basis sums equal the channel throughput (1 for
// trace-preserving channels). Sampled mode: per-(prep, basis) multinomial
// with counts normalized per basis; streams are seeded per (prep, basis).
std::vector<MeasurementRecord> simulate_measurements(const KrausChannel& ch,
                                                     const PreparationBasis& prep,
                                                     const MubSet& mubs,
                                                     std::optional<long long> shots,
                                                     std::uint64_t seed);

struct QstResult {
  DensityMatrix state;  // make_physical applied to raw/throughput
  double throughput;    // trace of the raw estimate
  CMat raw;             // sum_bk p |e><e| - t_hat I, t_hat = (sum p)/(d+1)
};

// Linear inversion from one preparation's complete MUB record set.
QstResult qst_linear_inversion(const std::vector<MeasurementRecord>& prep_records,
                               const MubSet& mubs);

// Trace-renormalizes, then projects the spectrum onto the probability
// simplex by iterative negative-eigenvalue truncation with uniform
// redistribution over the remaining positive eigenvalues.
DensityMatrix make_physical(const CMat& raw);

struct SqptEstimate {
  ChiMatrix chi;
  double anti_hermitian_residual;  // Frobenius norm removed by hermitization
};

// chi[(i*d + k)][(j*d + l)] = <i| E(|k><l|) |j>, with E(|k><l|) combined
// linearly from the measured outputs via the preparation expansion.
// Raw (unnormalized) outputs keep sub-unital channels exactly linear.
SqptEstimate sqpt(const std::vector<CMat>& raw_outputs, const PreparationBasis& prep);
SqptEstimate sqpt(const std::vector<DensityMatrix>& outputs, const PreparationBasis& prep);

struct SqptRun {
  ChiMatrix chi;
  double anti_hermitian_residual;
  std::vector<MeasurementRecord> records;
  std::vector<QstResult> outputs;
};

// Full pipeline: simulate measurements, invert each preparation, fill chi.
SqptRun run_sqpt(const KrausChannel& ch, std::optional<long long> shots, std::uint64_t seed);

// Acts on row-major vectorized states: vec(rho_out) = T vec(rho_in);
// T[(i*d + j)][(k*d + l)] = chi[(i*d + k)][(j*d + l)].
struct TransferMatrix {
  int dim;
  CMat matrix;
};

TransferMatrix transfer_from_chi(const ChiMatrix& chi);

// Forward action of chi on a state (normalized, then made physical).
ApplyResult predict_output(const ChiMatrix& chi, const DensityMatrix& rho_in);

// Pre-channel state via the pseudo-inverse of the transfer matrix.
// strict mode raises SingularBeyondRecovery when the effective rank at
// rcond is below d^2; effective_rank reports it either way when non-null.
DensityMatrix recover(const ChiMatrix& chi, const DensityMatrix& rho_out, double rcond = 1e-3,
                      bool strict = false, int* effective_rank = nullptr);

// Squared state fidelity between the trace-normalized chi matrices viewed
// as Choi states (identity vs full-depolarizing gives 1/d^2).
double process_fidelity(const ChiMatrix& a, const ChiMatrix& b);

}  // namespace qpt
