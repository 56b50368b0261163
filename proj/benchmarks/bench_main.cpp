// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "qpt/rng.hpp"
#include "qpt/tomography.hpp"
#include "qpt/turbulence.hpp"

namespace {

using namespace qpt;

CMat random_hermitian(int n, Rng& rng) {
  CMat g(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) g(r, c) = cplx(rng.normal(), rng.normal());
  }
  return 0.5 * (g + CMat(g.adjoint()));
}

void BM_HermitianEig(benchmark::State& state) {
  Rng rng(1);
  const CMat m = random_hermitian(64, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(m));
}
BENCHMARK(BM_HermitianEig);

void BM_PseudoInverse(benchmark::State& state) {
  Rng rng(2);
  CMat m(25, 25);
  for (int r = 0; r < 25; ++r) {
    for (int c = 0; c < 25; ++c) m(r, c) = cplx(rng.normal(), rng.normal());
  }
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_inverse(m));
}
BENCHMARK(BM_PseudoInverse);

void BM_ChiFromKraus(benchmark::State& state) {
  const KrausChannel ch = depolarizing_channel(5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(chi_from_kraus(ch));
}
BENCHMARK(BM_ChiFromKraus);

void BM_ExactSqpt(benchmark::State& state) {
  const KrausChannel ch = shift_channel(5, ShiftKind::AS, ShiftWeights::uniform(5));
  for (auto _ : state) benchmark::DoNotOptimize(run_sqpt(ch, std::nullopt, 1));
}
BENCHMARK(BM_ExactSqpt);

void BM_PhaseScreen(benchmark::State& state) {
  const TurbulenceParams p =
      TurbulenceParams::with_r0(0.05, 174.0, 500.0, 405e-9, static_cast<int>(state.range(0)),
                                0.028 / 64.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(phase_screen(p, ++seed));
}
BENCHMARK(BM_PhaseScreen)->Arg(256)->Arg(512);

void BM_SlitOperator(benchmark::State& state) {
  const TurbulenceParams p = TurbulenceParams::with_r0(0.05, 174.0, 500.0, 405e-9, 512,
                                                       0.028 / 64.0);
  const PhaseScreen s = phase_screen(p, 3);
  const SlitGeometry geom = SlitGeometry::standard(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(slit_operator(s, geom, SlitMode::TiltShift, 500.0, 405e-9));
  }
}
BENCHMARK(BM_SlitOperator);

}  // namespace

BENCHMARK_MAIN();
