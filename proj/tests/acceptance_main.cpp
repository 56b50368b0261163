// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: nine numbered criteria, one [PASS]/[FAIL] line each,
// tolerances pinned inline. The exit code is the number of failed
// criteria. Two clauses probe known physical limits of the frozen
// channel family and geometry; when they fail, the analysis is printed
// alongside the measured values.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "qpt/io.hpp"
#include "test_util.hpp"

using namespace qpt;
namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return std::string(buf);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Gate {
  int failures = 0;

  void report(int idx, const std::string& name, bool pass,
              const std::vector<std::string>& notes) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", idx, name.c_str());
    for (const std::string& n : notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

DensityMatrix uniform_superposition(int d) {
  CVec v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(1.0 / std::sqrt(static_cast<double>(d)), 0);
  return density_from_pure(PureState(v));
}

DensityMatrix basis_state(int d, int l) {
  CVec v = CVec::Zero(d);
  v(l) = 1.0;
  return density_from_pure(PureState(v));
}

std::vector<CMat> scaled_ops(const std::vector<CMat>& raw, double scale) {
  std::vector<CMat> out;
  out.reserve(raw.size());
  for (const CMat& k : raw) out.push_back(scale * k);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in.good()) return std::string();
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QPTLAB_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

constexpr double kLambda = 405e-9;
constexpr double kPath = 500.0;
constexpr double kDx = 0.028 / 64.0;
constexpr double kStructureCoeff = 6.8838771823;

}  // namespace

int main() {
  Gate gate;

  // 1. Exact reconstruction round trip over the full channel grid.
  {
    Stopwatch sw;
    double worst = 1.0;
    std::string worst_label;
    int combos = 0;
    for (int d : {2, 3, 4, 5}) {
      std::vector<std::pair<std::string, KrausChannel>> channels;
      channels.emplace_back("AS uniform", shift_channel(d, ShiftKind::AS, ShiftWeights::uniform(d)));
      channels.emplace_back("AS about-zero",
                            shift_channel(d, ShiftKind::AS, ShiftWeights::uniform_about_zero(d)));
      channels.emplace_back("PS uniform", shift_channel(d, ShiftKind::PS, ShiftWeights::uniform(d)));
      channels.emplace_back("APS uniform",
                            shift_channel(d, ShiftKind::APS, ShiftWeights::uniform(d)));
      for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        channels.emplace_back(fmt("depolarizing p=%.2f", p), depolarizing_channel(d, p));
      }
      for (const auto& [label, ch] : channels) {
        const SqptRun run = run_sqpt(ch, std::nullopt, 1);
        const double pf = process_fidelity(run.chi, chi_from_kraus(ch));
        ++combos;
        if (pf < worst) {
          worst = pf;
          worst_label = fmt("d=%d %s", d, label.c_str());
        }
      }
    }
    const double elapsed = sw.seconds();
    const bool pass = combos == 36 && worst >= 1.0 - 1e-9 && elapsed < 30.0;
    gate.report(1, "exact process reconstruction round trip", pass,
                {fmt("%d combos, worst process fidelity %.12f (%s), threshold 1 - 1e-9", combos,
                     worst, worst_label.c_str()),
                 fmt("elapsed %.1f s, limit 30 s", elapsed)});
  }

  // 2. Output prediction agreement, exact and at 10^6 shots.
  {
    double worst_exact = 1.0, worst_sampled = 1.0;
    Rng rng(77);
    for (int variant = 0; variant < 2; ++variant) {
      const KrausChannel ch = variant == 0
                                  ? shift_channel(5, ShiftKind::AS, ShiftWeights::uniform(5))
                                  : depolarizing_channel(5, 0.3);
      const SqptRun exact = run_sqpt(ch, std::nullopt, 2);
      const SqptRun sampled = run_sqpt(ch, 1000000, 20260819);

      const PreparationBasis prep = preparation_basis(5);
      std::vector<DensityMatrix> inputs;
      for (const PureState& s : prep.states) inputs.push_back(density_from_pure(s));
      for (int t = 0; t < 20; ++t) inputs.push_back(testutil::random_density(5, rng));

      for (const DensityMatrix& rho : inputs) {
        const DensityMatrix truth = apply(ch, rho).state;
        worst_exact =
            std::min(worst_exact, fidelity(predict_output(exact.chi, rho).state, truth));
        worst_sampled =
            std::min(worst_sampled, fidelity(predict_output(sampled.chi, rho).state, truth));
      }
    }
    const bool pass = worst_exact >= 1.0 - 1e-8 && worst_sampled >= 0.99;
    gate.report(2, "output prediction agreement", pass,
                {fmt("exact pipeline: worst fidelity %.12f, threshold 1 - 1e-8", worst_exact),
                 fmt("10^6 shots per (preparation, basis): worst fidelity %.6f, threshold 0.99",
                     worst_sampled)});
  }

  // 3. Depolarizing purity curve on the uniform d=5 input.
  {
    const DensityMatrix rho_u = uniform_superposition(5);
    double worst_match = 0.0;
    std::vector<double> purities;
    for (int i = 0; i <= 10; ++i) {
      const double p = 0.1 * i;
      const KrausChannel ch = depolarizing_channel(5, p);
      const SqptRun run = run_sqpt(ch, std::nullopt, 3);
      const double p_chi = purity(predict_output(run.chi, rho_u).state);
      const double p_kraus = purity(apply(ch, rho_u).state);
      worst_match = std::max(worst_match, std::abs(p_chi - p_kraus));
      purities.push_back(p_chi);
    }
    const bool match_ok = worst_match <= 1e-6;
    const bool start_ok = std::abs(purities.front() - 1.0) <= 1e-9;
    int break_at = -1;
    for (std::size_t i = 0; i + 1 < purities.size(); ++i) {
      if (purities[i + 1] > purities[i] + 1e-12) break_at = static_cast<int>(i);
    }
    const bool pass = match_ok && start_ok && break_at < 0;
    std::vector<std::string> notes = {
        fmt("reconstruction vs operator-sum oracle: worst |dP| = %.3g, threshold 1e-6",
            worst_match),
        fmt("P(0) = %.12f", purities.front())};
    if (break_at >= 0) {
      notes.push_back(fmt("monotonicity clause violated: P(%.1f) = %.6f < P(%.1f) = %.6f",
                          0.1 * break_at, purities[break_at], 0.1 * (break_at + 1),
                          purities[break_at + 1]));
      notes.push_back(
          "known limit of the channel family: the off-diagonal survival factor is "
          "c(p) = 1 - 13p/12, which crosses zero at p = 12/13, so the purity "
          "1/5 + (4/5) c(p)^2 turns back up on the last interval; the curve itself "
          "still matches the operator-sum oracle at every p.");
    }
    gate.report(3, "depolarizing purity curve", pass, notes);
  }

  // 4. Unbiased basis validity.
  {
    double worst_prime = 0.0, worst_completeness = 0.0;
    for (int d : {2, 3, 5, 7}) {
      worst_prime = std::max(worst_prime, unbiasedness_check(build_mubs(d)));
    }
    const double dev4 = unbiasedness_check(build_mubs(4));
    for (int d : {2, 3, 4, 5, 7}) {
      const MubSet mubs = build_mubs(d);
      for (const auto& basis : mubs.bases) {
        CMat sum = CMat::Zero(d, d);
        for (const PureState& e : basis) sum += density_from_pure(e).matrix();
        worst_completeness =
            std::max(worst_completeness, (sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff());
      }
    }
    const bool pass = worst_prime < 1e-12 && dev4 < 1e-10 && worst_completeness < 1e-12;
    gate.report(4, "unbiased measurement bases", pass,
                {fmt("unbiasedness deviation: %.3g for d in {2,3,5,7} (threshold 1e-12), "
                     "%.3g for d = 4 (threshold 1e-10)",
                     worst_prime, dev4),
                 fmt("per-basis completeness deviation %.3g, threshold 1e-12",
                     worst_completeness)});
  }

  // 5. State tomography exactness on random inputs.
  {
    double worst = 0.0;
    Rng rng(101);
    for (int d : {2, 4, 5}) {
      const MubSet mubs = build_mubs(d);
      for (int t = 0; t < 50; ++t) {
        const DensityMatrix rho = testutil::random_density(d, rng);
        std::vector<MeasurementRecord> records;
        for (int b = 0; b <= d; ++b) {
          for (int k = 0; k < d; ++k) {
            records.push_back({0, b, k, projection_probability(rho, mubs.bases[b][k]), 0});
          }
        }
        const QstResult est = qst_linear_inversion(records, mubs);
        worst = std::max(worst, testutil::trace_distance(est.state.matrix(), rho.matrix()));
      }
    }
    const bool pass = worst < 1e-10;
    gate.report(5, "state tomography exactness", pass,
                {fmt("150 random states over d in {2,4,5}: worst trace distance %.3g, "
                     "threshold 1e-10",
                     worst)});
  }

  // Shared weak-turbulence ensemble (d = 4 slit channel, 500 masks).
  const SlitGeometry geom4 = SlitGeometry::standard(4);
  const TurbulenceParams weak_params =
      TurbulenceParams::from_altitude(647.0, kPath, kLambda, 512, kDx);
  std::vector<CMat> weak_diag_ops, weak_tilt_ops;
  {
    const auto screens = phase_screen_ensemble(weak_params, 500, 647001);
    for (const PhaseScreen& s : screens) {
      weak_diag_ops.push_back(slit_operator(s, geom4, SlitMode::DiagonalPhase, kPath, kLambda));
      weak_tilt_ops.push_back(slit_operator(s, geom4, SlitMode::TiltShift, kPath, kLambda));
    }
  }
  const double mask_scale = 1.0 / std::sqrt(500.0);
  const KrausChannel weak_diag(4, scaled_ops(weak_diag_ops, mask_scale));
  const KrausChannel weak_tilt(4, scaled_ops(weak_tilt_ops, mask_scale));

  // 6. Pre-channel state recovery through the reconstructed process.
  {
    const SqptRun run = run_sqpt(weak_diag, std::nullopt, 6);

    Rng rng(606);
    CVec psi(4);
    for (int l = 0; l < 4; ++l) psi(l) = 0.5 * std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    const DensityMatrix rho_in = density_from_pure(PureState(psi));
    const DensityMatrix rho_out = apply(weak_diag, rho_in).state;
    const double f_turb = fidelity(recover(run.chi, rho_out), rho_in);

    const CMat u = testutil::random_unitary(4, rng);
    const KrausChannel unitary_ch(4, {u});
    const SqptRun run_u = run_sqpt(unitary_ch, std::nullopt, 7);
    const DensityMatrix rho_in2 = testutil::random_density(4, rng);
    const DensityMatrix rho_out2 = apply(unitary_ch, rho_in2).state;
    const double f_unitary = fidelity(recover(run_u.chi, rho_out2), rho_in2);

    const bool pass = f_turb >= 0.99 && f_unitary >= 1.0 - 1e-8;
    gate.report(6, "pre-channel recovery", pass,
                {fmt("weak-turbulence diagonal-phase channel (500 masks): recovered fidelity "
                     "%.6f, threshold 0.99",
                     f_turb),
                 fmt("unitary channel: recovered fidelity %.12f, threshold 1 - 1e-8",
                     f_unitary)});
  }

  // 7. Turbulence statistics against the Kolmogorov structure law.
  {
    Stopwatch sw;
    const TurbulenceParams p = TurbulenceParams::from_altitude(174.0, kPath, kLambda, 512, kDx);
    const auto screens = phase_screen_ensemble(p, 200, 174202);
    std::vector<double> seps;
    for (int px : {4, 6, 8, 12, 16, 24, 32, 48, 64}) seps.push_back(px * kDx);
    const std::vector<double> d_est = structure_function(screens, seps);

    double worst_lo = 1.0, worst_hi = 1.0;
    for (std::size_t i = 0; i < seps.size(); ++i) {
      const double ratio =
          d_est[i] / (kStructureCoeff * std::pow(seps[i] / p.fried_r0, 5.0 / 3.0));
      worst_lo = std::min(worst_lo, ratio);
      worst_hi = std::max(worst_hi, ratio);
    }
    const double exponent = fit_power_exponent(seps, d_est);
    const double elapsed = sw.seconds();
    const bool pass = worst_lo >= 0.9 && worst_hi <= 1.1 && exponent >= 1.5 &&
                      exponent <= 1.83 && elapsed < 60.0;
    gate.report(7, "turbulence structure statistics", pass,
                {fmt("200 screens at N = 512, r0 = %.4f m: structure ratios in [%.3f, %.3f], "
                     "band [0.9, 1.1] for r in [4, 64] pixels",
                     p.fried_r0, worst_lo, worst_hi),
                 fmt("fitted log-log exponent %.3f, band [1.5, 1.83] (5/3 = 1.667)", exponent),
                 fmt("elapsed %.1f s, limit 60 s", elapsed)});
  }

  // 8. Strong and weak regime phenomenology on the d = 4 slit channel.
  {
    const TurbulenceParams strong_params =
        TurbulenceParams::from_altitude(174.0, kPath, kLambda, 512, kDx);
    std::vector<CMat> strong_tilt_ops;
    {
      const auto screens = phase_screen_ensemble(strong_params, 500, 174500);
      for (const PhaseScreen& s : screens) {
        strong_tilt_ops.push_back(slit_operator(s, geom4, SlitMode::TiltShift, kPath, kLambda));
      }
    }
    const KrausChannel strong_tilt(4, scaled_ops(strong_tilt_ops, mask_scale));

    const DensityMatrix rho_u = uniform_superposition(4);
    const DensityMatrix rho_1 = basis_state(4, 1);

    const double strong_purity = purity(apply(strong_tilt, rho_u).state);
    const CMat strong_out1 = apply(strong_tilt, rho_1).state.matrix();
    double strong_crosstalk = 0.0;
    for (int l = 0; l < 4; ++l) {
      if (l != 1) strong_crosstalk = std::max(strong_crosstalk, strong_out1(l, l).real());
    }

    const CMat weak_out1 = apply(weak_tilt, rho_1).state.matrix();
    double weak_crosstalk = 0.0;
    for (int l = 0; l < 4; ++l) {
      if (l != 1) weak_crosstalk = std::max(weak_crosstalk, weak_out1(l, l).real());
    }

    const CMat weak_out_u = apply(weak_diag, rho_u).state.matrix();
    const double c01 = std::abs(weak_out_u(0, 1));
    const double c02 = std::abs(weak_out_u(0, 2));
    const double c03 = std::abs(weak_out_u(0, 3));
    const bool point_ordered = c01 >= c02 && c02 >= c03;

    Rng boot(808);
    int ordered = 0;
    const int resamples = 200;
    const int n_masks = static_cast<int>(weak_diag_ops.size());
    for (int b = 0; b < resamples; ++b) {
      CMat acc = CMat::Zero(4, 4);
      for (int i = 0; i < n_masks; ++i) {
        const CMat& k = weak_diag_ops[static_cast<std::size_t>(boot.next_u64() %
                                                               static_cast<std::uint64_t>(n_masks))];
        acc += k * rho_u.matrix() * k.adjoint();
      }
      const double b01 = std::abs(acc(0, 1));
      const double b02 = std::abs(acc(0, 2));
      const double b03 = std::abs(acc(0, 3));
      if (b01 >= b02 && b02 >= b03) ++ordered;
    }
    const double boot_frac = static_cast<double>(ordered) / resamples;

    const bool purity_ok = strong_purity <= 0.4;
    const bool strong_ct_ok = strong_crosstalk >= 0.02;
    const bool weak_ct_ok = weak_crosstalk <= 1e-3;
    const bool order_ok = point_ordered && boot_frac >= 0.95;
    const bool pass = purity_ok && strong_ct_ok && weak_ct_ok && order_ok;

    std::vector<std::string> notes = {
        fmt("strong regime (r0 = %.4f m, tilt-shift): output purity %.4f, threshold <= 0.4",
            strong_params.fried_r0, strong_purity),
        fmt("strong regime crosstalk for input |1>: max off-population %.3g, threshold >= 0.02%s",
            strong_crosstalk, strong_ct_ok ? "" : "  <-- violated"),
        fmt("weak regime crosstalk: %.3g, threshold <= 1e-3", weak_crosstalk),
        fmt("weak coherences |rho_01| = %.4f >= |rho_02| = %.4f >= |rho_03| = %.4f; "
            "ordering held in %.1f%% of 200 bootstrap resamples (threshold 95%%)",
            c01, c02, c03, 100.0 * boot_frac)};
    if (!strong_ct_ok) {
      notes.push_back(
          "known limit of the frozen geometry: with r0 = 4.7 cm the tilt-induced "
          "far-field displacement spreads over ~3 mm, two orders below the 28 mm "
          "slit pitch, so the rounded slit shift is almost always zero. Raising the "
          "displacement past one pitch needs a pitch below ~1.3 cm, while keeping the "
          "measured purity at the strong-regime level needs a pitch above ~1.75 cm; "
          "no slit spacing satisfies both clauses, and the geometry here is frozen to "
          "reproduce the purity phenomenology.");
    }
    gate.report(8, "turbulence regime phenomenology", pass, notes);
  }

  // 9. Seeded commands re-run byte-identically.
  {
    const fs::path base = fs::temp_directory_path() / "qptlab_acceptance";
    fs::remove_all(base);
    std::vector<std::string> problems;

    const auto pair_dirs = [&](const std::string& tag) {
      const fs::path a = base / (tag + "_a");
      const fs::path b = base / (tag + "_b");
      fs::create_directories(a);
      fs::create_directories(b);
      return std::make_pair(a, b);
    };
    const auto compare = [&](const fs::path& a, const fs::path& b,
                             const std::vector<std::string>& names, const std::string& tag) {
      for (const std::string& n : names) {
        const std::string ba = slurp(a / n);
        if (ba.empty()) problems.push_back(tag + ": missing or empty " + n);
        if (ba != slurp(b / n)) problems.push_back(tag + ": " + n + " differs between runs");
      }
    };

    {
      const auto [a, b] = pair_dirs("gen");
      const std::string args =
          "gen-channel --kind turbulence --d 4 --altitude 174 --L 500 --lambda 405e-9 "
          "--N 256 --dx 4.375e-4 --n-masks 20 --seed 42 --out ch --out-dir ";
      if (run_cli(args + a.string()) != 0) problems.push_back("gen-channel run 1 failed");
      if (run_cli(args + b.string()) != 0) problems.push_back("gen-channel run 2 failed");
      compare(a, b, {"ch.kraus.json", "ch.chi.json"}, "gen-channel");
    }
    {
      const auto [a, b] = pair_dirs("run");
      const std::string args =
          "run-qpt --kind depolarizing --d 3 --p 0.25 --shots 100000 --seed 7 --out-dir ";
      if (run_cli(args + a.string()) != 0) problems.push_back("run-qpt run 1 failed");
      if (run_cli(args + b.string()) != 0) problems.push_back("run-qpt run 2 failed");
      compare(a, b, {"records.csv", "chi.json", "report.json"}, "run-qpt");
    }
    {
      const auto [a, b] = pair_dirs("scr");
      const std::string args =
          "turb-screens --altitude 174 --L 500 --lambda 405e-9 --N 256 --dx 4.375e-4 "
          "--count 3 --seed 9 --out-dir ";
      if (run_cli(args + a.string()) != 0) problems.push_back("turb-screens run 1 failed");
      if (run_cli(args + b.string()) != 0) problems.push_back("turb-screens run 2 failed");
      compare(a, b,
              {"screen_000.raw", "screen_001.raw", "screen_002.raw", "screen_000.pgm",
               "screen_001.pgm", "screen_002.pgm", "structure.csv"},
              "turb-screens");
    }
    {
      const auto [a, b] = pair_dirs("rec");
      CMat rho = CMat::Zero(3, 3);
      rho(0, 0) = 0.5;
      rho(1, 1) = 0.3;
      rho(2, 2) = 0.2;
      write_matrix_file((base / "rho.json").string(), "density", rho);
      const std::string chi_path = (base / "run_a" / "chi.json").string();
      const std::string args = "recover --chi " + chi_path + " --rho-out " +
                               (base / "rho.json").string() + " --out rec.json --out-dir ";
      if (run_cli(args + a.string()) != 0) problems.push_back("recover run 1 failed");
      if (run_cli(args + b.string()) != 0) problems.push_back("recover run 2 failed");
      compare(a, b, {"rec.json"}, "recover");
    }

    std::vector<std::string> notes = {
        "four seeded command pairs (gen-channel, run-qpt, turb-screens, recover) "
        "re-run into fresh directories and compared byte for byte"};
    for (const std::string& p : problems) notes.push_back(p);
    gate.report(9, "seeded determinism", problems.empty(), notes);
  }

  std::printf("%d of 9 criteria passed\n", 9 - gate.failures);
  return gate.failures;
}
