// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "qpt/channels.hpp"
#include "test_util.hpp"

using namespace qpt;
using testutil::random_density;
using testutil::random_tp_channel;

namespace {

CMat sigma(Pauli x) {
  CMat m = CMat::Zero(2, 2);
  switch (x) {
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = cplx(0, -1);
      m(1, 0) = cplx(0, 1);
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

// Direct product oracle: G has row 0 = <nu|, row 1 = <alpha|.
CMat embed_oracle(int d, int nu, int alpha, Pauli x) {
  CMat g = CMat::Zero(2, d);
  g(0, nu) = 1.0;
  g(1, alpha) = 1.0;
  return g.adjoint() * sigma(x) * g;
}

CMat bitflip_chi(double p) {
  CMat chi = CMat::Zero(4, 4);
  chi(0, 0) = chi(0, 3) = chi(3, 0) = chi(3, 3) = 1.0 - p;
  chi(1, 1) = chi(1, 2) = chi(2, 1) = chi(2, 2) = p;
  return chi;
}

// Brute-force chi action: E(rho) = sum_mn chi_mn A_m rho A_n†.
CMat chi_action(const ChiMatrix& chi, const CMat& rho) {
  const int d = chi.dim();
  CMat out = CMat::Zero(d, d);
  for (int m = 0; m < d * d; ++m) {
    for (int n = 0; n < d * d; ++n) {
      const cplx c = chi.matrix()(m, n);
      if (std::abs(c) == 0.0) continue;
      // A_m = |a><b| picks row b of rho against column of A_n†.
      const int am = m / d, bm = m % d;
      const int an = n / d, bn = n % d;
      out(am, an) += c * rho(bm, bn);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("embed_pauli goldens") {
  CHECK((embed_pauli(2, 0, 1, Pauli::X) - sigma(Pauli::X)).norm() < 1e-15);

  const CMat z02 = embed_pauli(3, 0, 2, Pauli::Z);
  CHECK(std::abs(z02(0, 0) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(z02(1, 1)) < 1e-15);
  CHECK(std::abs(z02(2, 2) - cplx(-1, 0)) < 1e-15);

  const CMat x13 = embed_pauli(5, 1, 3, Pauli::X);
  CHECK(std::abs(x13(1, 3) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(x13(3, 1) - cplx(1, 0)) < 1e-15);
  CHECK(x13.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  for (Pauli x : {Pauli::X, Pauli::Y, Pauli::Z}) {
    CHECK((embed_pauli(5, 2, 4, x) - embed_oracle(5, 2, 4, x)).norm() < 1e-15);
  }
}

TEST_CASE("embed_pauli index validation") {
  CHECK_THROWS_AS(embed_pauli(3, 1, 1, Pauli::X), BadIndices);
  CHECK_THROWS_AS(embed_pauli(3, 2, 1, Pauli::X), BadIndices);
  CHECK_THROWS_AS(embed_pauli(3, 0, 3, Pauli::X), BadIndices);
  CHECK_THROWS_AS(embed_pauli(3, -1, 1, Pauli::X), BadIndices);
}

TEST_CASE("embedded Pauli E†E is the two-level projector") {
  for (Pauli x : {Pauli::X, Pauli::Y, Pauli::Z}) {
    const CMat e = embed_pauli(5, 1, 3, x);
    CMat proj = CMat::Zero(5, 5);
    proj(1, 1) = 1.0;
    proj(3, 3) = 1.0;
    CHECK((e.adjoint() * e - proj).norm() < 1e-15);
  }
}

TEST_CASE("shift weight families") {
  const ShiftWeights u = ShiftWeights::uniform(5);
  CHECK(u.identity == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK(u.pairs.size() == 10);
  for (const PairWeight& pw : u.pairs) CHECK(pw.p == doctest::Approx(1.0 / 11.0).epsilon(1e-15));

  const ShiftWeights z = ShiftWeights::uniform_about_zero(5);
  CHECK(z.identity == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(z.pairs.size() == 4);
  for (const PairWeight& pw : z.pairs) {
    CHECK(pw.nu == 0);
    CHECK(pw.p == doctest::Approx(0.2).epsilon(1e-15));
  }
}

TEST_CASE("bit-flip channel chi golden") {
  const double p = 0.3;
  ShiftWeights w;
  w.identity = 1.0 - p;
  w.pairs = {{0, 1, p}};
  const KrausChannel ch = shift_channel(2, ShiftKind::AS, w);
  CHECK(ch.operators().size() == 2);
  CHECK(ch.trace_preserving());
  CHECK((chi_from_kraus(ch).matrix() - bitflip_chi(p)).norm() < 1e-12);

  // p = 1 maps |0><0| to |1><1|.
  ShiftWeights flip;
  flip.identity = 0.0;
  flip.pairs = {{0, 1, 1.0}};
  CVec e0(2);
  e0 << cplx(1, 0), cplx(0, 0);
  const ApplyResult out =
      apply(shift_channel(2, ShiftKind::AS, flip), density_from_pure(PureState(e0)));
  CHECK(std::abs(out.state.matrix()(1, 1) - cplx(1, 0)) < 1e-12);
  CHECK(out.throughput == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform shift channel is uniformly trace-decreasing for d = 5") {
  const KrausChannel ch = shift_channel(5, ShiftKind::AS, ShiftWeights::uniform(5));
  CHECK(ch.operators().size() == 11);
  CHECK_FALSE(ch.trace_preserving());

  CMat sum = CMat::Zero(5, 5);
  for (const CMat& e : ch.operators()) sum += e.adjoint() * e;
  CHECK((sum - CMat::Identity(5, 5) * (5.0 / 11.0)).norm() < 1e-12);

  Rng rng(21);
  for (int t = 0; t < 5; ++t) {
    const ApplyResult out = apply(ch, random_density(5, rng));
    CHECK(out.throughput == doctest::Approx(5.0 / 11.0).epsilon(1e-12));
  }
}

TEST_CASE("shift about zero has population-dependent throughput") {
  const KrausChannel ch = shift_channel(5, ShiftKind::AS, ShiftWeights::uniform_about_zero(5));
  CHECK(ch.operators().size() == 5);
  Rng rng(22);
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho = random_density(5, rng);
    const double expected = (2.0 + 3.0 * rho.matrix()(0, 0).real()) / 5.0;
    CHECK(apply(ch, rho).throughput == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("shift channel weight validation") {
  ShiftWeights bad;
  bad.identity = 0.5;
  bad.pairs = {{0, 1, 0.6}};
  CHECK_THROWS_AS(shift_channel(2, ShiftKind::AS, bad), BadWeights);

  ShiftWeights neg;
  neg.identity = 1.2;
  neg.pairs = {{0, 1, -0.2}};
  CHECK_THROWS_AS(shift_channel(2, ShiftKind::AS, neg), BadWeights);

  ShiftWeights dup;
  dup.identity = 0.5;
  dup.pairs = {{0, 1, 0.25}, {0, 1, 0.25}};
  CHECK_THROWS_AS(shift_channel(2, ShiftKind::AS, dup), BadWeights);

  ShiftWeights rev;
  rev.identity = 0.5;
  rev.pairs = {{1, 0, 0.5}};
  CHECK_THROWS_AS(shift_channel(2, ShiftKind::AS, rev), BadIndices);
}

TEST_CASE("depolarizing channel structure") {
  CHECK_THROWS_AS(depolarizing_channel(3, -0.1), BadProbability);
  CHECK_THROWS_AS(depolarizing_channel(3, 1.1), BadProbability);

  Rng rng(23);
  const DensityMatrix rho = random_density(4, rng);
  CHECK((apply_raw(depolarizing_channel(4, 0.0), rho.matrix()) - rho.matrix()).norm() < 1e-12);

  for (int d : {2, 3, 4, 5}) {
    const int pairs = d * (d - 1) / 2;
    for (double p : {0.0, 0.3, 0.7, 1.0}) {
      const KrausChannel ch = depolarizing_channel(d, p);
      CHECK(static_cast<int>(ch.operators().size()) == 1 + 3 * pairs);
      CHECK(ch.trace_preserving());
      CHECK(ch.completeness_defect() < 1e-9);
    }
  }
}

TEST_CASE("depolarizing d = 2 matches the literal qubit formula") {
  Rng rng(24);
  const double p = 0.37;
  const KrausChannel ch = depolarizing_channel(2, p);
  const DensityMatrix rho = random_density(2, rng);
  CMat oracle = (1.0 - p) * rho.matrix();
  for (Pauli x : {Pauli::X, Pauli::Y, Pauli::Z}) {
    const CMat s = embed_pauli(2, 0, 1, x);
    oracle += (p / 3.0) * s * rho.matrix() * s.adjoint();
  }
  CHECK((apply_raw(ch, rho.matrix()) - oracle).norm() < 1e-12);
}

TEST_CASE("depolarizing purity on the uniform d = 5 input has a closed form") {
  CVec uni(5);
  for (int i = 0; i < 5; ++i) uni(i) = cplx(1.0 / std::sqrt(5.0), 0);
  const DensityMatrix rho = density_from_pure(PureState(uni));

  for (double p : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const ApplyResult out = apply(depolarizing_channel(5, p), rho);
    const double c = 1.0 - p - p / 12.0;  // off-diagonal survival factor
    const double expected = 0.2 + 0.8 * c * c;
    CHECK(purity(out.state) == doctest::Approx(expected).epsilon(1e-12));

    // Every off-diagonal entry scales by c, populations stay 1/5.
    for (int r = 0; r < 5; ++r) {
      for (int col = 0; col < 5; ++col) {
        const cplx expect = (r == col) ? cplx(0.2, 0) : cplx(0.2 * c, 0);
        CHECK(std::abs(out.state.matrix()(r, col) - expect) < 1e-12);
      }
    }
  }
}

TEST_CASE("channel construction guards") {
  std::vector<CMat> inflated = {CMat::Identity(2, 2) * 1.1};
  CHECK_THROWS_AS(KrausChannel(2, inflated), InvalidChannel);

  std::vector<CMat> wrong = {CMat::Identity(3, 3)};
  CHECK_THROWS_AS(KrausChannel(2, wrong), DimensionMismatch);

  std::vector<CMat> none;
  CHECK_THROWS_AS(KrausChannel(2, none), InvalidChannel);
}

TEST_CASE("apply validates and renormalizes") {
  Rng rng(25);
  const KrausChannel id = identity_channel(3);
  const DensityMatrix rho = random_density(3, rng);
  const ApplyResult out = apply(id, rho);
  CHECK((out.state.matrix() - rho.matrix()).norm() < 1e-12);
  CHECK(out.throughput == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(apply(id, random_density(4, rng)), DimensionMismatch);

  std::vector<CMat> tiny = {CMat::Identity(2, 2) * 1e-7};
  CHECK_THROWS_AS(apply(KrausChannel(2, tiny), random_density(2, rng)), ZeroTrace);
}

TEST_CASE("apply keeps outputs positive") {
  Rng rng(26);
  const KrausChannel ch = depolarizing_channel(3, 0.4);
  const KrausChannel sh = shift_channel(3, ShiftKind::APS, ShiftWeights::uniform(3));
  for (int t = 0; t < 20; ++t) {
    for (const KrausChannel* c : {&ch, &sh}) {
      const EigResult eig = hermitian_eig(apply(*c, random_density(3, rng)).state.matrix());
      CHECK(eig.values(eig.values.size() - 1) >= -1e-9);
    }
  }
}

TEST_CASE("chi_from_kraus goldens and cross-representation") {
  const ChiMatrix id_chi = chi_from_kraus(identity_channel(2));
  CMat expect = CMat::Zero(4, 4);
  expect(0, 0) = expect(0, 3) = expect(3, 0) = expect(3, 3) = 1.0;
  CHECK((id_chi.matrix() - expect).norm() < 1e-15);

  ShiftWeights w;
  w.identity = 0.75;
  w.pairs = {{0, 1, 0.25}};
  const KrausChannel bf = shift_channel(2, ShiftKind::AS, w);
  CHECK((chi_from_kraus(bf).matrix() - bitflip_chi(0.25)).norm() < 1e-12);

  Rng rng(27);
  for (int d : {2, 3}) {
    const KrausChannel ch = random_tp_channel(d, 3, rng);
    const ChiMatrix chi = chi_from_kraus(ch);
    CHECK(chi.min_eigenvalue() > -1e-10);
    for (int t = 0; t < 20; ++t) {
      const DensityMatrix rho = random_density(d, rng);
      CHECK((chi_action(chi, rho.matrix()) - apply_raw(ch, rho.matrix())).norm() < 1e-10);
    }
  }
}

TEST_CASE("chi matrix validation records the spectrum floor") {
  CMat nh = CMat::Zero(4, 4);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(ChiMatrix(2, nh), NotHermitian);
  CHECK_THROWS_AS(ChiMatrix(2, CMat::Identity(3, 3)), DimensionMismatch);

  CMat dip = CMat::Identity(4, 4);
  dip(3, 3) = -1e-3;
  const ChiMatrix chi(2, dip);
  CHECK(chi.min_eigenvalue() == doctest::Approx(-1e-3).epsilon(1e-9));
}

TEST_CASE("kraus_from_chi round trips") {
  const KrausChannel id_rt = kraus_from_chi(chi_from_kraus(identity_channel(2)));
  CHECK(id_rt.operators().size() == 1);
  Rng rng(28);
  const DensityMatrix rho2 = random_density(2, rng);
  CHECK((apply_raw(id_rt, rho2.matrix()) - rho2.matrix()).norm() < 1e-10);

  ShiftWeights w;
  w.identity = 0.6;
  w.pairs = {{0, 1, 0.4}};
  const KrausChannel bf = shift_channel(2, ShiftKind::AS, w);
  const ChiMatrix bf_chi = chi_from_kraus(bf);
  const KrausChannel bf_rt = kraus_from_chi(bf_chi);
  CHECK((chi_from_kraus(bf_rt).matrix() - bf_chi.matrix()).norm() < 1e-8);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_density(2, rng);
    CHECK((apply_raw(bf_rt, rho.matrix()) - apply_raw(bf, rho.matrix())).norm() < 1e-10);
  }

  for (int d : {2, 3, 4}) {
    const ChiMatrix chi = chi_from_kraus(random_tp_channel(d, d, rng));
    CHECK((chi_from_kraus(kraus_from_chi(chi)).matrix() - chi.matrix()).norm() < 1e-8);
  }

  CMat bad = CMat::Identity(4, 4);
  bad(3, 3) = -1e-3;
  CHECK_THROWS_AS(kraus_from_chi(ChiMatrix(2, bad)), NotPSD);
}
