// SPDX-License-Identifier: Apache-2.0
#include "qpt/mub.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpt {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

std::vector<PureState> computational_basis(int d) {
  std::vector<PureState> basis;
  basis.reserve(d);
  for (int k = 0; k < d; ++k) {
    CVec v = CVec::Zero(d);
    v(k) = 1.0;
    basis.emplace_back(std::move(v));
  }
  return basis;
}

// Eigenbases of sigma_z, sigma_x, sigma_y; first components real positive.
void append_qubit_bases(MubSet& s) {
  double r = 1.0 / std::sqrt(2.0);
  std::vector<PureState> x_basis;
  x_basis.emplace_back((CVec(2) << r, r).finished());
  x_basis.emplace_back((CVec(2) << r, -r).finished());
  std::vector<PureState> y_basis;
  y_basis.emplace_back((CVec(2) << cplx(r, 0.0), cplx(0.0, r)).finished());
  y_basis.emplace_back((CVec(2) << cplx(r, 0.0), cplx(0.0, -r)).finished());
  s.bases.push_back(std::move(x_basis));
  s.bases.push_back(std::move(y_basis));
}

// <j|e_m^b> = omega^(b j^2 + m j) / sqrt(d) for odd prime d, b = 1..d.
void append_odd_prime_bases(MubSet& s, int d) {
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d));
  double w = 2.0 * std::numbers::pi / d;
  for (int b = 1; b <= d; ++b) {
    std::vector<PureState> basis;
    basis.reserve(d);
    for (int m = 0; m < d; ++m) {
      CVec v(d);
      for (int j = 0; j < d; ++j) {
        long long e = (static_cast<long long>(b) * j * j + static_cast<long long>(m) * j) % d;
        v(j) = std::polar(inv_sqrt, w * static_cast<double>(e));
      }
      basis.emplace_back(std::move(v));
    }
    s.bases.push_back(std::move(basis));
  }
}

// Explicit table for d = 4; entries are all +-1/2 or +-i/2.
void append_dim4_bases(MubSet& s) {
  static const double t[4][4][4][2] = {
      {{{0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}},
       {{0.5, 0.0}, {0.5, 0.0}, {-0.5, 0.0}, {-0.5, 0.0}},
       {{0.5, 0.0}, {-0.5, 0.0}, {0.5, 0.0}, {-0.5, 0.0}},
       {{0.5, 0.0}, {-0.5, 0.0}, {-0.5, 0.0}, {0.5, 0.0}}},
      {{{0.5, 0.0}, {0.0, 0.5}, {0.0, 0.5}, {-0.5, 0.0}},
       {{0.5, 0.0}, {0.0, 0.5}, {0.0, -0.5}, {0.5, 0.0}},
       {{0.5, 0.0}, {0.0, -0.5}, {0.0, 0.5}, {0.5, 0.0}},
       {{0.5, 0.0}, {0.0, -0.5}, {0.0, -0.5}, {-0.5, 0.0}}},
      {{{0.5, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.0, -0.5}},
       {{0.5, 0.0}, {0.5, 0.0}, {0.0, -0.5}, {0.0, 0.5}},
       {{0.5, 0.0}, {-0.5, 0.0}, {0.0, 0.5}, {0.0, 0.5}},
       {{0.5, 0.0}, {-0.5, 0.0}, {0.0, -0.5}, {0.0, -0.5}}},
      {{{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.0}, {0.0, -0.5}},
       {{0.5, 0.0}, {0.0, 0.5}, {-0.5, 0.0}, {0.0, 0.5}},
       {{0.5, 0.0}, {0.0, -0.5}, {0.5, 0.0}, {0.0, 0.5}},
       {{0.5, 0.0}, {0.0, -0.5}, {-0.5, 0.0}, {0.0, -0.5}}}};
  for (int b = 0; b < 4; ++b) {
    std::vector<PureState> basis;
    basis.reserve(4);
    for (int m = 0; m < 4; ++m) {
      CVec v(4);
      for (int j = 0; j < 4; ++j) v(j) = cplx(t[b][m][j][0], t[b][m][j][1]);
      basis.emplace_back(std::move(v));
    }
    s.bases.push_back(std::move(basis));
  }
}

void verify_built_set(const MubSet& s, double unbiased_tol) {
  for (const auto& basis : s.bases) {
    for (int i = 0; i < s.dim; ++i) {
      for (int j = 0; j < s.dim; ++j) {
        cplx ov = (basis[i].amplitudes().adjoint() * basis[j].amplitudes())(0, 0);
        double want = i == j ? 1.0 : 0.0;
        if (std::abs(ov - want) > 1e-12)
          throw std::logic_error("mub construction produced a non-orthonormal basis");
      }
    }
  }
  if (unbiasedness_check(s) > unbiased_tol)
    throw std::logic_error("mub construction failed the unbiasedness check");
}

}  // namespace

MubSet build_mubs(int d) {
  if (d != 4 && !is_prime(d))
    throw UnsupportedDimension("mub construction supports prime d and d = 4");
  MubSet s;
  s.dim = d;
  s.bases.push_back(computational_basis(d));
  if (d == 2) {
    append_qubit_bases(s);
  } else if (d == 4) {
    append_dim4_bases(s);
  } else {
    append_odd_prime_bases(s, d);
  }
  verify_built_set(s, d == 4 ? 1e-10 : 1e-12);
  return s;
}

double unbiasedness_check(const MubSet& s) {
  double inv_d = 1.0 / s.dim;
  double worst = 0.0;
  for (size_t a = 0; a < s.bases.size(); ++a) {
    for (size_t b = a + 1; b < s.bases.size(); ++b) {
      for (const PureState& u : s.bases[a]) {
        for (const PureState& v : s.bases[b]) {
          cplx ov = (u.amplitudes().adjoint() * v.amplitudes())(0, 0);
          worst = std::max(worst, std::abs(std::norm(ov) - inv_d));
        }
      }
    }
  }
  return worst;
}

std::vector<DensityMatrix> mub_projectors(const MubSet& s) {
  std::vector<DensityMatrix> projectors;
  projectors.reserve(s.bases.size() * s.dim);
  for (const auto& basis : s.bases)
    for (const PureState& v : basis) projectors.push_back(density_from_pure(v));
  return projectors;
}

}  // namespace qpt
