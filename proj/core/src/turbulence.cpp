// SPDX-License-Identifier: Apache-2.0
#include "qpt/turbulence.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>

#include "qpt/errors.hpp"
#include "qpt/rng.hpp"

namespace qpt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void validate_params(const TurbulenceParams& p) {
  if (p.grid_n < 256 || (p.grid_n & (p.grid_n - 1)) != 0) {
    throw BadConfig("grid_n must be a power of two >= 256");
  }
  if (!(p.grid_dx > 0.0) || !std::isfinite(p.grid_dx)) {
    throw BadConfig("grid_dx must be positive");
  }
  if (!(p.fried_r0 > 0.0) || !std::isfinite(p.fried_r0)) {
    throw BadConfig("fried_r0 must be positive");
  }
  if (!(p.path_length > 0.0) || !std::isfinite(p.path_length)) {
    throw BadConfig("path_length must be positive");
  }
  if (!(p.wavelength > 0.0) || !std::isfinite(p.wavelength)) {
    throw BadConfig("wavelength must be positive");
  }
}

// Midpoint-rule integral of f^(-11/3) over the square patch
// [fx0 - half, fx0 + half] x [fy0 - half, fy0 + half].
double patch_integral(double fx0, double fy0, double half, int n) {
  double sum = 0.0;
  const double cell = 2.0 * half / n;
  for (int a = 0; a < n; ++a) {
    const double x = fx0 + ((a + 0.5) / n) * 2.0 * half - half;
    for (int b = 0; b < n; ++b) {
      const double y = fy0 + ((b + 0.5) / n) * 2.0 * half - half;
      const double f2 = x * x + y * y;
      if (f2 == 0.0) continue;
      sum += std::pow(f2, -11.0 / 6.0);
    }
  }
  return sum * cell * cell;
}

// One synthesis setup: spectral amplitude grid, FFT plan, subharmonic modes.
// make() is deterministic in its seed; the object is not thread-safe.
class ScreenSynth {
 public:
  ScreenSynth(int n, double dx, double r0) : n_(n), dx_(dx) {
    const double df = 1.0 / (n * dx);
    const double c_phi = 0.023 * std::pow(r0, -5.0 / 3.0);
    amp_.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      const double fy = ((i < (n + 1) / 2) ? i : i - n) * df;
      for (int j = 0; j < n; ++j) {
        const double fx = ((j < (n + 1) / 2) ? j : j - n) * df;
        const double f2 = fx * fx + fy * fy;
        amp_[static_cast<std::size_t>(i) * n + j] =
            (f2 == 0.0) ? 0.0 : std::sqrt(c_phi * std::pow(f2, -11.0 / 6.0)) * df;
      }
    }
    for (int p = 1; p <= 3; ++p) {
      const double dfp = df / std::pow(3.0, p);
      for (int m = -1; m <= 1; ++m) {
        for (int k = -1; k <= 1; ++k) {
          if (m == 0 && k == 0) continue;
          const double fy = m * dfp;
          const double fx = k * dfp;
          const double a = std::sqrt(c_phi * patch_integral(fx, fy, dfp / 2.0, 24));
          modes_.push_back({fy, fx, a});
        }
      }
    }
    in_ = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    out_ = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    if (in_ == nullptr || out_ == nullptr) {
      if (in_ != nullptr) fftw_free(in_);
      if (out_ != nullptr) fftw_free(out_);
      throw BadConfig("phase screen buffer allocation failed");
    }
    plan_ = fftw_plan_dft_2d(n, n, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~ScreenSynth() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }

  ScreenSynth(const ScreenSynth&) = delete;
  ScreenSynth& operator=(const ScreenSynth&) = delete;

  std::vector<double> make(std::uint64_t seed) {
    const std::size_t total = static_cast<std::size_t>(n_) * n_;
    Rng rng(seed);
    for (std::size_t idx = 0; idx < total; ++idx) {
      const double g1 = rng.normal();
      const double g2 = rng.normal();
      in_[idx][0] = g1 * amp_[idx];
      in_[idx][1] = g2 * amp_[idx];
    }
    fftw_execute(plan_);
    std::vector<double> phi(total);
    for (std::size_t idx = 0; idx < total; ++idx) phi[idx] = out_[idx][0];

    std::vector<std::complex<double>> rowp(n_), colp(n_);
    for (const Mode& mode : modes_) {
      const double re = rng.normal();
      const double im = rng.normal();
      const std::complex<double> cc = std::complex<double>(re, im) * mode.a;
      for (int r = 0; r < n_; ++r) rowp[r] = std::polar(1.0, kTwoPi * mode.fy * (r * dx_));
      for (int c = 0; c < n_; ++c) colp[c] = cc * std::polar(1.0, kTwoPi * mode.fx * (c * dx_));
      for (int r = 0; r < n_; ++r) {
        double* row = phi.data() + static_cast<std::size_t>(r) * n_;
        const std::complex<double> rp = rowp[r];
        for (int c = 0; c < n_; ++c) row[c] += (rp * colp[c]).real();
      }
    }

    double mean = 0.0;
    for (double v : phi) mean += v;
    mean /= static_cast<double>(total);
    for (double& v : phi) v -= mean;
    return phi;
  }

 private:
  struct Mode {
    double fy;
    double fx;
    double a;
  };

  int n_;
  double dx_;
  std::vector<double> amp_;
  std::vector<Mode> modes_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace

double cn2_profile(double h) {
  if (!(h >= 0.0 && h <= 20000.0)) {
    throw OutOfRange("altitude must lie in [0, 20000] m");
  }
  const double v = 21.0;
  const double a = 1.7e-14;
  const double t1 =
      0.00594 * std::pow(v / 27.0, 2.0) * std::pow(1e-5 * h, 10.0) * std::exp(-h / 1000.0);
  const double t2 = 2.7e-16 * std::exp(-h / 1500.0);
  const double t3 = a * std::exp(-h / 100.0);
  return t1 + t2 + t3;
}

double fried_parameter(double cn2, double L, double lambda) {
  if (!(L > 0.0) || !(lambda > 0.0) || !(cn2 >= 0.0) || !std::isfinite(L) ||
      !std::isfinite(lambda) || !std::isfinite(cn2)) {
    throw BadConfig("fried_parameter requires cn2 >= 0, L > 0, lambda > 0");
  }
  const double k = kTwoPi / lambda;
  const double x = 0.423 * k * k * cn2 * L;
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(x, -0.6);
}

TurbulenceParams TurbulenceParams::from_altitude(double h, double L, double lambda, int N,
                                                 double dx) {
  const double r0 = fried_parameter(cn2_profile(h), L, lambda);
  TurbulenceParams p{h, L, lambda, N, dx, r0};
  validate_params(p);
  return p;
}

TurbulenceParams TurbulenceParams::with_r0(double r0, double h, double L, double lambda, int N,
                                           double dx) {
  TurbulenceParams p{h, L, lambda, N, dx, r0};
  validate_params(p);
  return p;
}

PhaseScreen phase_screen(const TurbulenceParams& p, std::uint64_t seed) {
  validate_params(p);
  ScreenSynth synth(p.grid_n, p.grid_dx, p.fried_r0);
  return PhaseScreen{p.grid_n, p.grid_dx, p.fried_r0, seed, synth.make(seed)};
}

std::vector<PhaseScreen> phase_screen_ensemble(const TurbulenceParams& p, int count,
                                               std::uint64_t seed) {
  validate_params(p);
  if (count < 1) throw BadConfig("ensemble count must be >= 1");
  ScreenSynth synth(p.grid_n, p.grid_dx, p.fried_r0);
  std::vector<PhaseScreen> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t si = mix_seed(seed, static_cast<std::uint64_t>(i));
    out.push_back(PhaseScreen{p.grid_n, p.grid_dx, p.fried_r0, si, synth.make(si)});
  }
  return out;
}

std::vector<double> structure_function(const std::vector<PhaseScreen>& screens,
                                       const std::vector<double>& separations) {
  if (screens.size() < 2) throw GeometryMismatch("structure function needs >= 2 screens");
  const int n = screens.front().n;
  const double dx = screens.front().dx;
  for (const PhaseScreen& s : screens) {
    if (s.n != n || s.dx != dx) throw GeometryMismatch("screens differ in grid geometry");
    if (s.phi.size() != static_cast<std::size_t>(n) * n) {
      throw GeometryMismatch("screen buffer does not match its grid");
    }
  }
  std::vector<int> px(separations.size());
  for (std::size_t i = 0; i < separations.size(); ++i) {
    const long p = std::lround(separations[i] / dx);
    if (p < 1 || p >= n) throw OutOfRange("separation must map to a pixel offset in [1, n)");
    px[i] = static_cast<int>(p);
  }
  std::vector<double> d_r(separations.size(), 0.0);
  for (const PhaseScreen& s : screens) {
    const double* phi = s.phi.data();
    for (std::size_t i = 0; i < px.size(); ++i) {
      const int p = px[i];
      const std::size_t pairs = static_cast<std::size_t>(n) * (n - p);
      double sx = 0.0;
      for (int r = 0; r < n; ++r) {
        const double* row = phi + static_cast<std::size_t>(r) * n;
        for (int c = 0; c + p < n; ++c) {
          const double diff = row[c + p] - row[c];
          sx += diff * diff;
        }
      }
      double sy = 0.0;
      for (int r = 0; r + p < n; ++r) {
        const double* row = phi + static_cast<std::size_t>(r) * n;
        const double* rowp = row + static_cast<std::size_t>(p) * n;
        for (int c = 0; c < n; ++c) {
          const double diff = rowp[c] - row[c];
          sy += diff * diff;
        }
      }
      d_r[i] += 0.5 * (sx + sy) / static_cast<double>(pairs);
    }
  }
  for (double& v : d_r) v /= static_cast<double>(screens.size());
  return d_r;
}

double fit_power_exponent(const std::vector<double>& separations, const std::vector<double>& d_r) {
  if (separations.size() != d_r.size() || separations.size() < 2) {
    throw BadConfig("exponent fit needs matching vectors with >= 2 points");
  }
  const std::size_t n = separations.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(separations[i] > 0.0) || !(d_r[i] > 0.0)) {
      throw BadConfig("exponent fit needs positive separations and values");
    }
    lx[i] = std::log(separations[i]);
    ly[i] = std::log(d_r[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den == 0.0) throw BadConfig("exponent fit needs distinct separations");
  return num / den;
}

SlitGeometry SlitGeometry::standard(int d) {
  return SlitGeometry{d, 0.014, 0.028, 0.014};
}

CMat slit_operator(const PhaseScreen& screen, const SlitGeometry& geom, SlitMode mode, double L,
                   double lambda) {
  const int n = screen.n;
  const double dx = screen.dx;
  if (geom.d < 2) throw GeometryMismatch("slit count must be >= 2");
  if (!(geom.width > 0.0) || !(geom.height > 0.0) || !(geom.pitch > 0.0)) {
    throw GeometryMismatch("slit dimensions must be positive");
  }
  if (!(geom.width < geom.pitch)) throw GeometryMismatch("slit width must be below the pitch");
  if (mode == SlitMode::TiltShift && (!(L > 0.0) || !(lambda > 0.0))) {
    throw BadConfig("tilt-shift mode requires L > 0 and lambda > 0");
  }
  if (screen.phi.size() != static_cast<std::size_t>(n) * n) {
    throw GeometryMismatch("screen buffer does not match its grid");
  }

  const int half = n / 2;
  int row0 = static_cast<int>(std::lround(half - geom.height / (2.0 * dx)));
  int row1 = static_cast<int>(std::lround(half + geom.height / (2.0 * dx)));
  if (row1 <= row0) row1 = row0 + 1;
  if (row0 < 0 || row1 > n) throw GeometryMismatch("slit height exceeds the grid");

  CMat k_op = CMat::Zero(geom.d, geom.d);
  const double* phi = screen.phi.data();
  for (int l = 0; l < geom.d; ++l) {
    const double center = half + (l - (geom.d - 1) / 2.0) * (geom.pitch / dx);
    int c0 = static_cast<int>(std::lround(center - geom.width / (2.0 * dx)));
    int c1 = static_cast<int>(std::lround(center + geom.width / (2.0 * dx)));
    if (c1 <= c0) c1 = c0 + 1;
    if (c0 < 1 || c1 > n - 1) throw GeometryMismatch("slit array exceeds the grid");

    const double count = static_cast<double>(row1 - row0) * (c1 - c0);
    cplx m(0.0, 0.0);
    double grad = 0.0;
    for (int r = row0; r < row1; ++r) {
      const double* row = phi + static_cast<std::size_t>(r) * n;
      for (int c = c0; c < c1; ++c) {
        m += std::polar(1.0, row[c]);
        if (mode == SlitMode::TiltShift) grad += (row[c + 1] - row[c - 1]) / (2.0 * dx);
      }
    }
    m /= count;
    if (mode == SlitMode::DiagonalPhase) {
      k_op(l, l) = m;
    } else {
      grad /= count;
      const double delta = L * grad * lambda / kTwoPi;
      const long shift = std::lround(delta / geom.pitch);
      const long lp = l + shift;
      if (lp >= 0 && lp < geom.d) k_op(lp, l) += m;
    }
  }

  Eigen::JacobiSVD<CMat> svd(k_op);
  const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  if (smax > 1.0 + 1e-12) k_op /= smax;
  return k_op;
}

KrausChannel turbulence_channel(const TurbulenceParams& p, const SlitGeometry& geom, SlitMode mode,
                                int n_masks, std::uint64_t seed) {
  if (n_masks < 1) throw BadConfig("mask count must be >= 1");
  const std::vector<PhaseScreen> screens = phase_screen_ensemble(p, n_masks, seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_masks));
  std::vector<CMat> ops;
  ops.reserve(screens.size());
  for (const PhaseScreen& s : screens) {
    ops.push_back(slit_operator(s, geom, mode, p.path_length, p.wavelength) * scale);
  }
  return KrausChannel(geom.d, ops);
}

}  // namespace qpt
