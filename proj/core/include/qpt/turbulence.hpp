// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "qpt/channels.hpp"

namespace qpt {

struct TurbulenceParams {
  double altitude;     // meters above sea level
  double path_length;  // meters
  double wavelength;   // meters
  int grid_n;          // power of two, >= 256
  double grid_dx;      // meters per pixel
  double fried_r0;     // meters

  // r0 derived from the altitude profile over the path.
  static TurbulenceParams from_altitude(double h, double L, double lambda, int N, double dx);
  // Explicit r0 override.
  static TurbulenceParams with_r0(double r0, double h, double L, double lambda, int N, double dx);
};

// Hufnagel-Valley style profile with v = 21 m/s and A = 1.7e-14 m^(-2/3).
double cn2_profile(double h);

// Plane-wave Fried parameter for constant Cn2 along a path of length L.
double fried_parameter(double cn2, double L, double lambda);

struct PhaseScreen {
  int n;
  double dx;
  double r0;
  std::uint64_t seed;
  std::vector<double> phi;  // n*n radians, row-major, zero mean
};

// FFT spectral synthesis shaped by the Kolmogorov spectrum
// 0.023 r0^(-5/3) f^(-11/3), plus 3 levels of subharmonic low-frequency
// augmentation; deterministic in the seed.
PhaseScreen phase_screen(const TurbulenceParams& p, std::uint64_t seed);

// count screens sharing one synthesis setup; screen i uses mix_seed(seed, i).
std::vector<PhaseScreen> phase_screen_ensemble(const TurbulenceParams& p, int count,
                                               std::uint64_t seed);

// Ensemble-and-space averaged squared phase increments along both axes,
// one estimate per separation (meters, converted to whole pixels).
std::vector<double> structure_function(const std::vector<PhaseScreen>& screens,
                                       const std::vector<double>& separations);

// Least-squares slope of log D versus log r.
double fit_power_exponent(const std::vector<double>& separations, const std::vector<double>& d_r);

enum class SlitMode { DiagonalPhase, TiltShift };

struct SlitGeometry {
  int d;          // number of slits
  double width;   // meters, < pitch
  double pitch;   // meters, center-to-center
  double height;  // meters

  // 28 mm pitch, half-pitch slit width, square slits.
  static SlitGeometry standard(int d);
};

// Collapse one screen to a d x d slit-mode operator. DiagonalPhase keeps the
// mean phasor of each slit on the diagonal. TiltShift additionally converts
// the mean phase gradient over slit l into a far-field displacement
// delta = L * g * lambda / (2 pi) and reroutes the amplitude to slit
// l + round(delta / pitch); amplitude leaving the aperture is discarded.
CMat slit_operator(const PhaseScreen& screen, const SlitGeometry& geom, SlitMode mode, double L,
                   double lambda);

// n_masks independently seeded screens; operators K_m / sqrt(n_masks).
KrausChannel turbulence_channel(const TurbulenceParams& p, const SlitGeometry& geom, SlitMode mode,
                                int n_masks, std::uint64_t seed);

}  // namespace qpt
