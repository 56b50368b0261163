// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qpt/channels.hpp"
#include "qpt/tomography.hpp"
#include "qpt/turbulence.hpp"

namespace qpt {

using MetaValue = std::variant<std::int64_t, double, std::string, bool>;
using Metadata = std::map<std::string, MetaValue>;

// Shortest-round-trip decimal for CSV cells.
std::string format_double(double v);

// JSON container {kind, d, shape:[n, d, d], entries:[re, im, ...], metadata};
// readers reject unknown or missing top-level keys.
void write_kraus_file(const std::string& path, const KrausChannel& ch, const Metadata& meta = {});

struct KrausFile {
  int dim = 0;
  std::vector<CMat> ops;
  Metadata metadata;
};
KrausFile read_kraus_file(const std::string& path);

// JSON container {kind, shape:[rows, cols], entries:[re, im, ...], metadata};
// kind is one of "chi", "density", "transfer".
void write_matrix_file(const std::string& path, const std::string& kind, const CMat& m,
                       const Metadata& meta = {});

struct MatrixFile {
  std::string kind;
  CMat matrix;
  Metadata metadata;
};
MatrixFile read_matrix_file(const std::string& path);

// CSV with header prep_index,basis,outcome,probability,shots; shots == 0
// marks exact probabilities.
void write_records_csv(const std::string& path, const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_csv(const std::string& path);

// 8-bit binary PGM; phase 0 maps to white and wrapped 2 pi to black.
void write_phase_screen_pgm(const std::string& path, const PhaseScreen& s);

// Binary container: magic "QPTSCRN1", then n (int64), dx, r0 (float64),
// seed (uint64), then n*n float64 phase samples, all little-endian.
void write_phase_screen_raw(const std::string& path, const PhaseScreen& s);
PhaseScreen read_phase_screen_raw(const std::string& path);

// Comment line "# fitted_exponent = ...", header r,D,D_theory, one row per
// separation.
void write_structure_csv(const std::string& path, const std::vector<double>& separations,
                         const std::vector<double>& estimated, const std::vector<double>& theory,
                         double fitted_exponent);

}  // namespace qpt
