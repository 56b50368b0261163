// SPDX-License-Identifier: Apache-2.0
// Command line front end: channel generation, tomography runs, state
// recovery, and turbulence screen ensembles.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpt/channels.hpp"
#include "qpt/errors.hpp"
#include "qpt/io.hpp"
#include "qpt/mub.hpp"
#include "qpt/qudit.hpp"
#include "qpt/tomography.hpp"
#include "qpt/turbulence.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace qpt;

constexpr double kStructureCoeff = 6.8838771823;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  const char* env = std::getenv("QPTLAB_OUT_DIR");
  if (env != nullptr && env[0] != '\0') return std::string(env);
  return ".";
}

std::string prepare_out_dir(const std::string& flag) {
  const std::string dir = resolve_out_dir(flag);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
  return dir;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
  for (const auto& item : j.items()) {
    if (allowed.count(item.key()) == 0) {
      throw BadConfig("unknown key \"" + item.key() + "\" in " + where);
    }
  }
  for (const std::string& k : required) {
    if (!j.contains(k)) throw BadConfig("missing key \"" + k + "\" in " + where);
  }
}

double get_num(const json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw BadConfig("\"" + key + "\" must be a number in " + where);
  return j[key].get<double>();
}

std::int64_t get_int(const json& j, const std::string& key, std::int64_t fallback,
                     const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw BadConfig("\"" + key + "\" must be an integer in " + where);
  }
  return j[key].get<std::int64_t>();
}

std::string get_str(const json& j, const std::string& key, const std::string& fallback,
                    const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw BadConfig("\"" + key + "\" must be a string in " + where);
  return j[key].get<std::string>();
}

// Everything needed to build a channel, plus its canonical description used
// for config hashing and report metadata (no paths, no directories).
struct ChannelSpec {
  std::string kind;  // identity|as|ps|aps|depolarizing|turbulence|file
  int d = 0;
  double p = 0.0;
  std::string weights = "uniform";  // uniform|uniform0
  double h = 174.0;
  double path_length = 500.0;
  double lambda = 405e-9;
  int grid_n = 512;
  double dx = 0.028 / 64.0;
  double r0 = 0.0;  // <= 0: derive from altitude
  int n_masks = 100;
  std::string mode = "diagonal-phase";  // diagonal-phase|tilt-shift
  double slit_pitch = 0.028;
  double slit_width = 0.014;
  double slit_height = 0.014;
  std::uint64_t seed = 1;
  std::string file;  // kind == file only
};

json spec_to_json(const ChannelSpec& s) {
  json j;
  j["kind"] = s.kind;
  if (s.kind == "file") {
    std::ifstream in(s.file, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + s.file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    j["content_hash"] = hex64(fnv1a(text));
    return j;
  }
  j["d"] = s.d;
  if (s.kind == "depolarizing") j["p"] = s.p;
  if (s.kind == "as" || s.kind == "ps" || s.kind == "aps") j["weights"] = s.weights;
  if (s.kind == "turbulence") {
    j["h"] = s.h;
    j["L"] = s.path_length;
    j["lambda"] = s.lambda;
    j["N"] = s.grid_n;
    j["dx"] = s.dx;
    if (s.r0 > 0.0) j["r0"] = s.r0;
    j["n_masks"] = s.n_masks;
    j["mode"] = s.mode;
    j["slit_pitch"] = s.slit_pitch;
    j["slit_width"] = s.slit_width;
    j["slit_height"] = s.slit_height;
    j["seed"] = s.seed;
  }
  return j;
}

ShiftKind parse_shift_kind(const std::string& kind) {
  if (kind == "as") return ShiftKind::AS;
  if (kind == "ps") return ShiftKind::PS;
  return ShiftKind::APS;
}

KrausChannel build_channel(const ChannelSpec& s) {
  if (s.kind == "file") {
    const KrausFile f = read_kraus_file(s.file);
    return KrausChannel(f.dim, f.ops);
  }
  if (s.d < 2) throw BadConfig("channel dimension must be >= 2 (use --d)");
  if (s.kind == "identity") return identity_channel(s.d);
  if (s.kind == "as" || s.kind == "ps" || s.kind == "aps") {
    if (s.weights != "uniform" && s.weights != "uniform0") {
      throw BadConfig("--weights must be uniform or uniform0");
    }
    const ShiftWeights w = (s.weights == "uniform") ? ShiftWeights::uniform(s.d)
                                                    : ShiftWeights::uniform_about_zero(s.d);
    return shift_channel(s.d, parse_shift_kind(s.kind), w);
  }
  if (s.kind == "depolarizing") {
    if (!(s.p >= 0.0 && s.p <= 1.0)) throw BadConfig("--p must lie in [0, 1]");
    return depolarizing_channel(s.d, s.p);
  }
  if (s.kind == "turbulence") {
    if (s.mode != "diagonal-phase" && s.mode != "tilt-shift") {
      throw BadConfig("--mode must be diagonal-phase or tilt-shift");
    }
    const TurbulenceParams params =
        (s.r0 > 0.0)
            ? TurbulenceParams::with_r0(s.r0, s.h, s.path_length, s.lambda, s.grid_n, s.dx)
            : TurbulenceParams::from_altitude(s.h, s.path_length, s.lambda, s.grid_n, s.dx);
    const SlitGeometry geom{s.d, s.slit_width, s.slit_pitch, s.slit_height};
    const SlitMode mode =
        (s.mode == "diagonal-phase") ? SlitMode::DiagonalPhase : SlitMode::TiltShift;
    return turbulence_channel(params, geom, mode, s.n_masks, s.seed);
  }
  throw BadConfig("unknown channel kind \"" + s.kind + "\"");
}

void add_channel_flags(CLI::App* cmd, ChannelSpec& s) {
  cmd->add_option("--kind", s.kind, "identity|as|ps|aps|depolarizing|turbulence");
  cmd->add_option("--d", s.d, "qudit dimension (slit count)");
  cmd->add_option("--p", s.p, "depolarizing strength in [0, 1]");
  cmd->add_option("--weights", s.weights, "shift weights: uniform|uniform0");
  cmd->add_option("--altitude", s.h, "altitude above sea level, m");
  cmd->add_option("--L", s.path_length, "propagation path length, m");
  cmd->add_option("--lambda", s.lambda, "wavelength, m");
  cmd->add_option("--N", s.grid_n, "screen grid size, power of two >= 256");
  cmd->add_option("--dx", s.dx, "screen pixel size, m");
  cmd->add_option("--r0", s.r0, "Fried parameter override, m");
  cmd->add_option("--n-masks", s.n_masks, "turbulence ensemble size");
  cmd->add_option("--mode", s.mode, "slit reduction: diagonal-phase|tilt-shift");
  cmd->add_option("--slit-pitch", s.slit_pitch, "slit center-to-center distance, m");
  cmd->add_option("--slit-width", s.slit_width, "slit width, m");
  cmd->add_option("--slit-height", s.slit_height, "slit height, m");
}

Metadata base_metadata(std::uint64_t seed, const std::string& config_hash) {
  Metadata meta;
  meta["seed"] = static_cast<std::int64_t>(seed);
  meta["config_hash"] = config_hash;
  return meta;
}

// ---- gen-channel ----------------------------------------------------------

struct GenArgs {
  ChannelSpec spec;
  std::string out_name = "channel";
  std::string out_dir;
};

int cmd_gen_channel(const GenArgs& a) {
  if (a.spec.kind.empty()) throw BadConfig("--kind is required");
  const KrausChannel ch = build_channel(a.spec);
  const ChiMatrix chi = chi_from_kraus(ch);
  const std::string dir = prepare_out_dir(a.out_dir);
  const std::string hash = hex64(fnv1a(spec_to_json(a.spec).dump()));

  Metadata meta = base_metadata(a.spec.seed, hash);
  meta["kind"] = a.spec.kind;
  meta["d"] = static_cast<std::int64_t>(ch.dim());

  const std::string kraus_path = join(dir, a.out_name + ".kraus.json");
  const std::string chi_path = join(dir, a.out_name + ".chi.json");
  write_kraus_file(kraus_path, ch, meta);
  write_matrix_file(chi_path, "chi", chi.matrix(), meta);

  std::printf("wrote %s and %s\n", kraus_path.c_str(), chi_path.c_str());
  std::printf("operators: %zu, trace-preserving: %s (defect %.3g)\n", ch.operators().size(),
              ch.trace_preserving() ? "yes" : "no", ch.completeness_defect());
  return 0;
}

// ---- run-qpt ---------------------------------------------------------------

struct RunArgs {
  ChannelSpec spec;
  std::string channel_file;
  std::string config_file;
  bool exact = false;
  std::int64_t shots = 0;
  std::uint64_t seed = 1;
  double rcond = 1e-3;
  std::string out_dir;
};

void load_config(RunArgs& a) {
  std::ifstream in(a.config_file, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + a.config_file);
  json cfg = json::parse(in, nullptr, false);
  if (cfg.is_discarded()) throw BadConfig("malformed JSON in " + a.config_file);
  if (!cfg.is_object()) throw BadConfig("config must be a JSON object");
  const std::string where = a.config_file;
  require_keys(cfg, {"d", "channel", "measurement", "rcond", "out_dir"}, {"d", "channel"}, where);

  a.spec.d = static_cast<int>(get_int(cfg, "d", 0, where));
  a.rcond = get_num(cfg, "rcond", a.rcond, where);
  if (cfg.contains("out_dir") && a.out_dir.empty()) {
    a.out_dir = get_str(cfg, "out_dir", "", where);
  }

  const json& ch = cfg["channel"];
  if (!ch.is_object()) throw BadConfig("\"channel\" must be an object in " + where);
  a.spec.kind = get_str(ch, "kind", "", where + " channel");
  const std::string cw = where + " channel";
  if (a.spec.kind == "identity") {
    require_keys(ch, {"kind"}, {"kind"}, cw);
  } else if (a.spec.kind == "as" || a.spec.kind == "ps" || a.spec.kind == "aps") {
    require_keys(ch, {"kind", "weights"}, {"kind"}, cw);
    a.spec.weights = get_str(ch, "weights", a.spec.weights, cw);
  } else if (a.spec.kind == "depolarizing") {
    require_keys(ch, {"kind", "p"}, {"kind", "p"}, cw);
    a.spec.p = get_num(ch, "p", 0.0, cw);
  } else if (a.spec.kind == "turbulence") {
    require_keys(ch,
                 {"kind", "h", "L", "lambda", "N", "dx", "r0", "n_masks", "mode", "slit_pitch",
                  "slit_width", "slit_height", "seed"},
                 {"kind"}, cw);
    a.spec.h = get_num(ch, "h", a.spec.h, cw);
    a.spec.path_length = get_num(ch, "L", a.spec.path_length, cw);
    a.spec.lambda = get_num(ch, "lambda", a.spec.lambda, cw);
    a.spec.grid_n = static_cast<int>(get_int(ch, "N", a.spec.grid_n, cw));
    a.spec.dx = get_num(ch, "dx", a.spec.dx, cw);
    a.spec.r0 = get_num(ch, "r0", a.spec.r0, cw);
    a.spec.n_masks = static_cast<int>(get_int(ch, "n_masks", a.spec.n_masks, cw));
    a.spec.mode = get_str(ch, "mode", a.spec.mode, cw);
    a.spec.slit_pitch = get_num(ch, "slit_pitch", a.spec.slit_pitch, cw);
    a.spec.slit_width = get_num(ch, "slit_width", a.spec.slit_width, cw);
    a.spec.slit_height = get_num(ch, "slit_height", a.spec.slit_height, cw);
    a.spec.seed = static_cast<std::uint64_t>(get_int(ch, "seed", 1, cw));
  } else if (a.spec.kind == "file") {
    require_keys(ch, {"kind", "path"}, {"kind", "path"}, cw);
    a.spec.file = get_str(ch, "path", "", cw);
  } else {
    throw BadConfig("unknown channel kind \"" + a.spec.kind + "\" in " + where);
  }

  if (cfg.contains("measurement")) {
    const json& m = cfg["measurement"];
    if (!m.is_object()) throw BadConfig("\"measurement\" must be an object in " + where);
    const std::string mw = where + " measurement";
    require_keys(m, {"mode", "shots", "seed"}, {"mode"}, mw);
    const std::string mode = get_str(m, "mode", "", mw);
    if (mode == "exact") {
      a.exact = true;
      a.shots = 0;
    } else if (mode == "shots") {
      a.exact = false;
      a.shots = get_int(m, "shots", 0, mw);
    } else {
      throw BadConfig("measurement mode must be exact or shots in " + where);
    }
    a.seed = static_cast<std::uint64_t>(get_int(m, "seed", 1, mw));
  } else {
    a.exact = true;
  }
}

int cmd_run_qpt(RunArgs a) {
  const int sources = (a.config_file.empty() ? 0 : 1) + (a.channel_file.empty() ? 0 : 1) +
                      (a.spec.kind.empty() ? 0 : 1);
  if (sources != 1) {
    throw BadConfig("provide exactly one channel source: --config, --channel-file, or --kind");
  }
  if (!a.config_file.empty()) load_config(a);
  if (!a.channel_file.empty()) {
    a.spec.kind = "file";
    a.spec.file = a.channel_file;
  }
  if (a.exact && a.shots > 0) throw BadConfig("--exact conflicts with --shots");
  if (!a.exact && a.shots <= 0) a.exact = true;
  if (!a.exact && a.shots < 1) throw BadConfig("--shots must be >= 1");
  if (!(a.rcond > 0.0 && a.rcond < 1.0)) throw BadConfig("--rcond must lie in (0, 1)");

  const KrausChannel ch = build_channel(a.spec);
  const std::optional<long long> shots =
      a.exact ? std::nullopt : std::optional<long long>(a.shots);

  const SqptRun run = run_sqpt(ch, shots, a.seed);
  const ChiMatrix truth = chi_from_kraus(ch);
  const double pf = process_fidelity(run.chi, truth);

  json cfg_canon;
  cfg_canon["channel"] = spec_to_json(a.spec);
  cfg_canon["mode"] = a.exact ? "exact" : "shots";
  cfg_canon["shots"] = a.exact ? 0 : a.shots;
  cfg_canon["seed"] = a.seed;
  cfg_canon["rcond"] = a.rcond;
  const std::string hash = hex64(fnv1a(cfg_canon.dump()));

  const std::string dir = prepare_out_dir(a.out_dir);
  Metadata meta = base_metadata(a.seed, hash);
  meta["d"] = static_cast<std::int64_t>(ch.dim());

  const std::string records_path = join(dir, "records.csv");
  const std::string chi_path = join(dir, "chi.json");
  const std::string report_path = join(dir, "report.json");
  write_records_csv(records_path, run.records);
  write_matrix_file(chi_path, "chi", run.chi.matrix(), meta);

  const PreparationBasis prep = preparation_basis(ch.dim());
  json preps = json::array();
  for (std::size_t i = 0; i < run.outputs.size(); ++i) {
    const ApplyResult truth_out = apply(ch, density_from_pure(prep.states[i]));
    json row;
    row["index"] = i;
    row["throughput"] = run.outputs[i].throughput;
    row["purity"] = purity(run.outputs[i].state);
    row["output_fidelity"] = fidelity(run.outputs[i].state, truth_out.state);
    preps.push_back(std::move(row));
  }

  json report;
  report["kind"] = "report";
  report["d"] = ch.dim();
  report["config"] = cfg_canon;
  report["config_hash"] = hash;
  report["trace_preserving"] = ch.trace_preserving();
  report["completeness_defect"] = ch.completeness_defect();
  report["process_fidelity"] = pf;
  report["anti_hermitian_residual"] = run.anti_hermitian_residual;
  report["chi_min_eigenvalue"] = run.chi.min_eigenvalue();
  report["preparations"] = std::move(preps);
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + report_path);
  out << report.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + report_path);

  std::printf("wrote %s, %s, %s\n", records_path.c_str(), chi_path.c_str(), report_path.c_str());
  std::printf("process_fidelity = %.12g\n", pf);
  return 0;
}

// ---- recover ---------------------------------------------------------------

struct RecoverArgs {
  std::string chi_file;
  std::string rho_file;
  std::string reference_file;
  double rcond = 1e-3;
  bool strict = false;
  std::string out_name = "recovered.json";
  std::string out_dir;
};

int cmd_recover(const RecoverArgs& a) {
  const MatrixFile chi_file = read_matrix_file(a.chi_file);
  if (chi_file.kind != "chi") throw BadConfig("--chi file must have kind \"chi\"");
  const int d2 = static_cast<int>(chi_file.matrix.rows());
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
  if (d < 2 || d * d != d2 || chi_file.matrix.cols() != d2) {
    throw BadConfig("--chi file must hold a d^2 x d^2 matrix");
  }
  const ChiMatrix chi(d, chi_file.matrix);

  const MatrixFile rho_file = read_matrix_file(a.rho_file);
  if (rho_file.kind != "density") throw BadConfig("--rho-out file must have kind \"density\"");
  const DensityMatrix rho_out((CMat(rho_file.matrix)));
  if (rho_out.dim() != d) throw BadConfig("state dimension does not match the process matrix");

  if (!(a.rcond > 0.0 && a.rcond < 1.0)) throw BadConfig("--rcond must lie in (0, 1)");

  int effective_rank = 0;
  const DensityMatrix rec = recover(chi, rho_out, a.rcond, a.strict, &effective_rank);
  if (effective_rank < d * d) {
    std::fprintf(stderr, "warning: effective rank %d below %d; recovery is regularized\n",
                 effective_rank, d * d);
  }

  json cfg_canon;
  cfg_canon["rcond"] = a.rcond;
  cfg_canon["strict"] = a.strict;
  const std::string hash = hex64(fnv1a(cfg_canon.dump()));
  Metadata meta = base_metadata(0, hash);
  meta["d"] = static_cast<std::int64_t>(d);
  meta["rcond"] = a.rcond;
  meta["effective_rank"] = static_cast<std::int64_t>(effective_rank);

  const std::string dir = prepare_out_dir(a.out_dir);
  const std::string out_path = join(dir, a.out_name);
  write_matrix_file(out_path, "density", rec.matrix(), meta);
  std::printf("wrote %s (effective rank %d of %d)\n", out_path.c_str(), effective_rank, d * d);

  if (!a.reference_file.empty()) {
    const MatrixFile ref_file = read_matrix_file(a.reference_file);
    if (ref_file.kind != "density") {
      throw BadConfig("--reference file must have kind \"density\"");
    }
    const DensityMatrix ref((CMat(ref_file.matrix)));
    std::printf("fidelity = %.12g\n", fidelity(rec, ref));
  }
  return 0;
}

// ---- turb-screens ----------------------------------------------------------

struct ScreensArgs {
  double h = 174.0;
  double path_length = 500.0;
  double lambda = 405e-9;
  int grid_n = 512;
  double dx = 0.028 / 64.0;
  double r0 = 0.0;
  int count = 4;
  std::uint64_t seed = 1;
  std::string prefix = "screen";
  std::string out_dir;
};

int cmd_turb_screens(const ScreensArgs& a) {
  if (a.count < 2) throw BadConfig("--count must be >= 2 for the structure function");
  const TurbulenceParams params =
      (a.r0 > 0.0) ? TurbulenceParams::with_r0(a.r0, a.h, a.path_length, a.lambda, a.grid_n, a.dx)
                   : TurbulenceParams::from_altitude(a.h, a.path_length, a.lambda, a.grid_n, a.dx);

  const std::vector<PhaseScreen> screens = phase_screen_ensemble(params, a.count, a.seed);
  const std::string dir = prepare_out_dir(a.out_dir);
  for (int i = 0; i < a.count; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%03d", a.prefix.c_str(), i);
    write_phase_screen_pgm(join(dir, std::string(name) + ".pgm"), screens[i]);
    write_phase_screen_raw(join(dir, std::string(name) + ".raw"), screens[i]);
  }

  std::vector<double> seps;
  for (int px : {4, 6, 8, 12, 16, 24, 32, 48, 64}) {
    if (px < a.grid_n) seps.push_back(px * a.dx);
  }
  const std::vector<double> d_est = structure_function(screens, seps);
  std::vector<double> d_theory(seps.size());
  for (std::size_t i = 0; i < seps.size(); ++i) {
    d_theory[i] = kStructureCoeff * std::pow(seps[i] / params.fried_r0, 5.0 / 3.0);
  }
  const double expo = fit_power_exponent(seps, d_est);
  write_structure_csv(join(dir, "structure.csv"), seps, d_est, d_theory, expo);

  std::printf("wrote %d screens and structure.csv to %s\n", a.count, dir.c_str());
  std::printf("fitted exponent = %.12g (target 5/3)\n", expo);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qudit channel simulation, process tomography, and state recovery"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-channel", "build a channel and store Kraus + chi");
  add_channel_flags(gen_cmd, gen.spec);
  gen_cmd->add_option("--seed", gen.spec.seed, "ensemble seed (turbulence)");
  gen_cmd->add_option("--out", gen.out_name, "output basename");
  gen_cmd->add_option("--out-dir", gen.out_dir, "output directory");

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run-qpt", "simulate tomography and reconstruct chi");
  add_channel_flags(run_cmd, run.spec);
  run_cmd->add_option("--channel-file", run.channel_file, "stored Kraus channel");
  run_cmd->add_option("--config", run.config_file, "experiment config JSON");
  run_cmd->add_flag("--exact", run.exact, "exact projection probabilities");
  run_cmd->add_option("--shots", run.shots, "shots per (preparation, basis)");
  run_cmd->add_option("--seed", run.seed, "sampling seed");
  run_cmd->add_option("--rcond", run.rcond, "recovery cutoff recorded in the report");
  run_cmd->add_option("--out-dir", run.out_dir, "output directory");

  RecoverArgs rec;
  CLI::App* rec_cmd = app.add_subcommand("recover", "invert a process matrix on an output state");
  rec_cmd->add_option("--chi", rec.chi_file, "chi matrix file")->required();
  rec_cmd->add_option("--rho-out", rec.rho_file, "output state file")->required();
  rec_cmd->add_option("--rcond", rec.rcond, "relative singular value cutoff");
  rec_cmd->add_flag("--strict", rec.strict, "fail when the transfer matrix is rank deficient");
  rec_cmd->add_option("--reference", rec.reference_file, "reference input state file");
  rec_cmd->add_option("--out", rec.out_name, "output file name");
  rec_cmd->add_option("--out-dir", rec.out_dir, "output directory");

  ScreensArgs scr;
  CLI::App* scr_cmd = app.add_subcommand("turb-screens", "generate phase screens and statistics");
  scr_cmd->add_option("--altitude", scr.h, "altitude above sea level, m");
  scr_cmd->add_option("--L", scr.path_length, "propagation path length, m");
  scr_cmd->add_option("--lambda", scr.lambda, "wavelength, m");
  scr_cmd->add_option("--N", scr.grid_n, "grid size, power of two >= 256");
  scr_cmd->add_option("--dx", scr.dx, "pixel size, m");
  scr_cmd->add_option("--r0", scr.r0, "Fried parameter override, m");
  scr_cmd->add_option("--count", scr.count, "number of screens");
  scr_cmd->add_option("--seed", scr.seed, "ensemble seed");
  scr_cmd->add_option("--prefix", scr.prefix, "screen file prefix");
  scr_cmd->add_option("--out-dir", scr.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_channel(gen);
    if (run_cmd->parsed()) return cmd_run_qpt(run);
    if (rec_cmd->parsed()) return cmd_recover(rec);
    if (scr_cmd->parsed()) return cmd_turb_screens(scr);
    throw BadConfig("no subcommand selected");
  } catch (const UnsupportedDimension& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const SingularBeyondRecovery& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const BadConfig& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const OutOfRange& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
