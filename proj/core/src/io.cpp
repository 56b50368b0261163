// SPDX-License-Identifier: Apache-2.0
#include "qpt/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qpt/errors.hpp"

namespace qpt {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr char kScreenMagic[8] = {'Q', 'P', 'T', 'S', 'C', 'R', 'N', '1'};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return buf.str();
}

json parse_json(const std::string& path) {
  const std::string text = read_text(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw BadConfig("malformed JSON in " + path);
  if (!j.is_object()) throw BadConfig("expected a JSON object in " + path);
  return j;
}

void require_keys(const json& j, const std::set<std::string>& keys, const std::string& path) {
  for (const auto& item : j.items()) {
    if (keys.count(item.key()) == 0) {
      throw BadConfig("unknown key \"" + item.key() + "\" in " + path);
    }
  }
  for (const std::string& k : keys) {
    if (!j.contains(k)) throw BadConfig("missing key \"" + k + "\" in " + path);
  }
}

json metadata_to_json(const Metadata& meta) {
  json j = json::object();
  for (const auto& [key, value] : meta) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j;
}

Metadata metadata_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw BadConfig("metadata must be an object in " + path);
  Metadata meta;
  for (const auto& item : j.items()) {
    const json& v = item.value();
    if (v.is_boolean()) {
      meta[item.key()] = v.get<bool>();
    } else if (v.is_number_integer()) {
      meta[item.key()] = v.get<std::int64_t>();
    } else if (v.is_number_float()) {
      meta[item.key()] = v.get<double>();
    } else if (v.is_string()) {
      meta[item.key()] = v.get<std::string>();
    } else {
      throw BadConfig("metadata values must be scalar in " + path);
    }
  }
  return meta;
}

json entries_to_json(const CMat& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      arr.push_back(m(r, c).real());
      arr.push_back(m(r, c).imag());
    }
  }
  return arr;
}

void entries_from_json(const json& arr, CMat& m, std::size_t offset, const std::string& path) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const json& re = arr[offset];
      const json& im = arr[offset + 1];
      if (!re.is_number() || !im.is_number()) {
        throw BadConfig("entries must be numbers in " + path);
      }
      m(r, c) = cplx(re.get<double>(), im.get<double>());
      offset += 2;
    }
  }
}

long long parse_ll(const std::string& cell, const std::string& path) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(cell, &pos);
  } catch (const std::exception&) {
    throw BadConfig("malformed integer cell in " + path);
  }
  if (pos != cell.size()) throw BadConfig("malformed integer cell in " + path);
  return v;
}

double parse_d(const std::string& cell, const std::string& path) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw BadConfig("malformed number cell in " + path);
  }
  if (pos != cell.size()) throw BadConfig("malformed number cell in " + path);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_kraus_file(const std::string& path, const KrausChannel& ch, const Metadata& meta) {
  json j;
  j["kind"] = "kraus";
  j["d"] = ch.dim();
  j["shape"] = {static_cast<std::int64_t>(ch.operators().size()), ch.dim(), ch.dim()};
  json arr = json::array();
  for (const CMat& op : ch.operators()) {
    for (Eigen::Index r = 0; r < op.rows(); ++r) {
      for (Eigen::Index c = 0; c < op.cols(); ++c) {
        arr.push_back(op(r, c).real());
        arr.push_back(op(r, c).imag());
      }
    }
  }
  j["entries"] = std::move(arr);
  j["metadata"] = metadata_to_json(meta);
  write_text(path, j.dump(2) + "\n");
}

KrausFile read_kraus_file(const std::string& path) {
  const json j = parse_json(path);
  require_keys(j, {"kind", "d", "shape", "entries", "metadata"}, path);
  if (!j["kind"].is_string() || j["kind"].get<std::string>() != "kraus") {
    throw BadConfig("kind must be \"kraus\" in " + path);
  }
  if (!j["d"].is_number_integer()) throw BadConfig("d must be an integer in " + path);
  const int d = j["d"].get<int>();
  const json& shape = j["shape"];
  if (!shape.is_array() || shape.size() != 3 || !shape[0].is_number_integer() ||
      !shape[1].is_number_integer() || !shape[2].is_number_integer()) {
    throw BadConfig("shape must be [n, d, d] in " + path);
  }
  const auto n_ops = shape[0].get<std::int64_t>();
  if (d < 2 || n_ops < 1 || shape[1].get<int>() != d || shape[2].get<int>() != d) {
    throw BadConfig("shape is inconsistent in " + path);
  }
  const json& arr = j["entries"];
  const std::size_t need = 2 * static_cast<std::size_t>(n_ops) * d * d;
  if (!arr.is_array() || arr.size() != need) {
    throw BadConfig("entries length does not match shape in " + path);
  }
  KrausFile file;
  file.dim = d;
  file.ops.reserve(static_cast<std::size_t>(n_ops));
  std::size_t offset = 0;
  for (std::int64_t k = 0; k < n_ops; ++k) {
    CMat op(d, d);
    entries_from_json(arr, op, offset, path);
    offset += 2 * static_cast<std::size_t>(d) * d;
    file.ops.push_back(std::move(op));
  }
  file.metadata = metadata_from_json(j["metadata"], path);
  return file;
}

void write_matrix_file(const std::string& path, const std::string& kind, const CMat& m,
                       const Metadata& meta) {
  if (kind != "chi" && kind != "density" && kind != "transfer") {
    throw BadConfig("matrix kind must be chi, density, or transfer");
  }
  json j;
  j["kind"] = kind;
  j["shape"] = {static_cast<std::int64_t>(m.rows()), static_cast<std::int64_t>(m.cols())};
  j["entries"] = entries_to_json(m);
  j["metadata"] = metadata_to_json(meta);
  write_text(path, j.dump(2) + "\n");
}

MatrixFile read_matrix_file(const std::string& path) {
  const json j = parse_json(path);
  require_keys(j, {"kind", "shape", "entries", "metadata"}, path);
  if (!j["kind"].is_string()) throw BadConfig("kind must be a string in " + path);
  const std::string kind = j["kind"].get<std::string>();
  if (kind != "chi" && kind != "density" && kind != "transfer") {
    throw BadConfig("kind must be chi, density, or transfer in " + path);
  }
  const json& shape = j["shape"];
  if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_integer() ||
      !shape[1].is_number_integer()) {
    throw BadConfig("shape must be [rows, cols] in " + path);
  }
  const auto rows = shape[0].get<std::int64_t>();
  const auto cols = shape[1].get<std::int64_t>();
  if (rows < 1 || cols < 1) throw BadConfig("shape is inconsistent in " + path);
  const json& arr = j["entries"];
  if (!arr.is_array() || arr.size() != 2 * static_cast<std::size_t>(rows) * cols) {
    throw BadConfig("entries length does not match shape in " + path);
  }
  MatrixFile file;
  file.kind = kind;
  file.matrix = CMat(rows, cols);
  entries_from_json(arr, file.matrix, 0, path);
  file.metadata = metadata_from_json(j["metadata"], path);
  return file;
}

void write_records_csv(const std::string& path, const std::vector<MeasurementRecord>& records) {
  std::string text = "prep_index,basis,outcome,probability,shots\n";
  for (const MeasurementRecord& r : records) {
    text += std::to_string(r.prep);
    text += ',';
    text += std::to_string(r.basis);
    text += ',';
    text += std::to_string(r.outcome);
    text += ',';
    text += format_double(r.probability);
    text += ',';
    text += std::to_string(r.shots);
    text += '\n';
  }
  write_text(path, text);
}

std::vector<MeasurementRecord> read_records_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "prep_index,basis,outcome,probability,shots") {
    throw BadConfig("missing records header in " + path);
  }
  std::vector<MeasurementRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        cells.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (cells.size() != 5) throw BadConfig("expected 5 cells per row in " + path);
    MeasurementRecord r;
    r.prep = static_cast<int>(parse_ll(cells[0], path));
    r.basis = static_cast<int>(parse_ll(cells[1], path));
    r.outcome = static_cast<int>(parse_ll(cells[2], path));
    r.probability = parse_d(cells[3], path);
    r.shots = parse_ll(cells[4], path);
    if (r.prep < 0 || r.basis < 0 || r.outcome < 0 || r.shots < 0) {
      throw BadConfig("negative index in " + path);
    }
    records.push_back(r);
  }
  return records;
}

void write_phase_screen_pgm(const std::string& path, const PhaseScreen& s) {
  if (s.phi.size() != static_cast<std::size_t>(s.n) * s.n) {
    throw GeometryMismatch("screen buffer does not match its grid");
  }
  std::string text = "P5\n" + std::to_string(s.n) + " " + std::to_string(s.n) + "\n255\n";
  text.reserve(text.size() + s.phi.size());
  for (double v : s.phi) {
    double w = std::fmod(v, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    const long g = std::lround((1.0 - w / kTwoPi) * 255.0);
    text += static_cast<char>(static_cast<unsigned char>(g));
  }
  write_text(path, text);
}

void write_phase_screen_raw(const std::string& path, const PhaseScreen& s) {
  if (s.phi.size() != static_cast<std::size_t>(s.n) * s.n) {
    throw GeometryMismatch("screen buffer does not match its grid");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kScreenMagic, sizeof(kScreenMagic));
  const std::int64_t n = s.n;
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&s.dx), sizeof(s.dx));
  out.write(reinterpret_cast<const char*>(&s.r0), sizeof(s.r0));
  out.write(reinterpret_cast<const char*>(&s.seed), sizeof(s.seed));
  out.write(reinterpret_cast<const char*>(s.phi.data()),
            static_cast<std::streamsize>(s.phi.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path);
}

PhaseScreen read_phase_screen_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kScreenMagic, sizeof(magic)) != 0) {
    throw BadConfig("bad screen magic in " + path);
  }
  std::int64_t n = 0;
  PhaseScreen s;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&s.dx), sizeof(s.dx));
  in.read(reinterpret_cast<char*>(&s.r0), sizeof(s.r0));
  in.read(reinterpret_cast<char*>(&s.seed), sizeof(s.seed));
  if (!in || n < 1 || n > (1 << 16)) throw BadConfig("bad screen header in " + path);
  s.n = static_cast<int>(n);
  s.phi.resize(static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(s.phi.data()),
          static_cast<std::streamsize>(s.phi.size() * sizeof(double)));
  if (!in) throw BadConfig("truncated screen data in " + path);
  return s;
}

void write_structure_csv(const std::string& path, const std::vector<double>& separations,
                         const std::vector<double>& estimated, const std::vector<double>& theory,
                         double fitted_exponent) {
  if (separations.size() != estimated.size() || separations.size() != theory.size()) {
    throw BadConfig("structure columns must have equal length");
  }
  std::string text = "# fitted_exponent = " + format_double(fitted_exponent) + "\n";
  text += "r,D,D_theory\n";
  for (std::size_t i = 0; i < separations.size(); ++i) {
    text += format_double(separations[i]);
    text += ',';
    text += format_double(estimated[i]);
    text += ',';
    text += format_double(theory[i]);
    text += '\n';
  }
  write_text(path, text);
}

}  // namespace qpt
