#include "meshot/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "meshot/errors.hpp"

namespace meshot {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr char kRawMagic[8] = {'M', 'E', 'S', 'H', 'O', 'T', 'R', 'C'};
constexpr char kPowerMagic[8] = {'M', 'E', 'S', 'H', 'O', 'T', 'P', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, const char* what) : bytes_(bytes), what_(what) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw MalformedInputError(std::string(what_) + ": truncated file", 0);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

void header(std::string& out, const char* magic) {
  out.append(magic, 8);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, 0);
}

void check_header(Reader& in, const char* magic, const char* what) {
  if (in.str(8) != std::string(magic, 8)) throw MalformedInputError(std::string(what) + ": bad magic", 0);
  const auto version = in.get<std::uint32_t>();
  if (version != kVersion) {
    throw MalformedInputError(std::string(what) + ": unsupported version " + std::to_string(version), 0);
  }
  in.get<std::uint32_t>();
}

std::uint32_t dim32(std::size_t n) {
  if (n > 0xffffffffu) throw DimensionError("dimension exceeds 32 bits");
  return static_cast<std::uint32_t>(n);
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string encode_raw_cube(const Array3<cplx>& samples) {
  std::string out;
  out.reserve(28 + samples.size() * 8);
  header(out, kRawMagic);
  for (std::size_t i = 0; i < 3; ++i) put<std::uint32_t>(out, dim32(samples.dim(i)));
  for (const auto& v : samples.flat()) {
    put<float>(out, static_cast<float>(v.real()));
    put<float>(out, static_cast<float>(v.imag()));
  }
  return out;
}

Array3<cplx> decode_raw_cube(const std::string& bytes) {
  Reader in(bytes, "raw cube");
  check_header(in, kRawMagic, "raw cube");
  const std::size_t n0 = in.get<std::uint32_t>(), n1 = in.get<std::uint32_t>(), n2 = in.get<std::uint32_t>();
  if (in.remaining() != n0 * n1 * n2 * 8) throw MalformedInputError("raw cube: payload size does not match dims", 0);
  Array3<cplx> a(n0, n1, n2);
  for (auto& v : a.flat()) {
    const float re = in.get<float>();
    const float im = in.get<float>();
    v = {re, im};
  }
  return a;
}

void write_raw_cube(const fs::path& path, const Array3<cplx>& samples) {
  write_file_atomic(path, encode_raw_cube(samples));
}

Array3<cplx> read_raw_cube(const fs::path& path) { return decode_raw_cube(read_file(path)); }

std::string encode_power_cube(const PowerCube& cube) {
  const auto& g = cube.grid;
  if (g.range.size() != cube.bins() || g.azimuth.size() != cube.azimuths() ||
      g.elevation.size() != cube.elevations()) {
    throw DimensionError("power cube: values do not match grid axes");
  }
  std::string out;
  header(out, kPowerMagic);
  for (std::size_t i = 0; i < 3; ++i) put<std::uint32_t>(out, dim32(cube.values.dim(i)));
  for (const auto* axis : {&g.range, &g.azimuth, &g.elevation})
    for (double v : *axis) put<double>(out, v);
  for (const auto* s : {&cube.method, &cube.meta}) {
    put<std::uint32_t>(out, dim32(s->size()));
    out += *s;
  }
  for (double v : cube.values.flat()) put<float>(out, static_cast<float>(v));
  return out;
}

PowerCube decode_power_cube(const std::string& bytes) {
  Reader in(bytes, "power cube");
  check_header(in, kPowerMagic, "power cube");
  const std::size_t nr = in.get<std::uint32_t>(), na = in.get<std::uint32_t>(), ne = in.get<std::uint32_t>();
  PowerCube cube;
  for (auto [axis, n] : {std::pair{&cube.grid.range, nr}, {&cube.grid.azimuth, na}, {&cube.grid.elevation, ne}}) {
    in.need(n * 8);
    axis->resize(n);
    for (auto& v : *axis) v = in.get<double>();
  }
  cube.method = in.str(in.get<std::uint32_t>());
  cube.meta = in.str(in.get<std::uint32_t>());
  if (in.remaining() != nr * na * ne * 4) throw MalformedInputError("power cube: payload size does not match dims", 0);
  cube.values = Array3<double>(nr, na, ne);
  for (auto& v : cube.values.flat()) v = in.get<float>();
  return cube;
}

void write_power_cube(const fs::path& path, const PowerCube& cube) {
  write_file_atomic(path, encode_power_cube(cube));
}

PowerCube read_power_cube(const fs::path& path) { return decode_power_cube(read_file(path)); }

std::string matrix_csv(const Eigen::MatrixXd& m, const std::vector<double>& row_axis,
                       const std::vector<double>& col_axis) {
  std::ostringstream os;
  os << std::setprecision(9);
  const bool rows = row_axis.size() == static_cast<std::size_t>(m.rows());
  if (col_axis.size() == static_cast<std::size_t>(m.cols()) && m.cols() > 0) {
    if (rows) os << "axis";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j || rows ? "," : "") << col_axis[static_cast<std::size_t>(j)];
    os << "\n";
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (rows) os << row_axis[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j || rows ? "," : "") << m(i, j);
    os << "\n";
  }
  return os.str();
}

std::string matrix_pgm(const Eigen::MatrixXd& m, double window_db) {
  if (!(window_db > 0.0)) throw ConfigError("heatmap: dB window must be > 0");
  std::string out = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
  const double peak = m.size() ? m.maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double level = 0.0;
      if (peak > 0.0 && m(i, j) > 0.0) {
        level = (10.0 * std::log10(m(i, j) / peak) + window_db) / window_db;
      }
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(level, 0.0, 1.0)))));
    }
  }
  return out;
}

Eigen::MatrixXd max_projection(const PowerCube& cube, Projection p) {
  const auto nr = static_cast<Eigen::Index>(cube.bins()), na = static_cast<Eigen::Index>(cube.azimuths()),
             ne = static_cast<Eigen::Index>(cube.elevations());
  Eigen::MatrixXd out;
  switch (p) {
    case Projection::range_azimuth: out = Eigen::MatrixXd::Zero(nr, na); break;
    case Projection::range_elevation: out = Eigen::MatrixXd::Zero(nr, ne); break;
    case Projection::azimuth_elevation: out = Eigen::MatrixXd::Zero(na, ne); break;
  }
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index a = 0; a < na; ++a)
      for (Eigen::Index e = 0; e < ne; ++e) {
        const double v = cube.values(std::size_t(r), std::size_t(a), std::size_t(e));
        double& cell = p == Projection::range_azimuth     ? out(r, a)
                       : p == Projection::range_elevation ? out(r, e)
                                                          : out(a, e);
        cell = std::max(cell, v);
      }
  return out;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace meshot
