#include <doctest.h>

#include <cstring>
#include <random>

#include "meshot/errors.hpp"
#include "meshot/io.hpp"

using namespace meshot;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "meshot_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::uint32_t u32_at(const std::string& b, std::size_t off) {
  std::uint32_t v = 0;
  std::memcpy(&v, b.data() + off, 4);
  return v;
}

PowerCube sample_power_cube() {
  PowerCube c;
  c.values = Array3<double>(2, 3, 4, 0.0);
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values.flat()[i] = 0.25 * double(i) + 1e-3;
  c.grid.range = {1.5, 1.65};
  c.grid.azimuth = {-0.1, 0.0, 0.1};
  c.grid.elevation = {-0.2, -0.1, 0.0, 0.1};
  c.method = "music(3)";
  c.meta = R"({"extra_snapshots":7})";
  return c;
}

}  // namespace

TEST_CASE("raw cube round trip and header layout") {
  Array3<cplx> a(2, 3, 5);
  std::mt19937_64 rng(4);
  std::normal_distribution<float> g;
  for (auto& v : a.flat()) v = {double(g(rng)), double(g(rng))};
  const auto bytes = encode_raw_cube(a);
  CHECK(bytes.size() == 16 + 12 + 2 * 3 * 5 * 8);
  CHECK(bytes.substr(0, 8) == "MESHOTRC");
  CHECK(u32_at(bytes, 8) == 1);
  CHECK(u32_at(bytes, 16) == 2);
  CHECK(u32_at(bytes, 20) == 3);
  CHECK(u32_at(bytes, 24) == 5);
  float first[2];
  std::memcpy(first, bytes.data() + 28, 8);
  CHECK(first[0] == float(a(0, 0, 0).real()));
  CHECK(first[1] == float(a(0, 0, 0).imag()));
  float later[2];
  std::memcpy(later, bytes.data() + 28 + 8 * (1 * 15 + 2 * 5 + 4), 8);
  CHECK(later[1] == float(a(1, 2, 4).imag()));

  const auto back = decode_raw_cube(bytes);
  CHECK(back.dims() == a.dims());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(back.flat()[i] == a.flat()[i]);

  const auto p = scratch("raw.cube");
  write_raw_cube(p, a);
  CHECK(read_raw_cube(p) == back);
}

TEST_CASE("raw cube rejects malformed input") {
  const auto bytes = encode_raw_cube(Array3<cplx>(1, 2, 2, cplx(1, 2)));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_raw_cube(bad_magic), MalformedInputError);
  auto bad_version = bytes;
  bad_version[8] = 9;
  CHECK_THROWS_AS(decode_raw_cube(bad_version), MalformedInputError);
  CHECK_THROWS_AS(decode_raw_cube(bytes.substr(0, bytes.size() - 1)), MalformedInputError);
  CHECK_THROWS_AS(decode_raw_cube(bytes.substr(0, 10)), MalformedInputError);
  CHECK_THROWS_AS(decode_raw_cube(bytes + "x"), MalformedInputError);
  CHECK_THROWS_AS(read_raw_cube(scratch("missing.cube")), IoError);
}

TEST_CASE("power cube round trip") {
  const auto c = sample_power_cube();
  const auto bytes = encode_power_cube(c);
  CHECK(bytes.substr(0, 8) == "MESHOTPC");
  const auto back = decode_power_cube(bytes);
  CHECK(back.grid.range == c.grid.range);
  CHECK(back.grid.azimuth == c.grid.azimuth);
  CHECK(back.grid.elevation == c.grid.elevation);
  CHECK(back.method == c.method);
  CHECK(back.meta == c.meta);
  for (std::size_t i = 0; i < c.values.size(); ++i)
    CHECK(back.values.flat()[i] == double(float(c.values.flat()[i])));
  CHECK_THROWS_AS(decode_power_cube(bytes.substr(0, bytes.size() - 4)), MalformedInputError);
  CHECK_THROWS_AS(decode_power_cube(encode_raw_cube(Array3<cplx>(1, 1, 1))), MalformedInputError);

  const auto p = scratch("power.cube");
  write_power_cube(p, c);
  CHECK(encode_power_cube(read_power_cube(p)) == bytes);
}

TEST_CASE("atomic writes leave no temp file") {
  const auto p = scratch("nested/dir/out.txt");
  fs::remove_all(p.parent_path());
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  CHECK(read_file(p) == "second");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(p.parent_path())) ++n;
  CHECK(n == 1);
}

TEST_CASE("heatmaps") {
  Eigen::MatrixXd m(2, 3);
  m << 1.0, 0.1, 0.01, 1e-3, 1e-5, 0.0;
  const auto pgm = matrix_pgm(m, 40.0);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(pgm.size() == header.size() + 6);
  CHECK(pgm.substr(0, header.size()) == header);
  const auto px = [&](int i) { return int(static_cast<unsigned char>(pgm[header.size() + std::size_t(i)])); };
  CHECK(px(0) == 255);
  CHECK(px(1) == 191);
  CHECK(px(2) == 128);
  CHECK(px(3) == 64);
  CHECK(px(4) == 0);
  CHECK(px(5) == 0);
  CHECK_THROWS_AS(matrix_pgm(m, 0.0), ConfigError);

  Eigen::MatrixXd small(2, 2);
  small << 1, 2, 3, 4;
  CHECK(matrix_csv(small) == "1,2\n3,4\n");
  CHECK(matrix_csv(small, {10, 20}, {0.5, 1.5}) == "axis,0.5,1.5\n10,1,2\n20,3,4\n");
}

TEST_CASE("max projections") {
  const auto c = sample_power_cube();
  const auto ra = max_projection(c, Projection::range_azimuth);
  CHECK(ra.rows() == 2);
  CHECK(ra.cols() == 3);
  CHECK(ra(1, 2) == c.values(1, 2, 3));
  const auto ae = max_projection(c, Projection::azimuth_elevation);
  CHECK(ae(0, 0) == c.values(1, 0, 0));
  CHECK(max_projection(c, Projection::range_elevation)(0, 3) == c.values(0, 2, 3));
}

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}
