#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "meshot/errors.hpp"
#include "meshot/metrics.hpp"

using namespace meshot;

namespace {

Mask mask_of(std::initializer_list<int> bits) {
  Mask m(1, 1, bits.size(), 0);
  std::size_t i = 0;
  for (int b : bits) m.flat()[i++] = std::uint8_t(b);
  return m;
}

PowerCube cube_of(std::size_t nr, std::size_t na, std::size_t ne, double value) {
  PowerCube c;
  c.values = Array3<double>(nr, na, ne, value);
  for (std::size_t i = 0; i < nr; ++i) c.grid.range.push_back(1.0 + 0.5 * double(i));
  for (std::size_t i = 0; i < na; ++i) c.grid.azimuth.push_back(-0.3 + 0.1 * double(i));
  for (std::size_t i = 0; i < ne; ++i) c.grid.elevation.push_back(-0.2 + 0.1 * double(i));
  return c;
}

}  // namespace

TEST_CASE("hand-built confusion case") {
  const auto c = confusion(mask_of({1, 1, 0, 0}), mask_of({1, 0, 1, 0}));
  CHECK(c.tp == 1);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 1);
  const auto r = report(c);
  for (double v : {r.accuracy, r.precision, r.sensitivity, r.specificity, r.auc, r.f_score})
    CHECK(std::abs(v - 0.5) < 1e-12);
}

TEST_CASE("identical and disjoint masks") {
  const auto truth = mask_of({1, 0, 1, 0, 0, 1, 0});
  const auto same = report(confusion(truth, truth));
  CHECK(same.counts.tp == 3);
  CHECK(same.counts.tn == 4);
  CHECK(same.accuracy == 1.0);
  CHECK(same.f_score == 1.0);

  const auto dis = report(confusion(mask_of({1, 0, 0}), mask_of({0, 1, 0})));
  CHECK(dis.counts.tp == 0);
  CHECK(dis.f_score == 0.0);

  CHECK_THROWS_AS(confusion(mask_of({1, 0}), mask_of({1, 0, 0})), DimensionError);
}

TEST_CASE("undefined metrics are NaN") {
  const auto r = report(confusion(mask_of({0, 0, 0}), mask_of({1, 0, 0})));
  CHECK(std::isnan(r.precision));
  CHECK(r.sensitivity == 0.0);
  CHECK(r.f_score == 0.0);
  const auto empty = report(confusion(mask_of({0, 0}), mask_of({0, 0})));
  CHECK(std::isnan(empty.sensitivity));
  CHECK(std::isnan(empty.f_score));
  CHECK(empty.specificity == 1.0);
}

TEST_CASE("confusion metrics: identities and permutation invariance") {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution bit(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    Mask d(3, 4, 5, 0), t(3, 4, 5, 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      d.flat()[i] = bit(rng);
      t.flat()[i] = bit(rng);
    }
    const auto r = report(confusion(d, t));
    CHECK(r.counts.total() == d.size());
    if (!std::isnan(r.auc)) CHECK(r.auc == doctest::Approx((r.sensitivity + r.specificity) / 2));
    if (r.counts.tp > 0) {
      CHECK(r.f_score == doctest::Approx(2 * r.precision * r.sensitivity / (r.precision + r.sensitivity)));
      CHECK(r.f_score <= 1.0);
      CHECK((r.f_score == 1.0) == (r.counts.fp == 0 && r.counts.fn == 0));
    }
    std::vector<std::size_t> perm(d.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Mask pd = d, pt = t;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      pd.flat()[i] = d.flat()[perm[i]];
      pt.flat()[i] = t.flat()[perm[i]];
    }
    const auto p = confusion(pd, pt);
    CHECK(p.tp == r.counts.tp);
    CHECK(p.fp == r.counts.fp);
    CHECK(p.tn == r.counts.tn);
    CHECK(p.fn == r.counts.fn);
  }
  // tp + fn = fp + tn makes auc equal accuracy.
  const auto sym = report({3, 2, 5, 4});
  CHECK(sym.auc == doctest::Approx(sym.accuracy));
}

TEST_CASE("voxelise thresholds against the median floor") {
  auto c = cube_of(3, 3, 3, 1.0);
  c.values(1, 1, 1) = 1000.0;
  c.values(1, 1, 2) = 50.0;
  const auto m = voxelise(c, 20.0);
  std::size_t on = 0;
  for (auto v : m.flat()) on += v;
  CHECK(on == 1);
  CHECK(m(1, 1, 1) == 1);

  c.values(0, 0, 0) = 0.0;
  const auto all = voxelise(c, -1e9);
  CHECK(all(0, 0, 0) == 0);
  CHECK(all(2, 2, 2) == 1);

  const auto flat = voxelise(cube_of(2, 2, 2, 3.0), 20.0);
  CHECK(std::all_of(flat.flat().begin(), flat.flat().end(), [](auto v) { return v == 0; }));
  CHECK_THROWS_AS(voxelise(cube_of(2, 2, 2, 0.0), 20.0), DegenerateInputError);
}

TEST_CASE("truth voxels") {
  const auto c = cube_of(4, 7, 5, 0.0);
  Scene s;
  s.scatterers.push_back({spherical_to_cartesian(2.02, 0.1, -0.1), 1.0});
  s.scatterers.push_back({spherical_to_cartesian(2.0, 0.09, -0.11), 1.0});
  s.scatterers.push_back({spherical_to_cartesian(50.0, 0.0, 0.0), 1.0});
  const auto m = truth_voxels(s, c.grid);
  std::size_t on = 0;
  for (auto v : m.flat()) on += v;
  CHECK(on == 1);
  CHECK(m(2, 4, 1) == 1);
}

TEST_CASE("image contrast") {
  for (int n : {4, 9, 25}) {
    Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(1, n);
    one_hot(0, n / 2) = 3.0;
    CHECK(image_contrast(one_hot) == doctest::Approx(std::sqrt(double(n - 1))));
    CHECK(image_contrast(one_hot, ContrastMode::intensity) == doctest::Approx(std::sqrt(double(n - 1))));
  }
  CHECK(image_contrast(Eigen::MatrixXd::Constant(3, 4, 2.0)) == 0.0);
  CHECK_THROWS_AS(image_contrast(Eigen::MatrixXd::Zero(3, 3)), DegenerateInputError);

  const Eigen::MatrixXd r = Eigen::MatrixXd::Random(6, 5).cwiseAbs();
  CHECK(image_contrast(r * 17.0) == doctest::Approx(image_contrast(r)));
  CHECK(image_contrast(r * 17.0, ContrastMode::intensity) == doctest::Approx(image_contrast(r, ContrastMode::intensity)));

  // Amplitude of [1, 4] is [1, 2]: std 0.5, mean 1.5.
  Eigen::MatrixXd two(1, 2);
  two << 1.0, 4.0;
  CHECK(image_contrast(two) == doctest::Approx(1.0 / 3.0));

  auto c = cube_of(3, 4, 2, 0.0);
  c.values(1, 2, 0) = 5.0;
  // Only range 1 was imaged: one-hot over its 4 x 2 cells, and over the 4
  // azimuth cells of the elevation slice that holds the peak.
  CHECK(plane_contrast(c, Plane::azimuth_elevation) == doctest::Approx(std::sqrt(7.0)));
  CHECK(plane_contrast(c, Plane::range_azimuth) == doctest::Approx(std::sqrt(3.0)));
  c.values(0, 0, 0) = 5.0;
  c.values(0, 0, 1) = 5.0;
  // Range 0 now imaged: the elevation-0 slice is two one-hots in 8 cells, the
  // elevation-1 slice a one-hot in 8 cells.
  CHECK(plane_contrast(c, Plane::range_azimuth) == doctest::Approx((std::sqrt(3.0) + std::sqrt(7.0)) / 2));
}

TEST_CASE("dynamic range ratio") {
  auto a = cube_of(2, 3, 2, 1.0);
  a.values(0, 1, 1) = 100.0;
  a.values(1, 1, 1) = 0.0;
  CHECK(dynamic_range_db(a) == doctest::Approx(20.0));
  CHECK(dynamic_range_ratio(a, a) == doctest::Approx(1.0));
  auto b = a;
  for (auto& v : b.values.flat()) v *= 10.0;
  CHECK(dynamic_range_ratio(a, b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(dynamic_range_ratio(a, cube_of(2, 2, 2, 4.0)), DegenerateInputError);
}

TEST_CASE("report serialization round trip") {
  auto c = cube_of(3, 3, 3, 1.0);
  c.values(1, 1, 1) = 1e4;
  c.method = "dbf";
  Scene s;
  s.scatterers.push_back({spherical_to_cartesian(1.5, -0.3, -0.1), 1.0});
  const auto r = evaluate(c, s, 20.0);
  CHECK(r.counts.tp == 0);
  CHECK(r.counts.fp == 1);
  CHECK(r.counts.fn == 1);
  CHECK(r.f_score == 0.0);
  const auto back = report_from_json(to_json(r));
  CHECK(back.counts.fp == 1);
  CHECK(back.method == "dbf");
  CHECK(back.accuracy == doctest::Approx(r.accuracy));
  CHECK(back.precision == 0.0);
  const auto undefined = report({0, 0, 5, 0});
  const auto text = to_json(undefined);
  CHECK(text.find("\"precision\": null") != std::string::npos);
  CHECK(std::isnan(report_from_json(text).precision));
  CHECK(back.contrast.range_azimuth == doctest::Approx(r.contrast.range_azimuth));
  CHECK(back.dynamic_range_db == doctest::Approx(40.0));
  CHECK(contrast_csv(r).rfind("plane,contrast\n", 0) == 0);
  CHECK_THROWS_AS(report_from_json("{"), MalformedInputError);
  CHECK_THROWS_AS(report_from_json("{\"method\": \"x\"}"), MalformedInputError);
}
