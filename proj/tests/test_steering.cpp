#include <doctest.h>

#include <Eigen/SVD>
#include <numbers>

#include "meshot/signal_sim.hpp"
#include "meshot/steering.hpp"

using namespace meshot;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

EgoMotion motion(double vx, double vy, double vz) {
  EgoMotion m;
  m.velocity = {vx, vy, vz};
  return m;
}

// One slow-time column of the stacked data: fast-time sample 0 at l_n.
Eigen::VectorXcd snapshot_column(const RawDataCube& cube, const SnapshotPlan& plan) {
  const auto nc = cube.samples.dim(0);
  Eigen::VectorXcd x(static_cast<Eigen::Index>(plan.positions() * nc));
  for (int n = 0; n < plan.positions(); ++n)
    for (std::size_t c = 0; c < nc; ++c)
      x(static_cast<Eigen::Index>(std::size_t(n) * nc + c)) =
          cube.samples(c, static_cast<std::size_t>(plan.indices[std::size_t(n)]), 0);
  return x;
}

double match(const SteeringVector& sv, const Eigen::VectorXcd& x) {
  return std::abs(sv.values.dot(x)) / (sv.values.norm() * x.norm());
}

}  // namespace

TEST_CASE("no compensation needed at the exact speed with pure forward motion") {
  RadarConfig cfg;
  const double vy = cfg.spacing() / (2.0 * 4 * cfg.prt);
  const auto m = motion(0, vy, 0);
  const auto plan = build_plan(cfg, m, 0, 50);
  for (int n = 0; n <= 50; n += 7)
    for (double th : {-60.0, 0.0, 35.0})
      for (double ph : {-20.0, 0.0, 45.0}) CHECK(std::abs(compensation_phase(plan, m, th * kDeg, ph * kDeg, n, cfg.wavelength())) < 1e-12);
}

TEST_CASE("cross-track compensation grows linearly with n") {
  RadarConfig cfg;
  const auto m = motion(-1, 15, 2);
  const auto plan = build_plan(cfg, m, 0, 100);
  const double th = 10 * kDeg, ph = 20 * kDeg;
  const double c1 = compensation_terms(plan, m, th, ph, 1, cfg.wavelength()).cross;
  CHECK(std::abs(c1) > 0.0);
  for (int n = 0; n <= 100; n += 9) CHECK(compensation_terms(plan, m, th, ph, n, cfg.wavelength()).cross == doctest::Approx(n * c1));
  CHECK(compensation_phase(plan, m, th, ph, 0, cfg.wavelength()) == 0.0);

  const auto vz_only = motion(0, 15, 2);
  CHECK(compensation_terms(plan, vz_only, 0.0, 0.0, 37, cfg.wavelength()).cross == 0.0);
}

TEST_CASE("compensated azimuth phase equals the two-way platform displacement") {
  RadarConfig cfg;
  for (double vy : {15.0, -15.0, 9.3}) {
    const auto m = motion(-1, vy, 2);
    const auto plan = build_plan(cfg, m, 5, 40);
    const auto ctx = SteeringContext::make(cfg, plan, m, true);
    for (double th : {-50.0, 5.0, 70.0})
      for (double ph : {-30.0, 12.0}) {
        const Eigen::Vector3d u = spherical_to_cartesian(1.0, th * kDeg, ph * kDeg);
        for (int n = 0; n <= 40; n += 5) {
          const double displacement = plan.elapsed(n) * m.velocity.dot(u);
          CHECK(azimuth_cycles(ctx, th * kDeg, ph * kDeg, n) ==
                doctest::Approx(2.0 * displacement / cfg.wavelength()).epsilon(1e-12));
        }
      }
  }
}

TEST_CASE("steering vector examples") {
  RadarConfig cfg;
  cfg.num_elev = 4;
  const auto m = motion(0, 15, 0);
  auto ctx = SteeringContext::make(cfg, build_plan(cfg, m, 0, 6), m, false);
  const auto ones = steering_vector(0.0, 0.0, ctx);
  CHECK(ones.values.size() == 28);
  for (Eigen::Index i = 0; i < ones.values.size(); ++i) CHECK(std::abs(ones.values(i) - 1.0) < 1e-15);

  auto ctx0 = SteeringContext::make(cfg, build_plan(cfg, m, 0, 0), m, true);
  const auto sv = steering_vector(0.3, 30 * kDeg, ctx0);
  REQUIRE(sv.values.size() == 4);
  for (int q = 0; q < 4; ++q) {
    const cplx expected = std::polar(1.0, -kPi * 0.5 * q);
    CHECK(std::abs(sv.values(q) - expected) < 1e-12);
  }
  CHECK(sv.values(0) == cplx(1.0, 0.0));
}

TEST_CASE("dbf weight") {
  RadarConfig cfg;
  cfg.num_elev = 5;
  const auto m = motion(-1, 15, 2);
  const auto ctx = SteeringContext::make(cfg, build_plan(cfg, m, 0, 9), m, true);
  const auto sv = steering_vector(0.2, -0.4, ctx);
  const auto w = dbf_weight(sv);
  const double big_m = double(sv.values.size());
  CHECK(std::abs(w.norm() - 1.0) < 1e-12);
  CHECK(std::abs(w.dot(sv.values) - std::sqrt(big_m)) < 1e-12);
  CHECK((w - sv.values / std::sqrt(big_m)).norm() < 1e-12);
  SteeringVector one;
  one.values = Eigen::VectorXcd::Ones(1);
  CHECK(dbf_weight(one)(0) == cplx(1.0, 0.0));
}

TEST_CASE("Kronecker structure is rank one") {
  RadarConfig cfg;
  cfg.num_elev = 6;
  cfg.num_azimuth = 3;
  const auto m = motion(-1, 15, 2);
  const auto ctx = SteeringContext::make(cfg, build_plan(cfg, m, 0, 30), m, true);
  for (double th : {-1.2, 0.1, 0.9}) {
    const auto sv = steering_vector(th, 0.3, ctx);
    const auto nc = static_cast<Eigen::Index>(ctx.channels.size());
    Eigen::MatrixXcd mat(ctx.plan.positions(), nc);
    for (Eigen::Index n = 0; n < mat.rows(); ++n) mat.row(n) = sv.values.segment(n * nc, nc).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
    const auto s = svd.singularValues();
    CHECK(s(1) / s(0) < 1e-10);
    for (Eigen::Index i = 0; i < sv.values.size(); ++i) CHECK(std::abs(std::abs(sv.values(i)) - 1.0) < 1e-12);
  }
}

TEST_CASE("compensation derivatives match the analytic form") {
  RadarConfig cfg;
  const auto m = motion(-1, 15, 2);
  const auto plan = build_plan(cfg, m, 0, 60);
  const double lam = cfg.wavelength();
  const double h = 1e-6;
  for (int n : {1, 17, 60})
    for (double th : {-0.7, 0.2, 1.1})
      for (double ph : {-0.4, 0.05, 0.6}) {
        const double le = plan.residual[std::size_t(n)], t = plan.elapsed(n);
        const auto& v = m.velocity;
        const double d_theta = (-2.0 * v.y() * le * std::cos(th) * std::cos(ph) + 2.0 * t * (-v.x() * std::sin(th) * std::cos(ph))) / lam;
        const double d_phi = (2.0 * v.y() * le * std::sin(th) * std::sin(ph) +
                              2.0 * t * (-v.x() * std::cos(th) * std::sin(ph) + v.z() * std::cos(ph))) / lam;
        const double fd_theta = (compensation_phase(plan, m, th + h, ph, n, lam) - compensation_phase(plan, m, th - h, ph, n, lam)) / (2 * h);
        const double fd_phi = (compensation_phase(plan, m, th, ph + h, n, lam) - compensation_phase(plan, m, th, ph - h, n, lam)) / (2 * h);
        CHECK(fd_theta == doctest::Approx(d_theta).epsilon(1e-6));
        CHECK(fd_phi == doctest::Approx(d_phi).epsilon(1e-6));
      }
}

TEST_CASE("compensation table matches per-angle evaluation") {
  RadarConfig cfg;
  const auto m = motion(-1, 15, 2);
  const auto ctx = SteeringContext::make(cfg, build_plan(cfg, m, 0, 20), m, true);
  const std::vector<std::pair<double, double>> angles{{0.1, 0.2}, {-0.5, 0.0}, {1.0, -0.3}};
  const auto table = compensation_table(ctx, angles);
  CHECK(table.rows() == 21);
  CHECK(table.cols() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(table(0, j) == 0.0);
    for (int n = 0; n < 21; ++n)
      CHECK(table(n, j) == compensation_phase(ctx.plan, m, angles[std::size_t(j)].first, angles[std::size_t(j)].second, n, ctx.lambda));
  }
}

TEST_CASE("matched filter against simulated data") {
  RadarConfig cfg;
  cfg.num_elev = 16;
  for (double vy : {15.0, -15.0}) {
    const auto m = motion(-1, vy, 2);
    const auto plan = build_plan(cfg, m, 0, 127);
    const double th = 10 * kDeg, ph = 20 * kDeg;
    // 100 m keeps the 12 cm synthetic aperture in the far field.
    Scene s;
    s.scatterers.push_back({spherical_to_cartesian(100.0, th, ph), 1.0});
    const auto cube = simulate_frame(s, cfg, m);
    const auto x = snapshot_column(cube, plan);
    const double with = match(steering_vector(th, ph, SteeringContext::make(cfg, plan, m, true)), x);
    const double without = match(steering_vector(th, ph, SteeringContext::make(cfg, plan, m, false)), x);
    MESSAGE("vy " << vy << ": matched " << with << ", uncompensated " << without);
    CHECK(with >= 0.98);
    CHECK(without < 0.9);
  }
}
