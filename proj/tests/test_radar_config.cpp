#include <doctest.h>

#include <cstring>
#include <numbers>

#include "meshot/errors.hpp"
#include "meshot/radar_config.hpp"
#include "meshot/snapshot.hpp"

using namespace meshot;

TEST_CASE("derived parameters of the point-target radar") {
  RadarConfig cfg;
  const auto p = derived_params(cfg);
  CHECK(p.mu == doctest::Approx(6.25e13));
  CHECK(p.samples_per_chirp == 512);
  CHECK(p.range_res == doctest::Approx(0.1499).epsilon(1e-3));
  CHECK(p.lambda == doctest::Approx(299792458.0 / 77e9));
  CHECK(p.unambiguous_range == doctest::Approx(32e6 * 299792458.0 / (4.0 * 6.25e13)));

  RadarConfig wide = cfg;
  wide.bandwidth *= 2.0;
  CHECK(derived_params(wide).range_res == doctest::Approx(p.range_res / 2.0));

  RadarConfig cb = cfg;
  cb.complex_baseband = true;
  CHECK(derived_params(cb).unambiguous_range == doctest::Approx(2.0 * p.unambiguous_range));
  CHECK(usable_range_bins(cfg) == 256);
  CHECK(usable_range_bins(cb) == 512);
}

TEST_CASE("derived parameters are pure") {
  RadarConfig cfg;
  cfg.f0 = 78.5e9;
  const auto a = derived_params(cfg);
  const auto b = derived_params(cfg);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  CHECK(a.lambda * 1e3 == doctest::Approx(299792458.0 / 78.5e9 * 1e3).epsilon(1e-4 / 3.8));
  CHECK(std::abs(a.lambda * 1e3 - 3.8190) < 1e-4);
}

TEST_CASE("validation names the field") {
  RadarConfig cfg;
  cfg.prt = 8e-6;
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("radar.prt") != std::string::npos);
  }
  RadarConfig few;
  few.sample_rate = 1e5;
  CHECK_THROWS_AS(few.validate(), ConfigError);
  RadarConfig neg;
  neg.bandwidth = -1.0;
  CHECK_THROWS_AS(neg.validate(), ConfigError);
  CHECK_NOTHROW(RadarConfig{}.validate());
}

TEST_CASE("default spacing is half a wavelength") {
  RadarConfig cfg;
  CHECK(cfg.spacing() == doctest::Approx(cfg.wavelength() / 2.0));
  cfg.elem_spacing = 0.002;
  CHECK(cfg.spacing() == 0.002);
}

TEST_CASE("channel layout") {
  RadarConfig cfg;
  cfg.num_elev = 4;
  auto ch = cfg.channels();
  REQUIRE(ch.size() == 4);
  CHECK(ch[3].z == doctest::Approx(3.0 * cfg.spacing()));
  CHECK(ch[3].y == 0.0);
  cfg.num_azimuth = 8;
  ch = cfg.channels();
  REQUIRE(ch.size() == 11);
  CHECK(cfg.num_channels() == 11);
  CHECK(ch[4].y == doctest::Approx(cfg.spacing()));
  CHECK(ch[10].y == doctest::Approx(7.0 * cfg.spacing()));
  CHECK(ch[10].z == 0.0);
}

TEST_CASE("speed classification") {
  RadarConfig cfg;
  EgoMotion m;
  m.velocity = {0.0, 15.0, 0.0};
  CHECK(validate_speed(cfg, m) == SpeedClass::ok);
  const auto b = speed_bounds(cfg);
  // Oracle: d = c / (2 f0), bounds d / (2 Ld Tp) and d / (2 Tp).
  const double d = 299792458.0 / (2.0 * 77e9);
  CHECK(b.lower == doctest::Approx(d / (2.0 * 512 * 16e-6)));
  CHECK(b.upper == doctest::Approx(d / (2.0 * 16e-6)));
  CHECK(std::abs(b.lower - 0.11882) < 1e-5);

  m.velocity.y() = 0.0;
  CHECK(validate_speed(cfg, m) == SpeedClass::too_slow);
  m.velocity.y() = 0.01;
  CHECK(validate_speed(cfg, m) == SpeedClass::too_slow);
  m.velocity.y() = 100.0;
  CHECK(validate_speed(cfg, m) == SpeedClass::too_fast);
  m.velocity.y() = -15.0;
  CHECK(validate_speed(cfg, m) == SpeedClass::ok);
  m.velocity.y() = b.upper;
  CHECK(validate_speed(cfg, m) == SpeedClass::ok);
  m.velocity.y() = b.lower;
  CHECK(validate_speed(cfg, m) == SpeedClass::ok);
  CHECK(to_string(SpeedClass::too_fast) == "too-fast");
}

TEST_CASE("speed classification agrees with the snapshot interval") {
  RadarConfig cfg;
  cfg.num_chirps = 64;
  const auto b = speed_bounds(cfg);
  for (int i = 0; i <= 400; ++i) {
    EgoMotion m;
    m.velocity.y() = b.lower * 0.5 + (b.upper * 1.5 - b.lower * 0.5) * i / 400.0;
    const bool ok = validate_speed(cfg, m) == SpeedClass::ok;
    int interval = 0;
    try {
      interval = compute_snapshot_interval(cfg, m);
    } catch (const SpeedOutOfRangeError&) {
      interval = 0;
    }
    CHECK(ok == (interval >= 1 && interval <= cfg.num_chirps));
  }
}

TEST_CASE("grid axes") {
  RadarConfig cfg;
  const auto g = ImagingGrid::make({-90, 90, 1}, {-10, 10, 0.5}, cfg);
  CHECK(g.azimuth.size() == 181);
  CHECK(g.elevation.size() == 41);
  CHECK(g.azimuth.front() == doctest::Approx(-std::numbers::pi / 2));
  CHECK(g.range.size() == 256);
  CHECK(g.range[1] - g.range[0] == doctest::Approx(derived_params(cfg).range_res));
  CHECK_NOTHROW(g.validate());
  CHECK_THROWS_AS(ImagingGrid::axis({-100, 0, 1}), ConfigError);
  CHECK_THROWS_AS(ImagingGrid::axis({0, 10, 0}), ConfigError);
}
