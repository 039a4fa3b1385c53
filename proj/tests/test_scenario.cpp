#include <doctest.h>

#include <fstream>
#include <numbers>
#include <nlohmann/json.hpp>

#include "meshot/errors.hpp"
#include "meshot/scenario.hpp"

using namespace meshot;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "radar": {"num_elev": 8, "num_chirps": 128, "prt": 16e-6},
    "motion": {"velocity": [-1, 15, 2]},
    "scene": {"label": "two points", "points": [
      {"range": 12.0, "azimuth_deg": 10.0, "elevation_deg": -5.0},
      {"position": [8.0, -3.0, 1.0], "amplitude": 0.5}]},
    "snapshots": {"extra": 15, "length": 16},
    "grid": {"azimuth": {"min_deg": -30, "max_deg": 30, "step_deg": 1},
             "elevation": {"min_deg": -20, "max_deg": 20, "step_deg": 1}},
    "imaging": {"method": "dbf"},
    "noise": {"snr_db": 20, "seed": 3}
  })");
}

std::string error_of(const json& j) {
  try {
    parse_scenario(j.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

TEST_CASE("parse a complete scenario") {
  const auto cfg = parse_scenario(small_config().dump());
  CHECK(cfg.radar.num_elev == 8);
  CHECK(cfg.radar.f0 == 77e9);
  CHECK(cfg.motion.velocity.y() == 15.0);
  CHECK(cfg.scene.points.size() == 2);
  CHECK(cfg.scene.points[1].cartesian);
  CHECK(cfg.snapshots.extra == 15);
  CHECK(cfg.snr_db.value() == 20.0);
  CHECK(cfg.noise_seed == 3);
  CHECK(cfg.heatmap_window_db == 40.0);
  const auto plan = resolve_plan(cfg);
  CHECK(plan.num_extra == 15);
  CHECK(plan.length == 16);

  const auto echo = scenario_json(cfg);
  CHECK(scenario_json(parse_scenario(echo)) == echo);
}

TEST_CASE("config errors name the offending field") {
  auto j = small_config();
  j["bogus"] = 1;
  CHECK(starts_with(error_of(j), "bogus: unknown key"));

  j = small_config();
  j["radar"]["chirps"] = 4;
  CHECK(starts_with(error_of(j), "radar.chirps: unknown key"));

  j = small_config();
  j["radar"]["prt"] = "fast";
  CHECK(starts_with(error_of(j), "radar.prt: expected a number"));

  j = small_config();
  j["radar"]["num_chirps"] = 12.5;
  CHECK(starts_with(error_of(j), "radar.num_chirps: expected an integer"));

  j = small_config();
  j.erase("scene");
  CHECK(starts_with(error_of(j), "scene: missing"));

  j = small_config();
  j["scene"]["points"][0].erase("range");
  CHECK(starts_with(error_of(j), "scene.points[0].range: missing"));

  j = small_config();
  j["imaging"]["method"] = "capon";
  CHECK(starts_with(error_of(j), "imaging.method"));

  j = small_config();
  j["grid"]["azimuth"]["step_deg"] = 0;
  CHECK(starts_with(error_of(j), "grid.azimuth.step_deg"));

  j = small_config();
  j["motion"]["velocity"] = {0, 0.05, 0};
  CHECK(starts_with(error_of(j), "motion.velocity"));

  j = small_config();
  j["snapshots"]["extra"] = 120;
  CHECK(starts_with(error_of(j), "snapshots.extra"));

  j = small_config();
  j["imaging"]["range_bins"] = {9999};
  CHECK(starts_with(error_of(j), "imaging.range_bins"));

  j = small_config();
  j["imaging"] = {{"method", "mvdr"}};
  CHECK(starts_with(error_of(j), "imaging.loading"));
  j["imaging"]["loading"] = 0.01;
  CHECK(error_of(j).empty());

  CHECK(starts_with(error_of(json::array()), "config: expected an object"));
  CHECK_THROWS_AS(parse_scenario("{not json"), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("extra snapshots: max") {
  auto j = small_config();
  j["snapshots"] = {{"extra", "max"}};
  const auto cfg = parse_scenario(j.dump());
  const auto plan = resolve_plan(cfg);
  const double d = 0.5 * 299792458.0 / 77e9;
  const int t = int(std::floor(d / (2 * 15.0 * 16e-6)));
  CHECK(plan.interval == t);
  CHECK(plan.num_extra == 128 / t - 1);
  CHECK(plan.length == t);
}

TEST_CASE("cloud scene paths resolve against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "meshot_test_scenario";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "cloud.xyz");
    f << "1 0 0\n2 0 0\n3 0 0\n";
  }
  auto j = small_config();
  j["scene"] = {{"cloud", {{"path", "cloud.xyz"}, {"offset", {10, 0, 0}}, {"amplitude", {0.5, 1.0}}, {"seed", 7}}}};
  {
    std::ofstream f(dir / "scenario.json");
    f << j.dump();
  }
  const auto cfg = load_scenario(dir / "scenario.json");
  const auto scene = build_scene(cfg);
  REQUIRE(scene.size() == 3);
  CHECK(scene.scatterers[0].position.x() == 11.0);
  for (const auto& s : scene.scatterers) CHECK(std::abs(s.amplitude) > 0.0);
  CHECK(build_scene(cfg).scatterers[1].amplitude == scene.scatterers[1].amplitude);
}

TEST_CASE("default radar produces the full-size raw cube") {
  const auto cfg = parse_scenario(R"({"scene": {"points": [{"range": 10}]}})");
  const auto cube = simulate_scenario(cfg);
  CHECK(cube.samples.dim(0) == 86);
  CHECK(cube.samples.dim(1) == 512);
  CHECK(cube.samples.dim(2) == 512);
}

TEST_CASE("simulate and image are deterministic and focus the targets") {
  const auto cfg = parse_scenario(small_config().dump());
  const auto a = simulate_scenario(cfg);
  const auto b = simulate_scenario(cfg);
  CHECK(a.samples == b.samples);

  const auto img = image_scenario(a, cfg);
  const auto again = image_scenario(b, cfg);
  CHECK(img.cube.values == again.cube.values);
  REQUIRE(!img.detections.bins.empty());

  const auto& c = img.cube;
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.values.size(); ++i)
    if (c.values.flat()[i] > c.values.flat()[best]) best = i;
  const auto na = c.azimuths(), ne = c.elevations();
  const auto r = best / (na * ne), az = (best / ne) % na, el = best % ne;
  CHECK(std::abs(c.grid.range[r] - 12.0) < 0.3);
  CHECK(std::abs(c.grid.azimuth[az] / (std::numbers::pi / 180) - 10.0) <= 1.0);
  CHECK(std::abs(c.grid.elevation[el] / (std::numbers::pi / 180) + 5.0) <= 1.0);

  auto wrong = cfg;
  wrong.radar.num_elev = 9;
  CHECK_THROWS_AS(image_scenario(a, wrong), DimensionError);
}

TEST_CASE("no detections give an all-zero cube") {
  auto j = small_config();
  j["imaging"]["detect_threshold_db"] = 200.0;
  const auto cfg = parse_scenario(j.dump());
  const auto img = image_scenario(simulate_scenario(cfg), cfg);
  CHECK(img.detections.bins.empty());
  CHECK(img.cube.values.size() > 0);
  for (double v : img.cube.values.flat()) CHECK(v == 0.0);
}
