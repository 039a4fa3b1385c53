#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "meshot/imaging.hpp"
#include "meshot/radar_config.hpp"
#include "meshot/range_processing.hpp"
#include "meshot/scene.hpp"
#include "meshot/signal_sim.hpp"

namespace meshot {

struct PointSpec {
  bool cartesian = false;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double range = 0.0;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double amplitude = 1.0;
};

struct CloudSpec {
  std::filesystem::path path;
  CloudFormat format = CloudFormat::xyz_text;
  std::size_t resample = 0;  // 0 keeps the cloud as loaded
  std::optional<std::pair<double, double>> amplitude;  // Swerling-3 magnitude range
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  std::uint64_t seed = 1;
};

struct SceneSpec {
  std::string label;
  std::vector<PointSpec> points;
  std::optional<CloudSpec> cloud;
};

struct SnapshotSpec {
  int l0 = 0;
  int extra = 0;
  bool extra_max = false;
  int length = 0;  // 0 means T_ind
};

struct ImagingSpec {
  ScanMethod method;
  bool compensate = true;
  Window window = Window::hann;
  double detect_threshold_db = 20.0;
  std::vector<int> range_bins;  // explicit bins skip detection
};

struct ScenarioConfig {
  RadarConfig radar;
  EgoMotion motion;
  SceneSpec scene;
  SnapshotSpec snapshots;
  AngleAxis azimuth{-90.0, 90.0, 1.0};
  AngleAxis elevation{-90.0, 90.0, 1.0};
  ImagingSpec imaging;
  std::optional<double> snr_db;
  std::uint64_t noise_seed = 1;
  double metrics_threshold_db = 20.0;
  double heatmap_window_db = 40.0;
  std::filesystem::path output = "out";
  std::filesystem::path base_dir;  // relative cloud paths resolve here
};

// Parses JSON, rejecting unknown keys. Errors are ConfigError with the field
// path, e.g. "radar.prt: must be > 0".
ScenarioConfig parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

// Cross-field checks: scene present, speed window and frame length when
// extra snapshots are requested.
void validate_scenario(const ScenarioConfig& cfg);

// Canonical JSON echo; its hash identifies every artifact of a run.
std::string scenario_json(const ScenarioConfig& cfg);

Scene build_scene(const ScenarioConfig& cfg);
RawDataCube simulate_scenario(const ScenarioConfig& cfg);

// Resolves "max" and the MIMO baseline into a concrete plan.
SnapshotPlan resolve_plan(const ScenarioConfig& cfg);

struct ImageResult {
  PowerCube cube;
  DetectionList detections;
  SnapshotPlan plan;
};

ImageResult image_scenario(const RawDataCube& raw, const ScenarioConfig& cfg);

}  // namespace meshot
