#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace meshot {

// Position in the radar frame: x cross-track (side-looking boresight),
// y along-track (direction of travel), z up.
struct Scatterer {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::complex<double> amplitude{1.0, 0.0};
};

struct Scene {
  std::vector<Scatterer> scatterers;
  std::string label;

  std::size_t size() const { return scatterers.size(); }
  bool empty() const { return scatterers.empty(); }
};

enum class CloudFormat { xyz_text, ply_ascii };

CloudFormat parse_cloud_format(const std::string& name);

// One scatterer per point, amplitude 1. Throws MalformedInputError with the
// offending line, EmptySceneError when no points are found.
Scene load_point_cloud(const std::filesystem::path& path, CloudFormat format);
Scene parse_point_cloud(std::istream& in, CloudFormat format, std::string label = {});

// Voxel-stratified resampling to exactly `target_count` points. Every output
// point is an input point, so the bounding box never grows.
Scene resample_uniform(const Scene& scene, std::size_t target_count, std::uint64_t seed);

// |alpha| ~ U(lo, hi), zero phase.
Scene assign_swerling3_amplitudes(const Scene& scene, double lo, double hi, std::uint64_t seed);

// Point target at (range, azimuth, elevation) with azimuth measured from the
// x axis toward y and elevation from the x-y plane.
Eigen::Vector3d spherical_to_cartesian(double range, double azimuth, double elevation);

struct SphericalCoords {
  double range;
  double azimuth;
  double elevation;
};
SphericalCoords cartesian_to_spherical(const Eigen::Vector3d& p);

// Uniform [0, 1) double from a 64-bit draw, platform independent.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace meshot
