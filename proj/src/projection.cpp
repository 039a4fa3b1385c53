#include "meshot/projection.hpp"

#include <cmath>
#include <limits>

#include "meshot/errors.hpp"
#include "meshot/scene.hpp"

namespace meshot {

Interp parse_interp(const std::string& name) {
  if (name == "nearest") return Interp::nearest;
  if (name == "trilinear") return Interp::trilinear;
  throw ConfigError("unknown interpolation '" + name + "' (expected nearest or trilinear)");
}

CartesianVolume project_to_cartesian(const PowerCube& cube, double voxel_size, Interp method) {
  if (!(voxel_size > 0.0)) throw ConfigError("projection: voxel size must be > 0");
  const auto& g = cube.grid;
  if (g.range.size() != cube.bins() || g.azimuth.size() != cube.azimuths() ||
      g.elevation.size() != cube.elevations()) {
    throw DimensionError("projection: cube values do not match its grid axes");
  }

  struct Point {
    Eigen::Vector3d p;
    double v;
  };
  std::vector<Point> pts;
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (std::size_t r = 0; r < cube.bins(); ++r)
    for (std::size_t a = 0; a < cube.azimuths(); ++a)
      for (std::size_t e = 0; e < cube.elevations(); ++e) {
        const double v = cube.values(r, a, e);
        if (v == 0.0) continue;
        const auto p = spherical_to_cartesian(g.range[r], g.azimuth[a], g.elevation[e]);
        pts.push_back({p, v});
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }

  CartesianVolume vol;
  vol.voxel_size = voxel_size;
  if (pts.empty()) return vol;

  // Snap the origin to the voxel lattice so projections of different cubes line up.
  vol.origin = (lo / voxel_size).array().floor().matrix() * voxel_size;
  std::array<std::size_t, 3> n{};
  for (int i = 0; i < 3; ++i) {
    n[static_cast<std::size_t>(i)] =
        static_cast<std::size_t>(std::floor((hi(i) - vol.origin(i)) / voxel_size)) + 2;
  }
  vol.values = Array3<double>(n[0], n[1], n[2], 0.0);

  for (const auto& pt : pts) {
    const Eigen::Vector3d f = ((pt.p - vol.origin) / voxel_size).cwiseMax(0.0);
    if (method == Interp::nearest) {
      const auto i = static_cast<std::size_t>(std::lround(f.x()));
      const auto j = static_cast<std::size_t>(std::lround(f.y()));
      const auto k = static_cast<std::size_t>(std::lround(f.z()));
      vol.values(i, j, k) += pt.v;
      continue;
    }
    const Eigen::Vector3d base = f.array().floor();
    const Eigen::Vector3d t = f - base;
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy)
        for (int dz = 0; dz < 2; ++dz) {
          const double w = (dx ? t.x() : 1.0 - t.x()) * (dy ? t.y() : 1.0 - t.y()) *
                           (dz ? t.z() : 1.0 - t.z());
          if (w == 0.0) continue;
          vol.values(static_cast<std::size_t>(base.x()) + dx, static_cast<std::size_t>(base.y()) + dy,
                     static_cast<std::size_t>(base.z()) + dz) += w * pt.v;
        }
  }
  return vol;
}

}  // namespace meshot
