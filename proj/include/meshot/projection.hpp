#pragma once

#include <Eigen/Core>

#include "meshot/array3.hpp"
#include "meshot/imaging.hpp"

namespace meshot {

enum class Interp { nearest, trilinear };

Interp parse_interp(const std::string& name);

// Regular Cartesian voxel grid [ix][iy][iz]; voxel (i, j, k) is centered at
// origin + voxel_size * (i, j, k).
struct CartesianVolume {
  Array3<double> values;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double voxel_size = 0.0;

  Eigen::Vector3d center(std::size_t i, std::size_t j, std::size_t k) const {
    return origin + voxel_size * Eigen::Vector3d(double(i), double(j), double(k));
  }
};

// Splats every nonzero polar cell center into the voxel grid that bounds
// them. nearest drops each cell's power into one voxel; trilinear spreads it
// over the eight surrounding voxels. Both conserve total power exactly.
CartesianVolume project_to_cartesian(const PowerCube& cube, double voxel_size,
                                     Interp method = Interp::nearest);

}  // namespace meshot
