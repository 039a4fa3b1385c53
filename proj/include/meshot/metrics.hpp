#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "meshot/array3.hpp"
#include "meshot/imaging.hpp"
#include "meshot/scene.hpp"

namespace meshot {

using Mask = Array3<std::uint8_t>;

// Cell true iff 10 log10(value / median of positive values) > threshold_db.
// Throws DegenerateInputError on an all-zero cube.
Mask voxelise(const PowerCube& cube, double threshold_db);

// Truth cell true iff at least one scatterer falls in it (nearest range bin,
// azimuth and elevation). Scatterers outside the grid are ignored.
Mask truth_voxels(const Scene& scene, const ImagingGrid& grid);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  std::uint64_t total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(const Mask& detected, const Mask& truth);

enum class Plane { range_azimuth, range_elevation, azimuth_elevation };

const char* to_string(Plane p);

struct PlaneContrast {
  double range_azimuth = 0.0;
  double range_elevation = 0.0;
  double azimuth_elevation = 0.0;
};

// Undefined ratios (zero denominators) are NaN.
struct MetricsReport {
  ConfusionCounts counts;
  double accuracy = 0.0;
  double precision = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double auc = 0.0;
  double f_score = 0.0;
  PlaneContrast contrast;
  double dynamic_range_db = 0.0;  // max - min over positive cells, dB
  double threshold_db = 20.0;
  std::string method;
};

MetricsReport report(const ConfusionCounts& counts);

enum class ContrastMode { amplitude, intensity };

// std / mean of the slice. The slice holds power; amplitude mode works on its
// square root. Throws DegenerateInputError on a zero-mean slice.
double image_contrast(const Eigen::MatrixXd& power_slice, ContrastMode mode = ContrastMode::amplitude);

// Mean contrast over all slices parallel to the plane. Range bins with no
// positive cell were not imaged and are left out; all-zero slices are skipped.
double plane_contrast(const PowerCube& cube, Plane plane, ContrastMode mode = ContrastMode::amplitude);

// max - min of 10 log10(value) over positive cells.
double dynamic_range_db(const PowerCube& cube);

// dynamic_range_db(a) / dynamic_range_db(b). Throws DegenerateInputError when b is flat.
double dynamic_range_ratio(const PowerCube& a, const PowerCube& b);

// Full evaluation of one cube against a scene.
MetricsReport evaluate(const PowerCube& cube, const Scene& truth, double threshold_db,
                       ContrastMode mode = ContrastMode::amplitude);

std::string to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& text);
std::string contrast_csv(const MetricsReport& r);

}  // namespace meshot
