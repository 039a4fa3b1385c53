#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "meshot/array3.hpp"
#include "meshot/radar_config.hpp"
#include "meshot/snapshot.hpp"
#include "meshot/steering.hpp"

namespace meshot {

// Linear power image [range bin][azimuth][elevation]. Bins that were not
// imaged hold zero.
struct PowerCube {
  Array3<double> values;
  ImagingGrid grid;
  std::string method;
  std::string meta;  // JSON summary of the snapshot plan and options

  std::size_t bins() const { return values.dim(0); }
  std::size_t azimuths() const { return values.dim(1); }
  std::size_t elevations() const { return values.dim(2); }
};

// R = (1/L_s) X X^H + loading * (trace / M) * I
Eigen::MatrixXcd sample_covariance(const StackedMatrix& x, double diagonal_loading = 0.0);

// real(w^H R w) / (w^H w)
double dbf_power(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& w);

// 1 / (w^H R^-1 w) for unit-norm w. Throws SolverError if R is singular.
double mvdr_power(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& w);

enum class Method { dbf, mvdr, music };

struct ScanMethod {
  Method kind = Method::dbf;
  int sources = 0;        // K for MUSIC
  double loading = 0.0;   // diagonal loading, fraction of trace / M

  std::string tag() const;
};

Method parse_method(const std::string& name);

// Signal subspace (M x K, orthonormal columns) of the sample covariance.
// Uses the L_s x L_s Gram matrix when L_s < M.
Eigen::MatrixXcd signal_subspace(const StackedMatrix& x, int sources);

// Beamscan over every tensor's range bin and the full angle grid. The
// Kronecker structure is exploited: the channel sum is done once per
// elevation for vertical arrays. OpenMP-parallel over elevation.
PowerCube scan(const std::vector<SnapshotTensor>& inputs, const ImagingGrid& grid,
               const ScanMethod& method, const SteeringContext& ctx);

// Same image through explicit steering vectors and the full covariance,
// single-threaded, O(M^2) per cell. Test and benchmark reference.
PowerCube scan_reference(const std::vector<SnapshotTensor>& inputs, const ImagingGrid& grid,
                         const ScanMethod& method, const SteeringContext& ctx);

struct Cell {
  int r = 0;
  int az = 0;
  int el = 0;
};

// Inclusive index box.
struct CellBox {
  int r0, r1, az0, az1, el0, el1;
};

inline constexpr double kSnrCapDb = 300.0;

// Peak power within one cell of `truth` over mean power in the boxes, dB.
// Returns kSnrCapDb when the noise region is exactly zero.
double measure_snr(const PowerCube& cube, const Cell& truth, const std::vector<CellBox>& noise);

// Max-projection over range: azimuth x elevation map.
Eigen::MatrixXd max_over_range(const PowerCube& cube);

struct Peak {
  int row;
  int col;
  double value;
};

// Strict 8-neighbour local maxima at least `floor_db` below the global max
// (floor_db > 0), strongest first.
std::vector<Peak> local_maxima(const Eigen::MatrixXd& map, double floor_db);

// 1D local maxima of a profile with at least `prominence_db` prominence.
std::vector<int> prominent_peaks(const std::vector<double>& profile, double prominence_db);

// Width (in index units, linearly interpolated) of the -3 dB lobe around `peak`.
double half_power_width(const std::vector<double>& profile, int peak);

}  // namespace meshot
