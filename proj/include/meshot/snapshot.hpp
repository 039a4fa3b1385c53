#pragma once

#include <Eigen/Core>
#include <vector>

#include "meshot/array3.hpp"
#include "meshot/radar_config.hpp"

namespace meshot {

// Motion-enhanced snapshot schedule. Snapshot n starts at chirp
// l_n = l0 + n * interval and spans `length` chirps; n = 0 is the physical
// array at l0.
struct SnapshotPlan {
  int interval = 1;             // T_ind, chirps
  int l0 = 0;
  int num_extra = 0;            // N_ex
  int length = 1;               // L_s
  int max_snapshots = 1;        // N_m = floor(Ld / T_ind)
  std::vector<int> indices;     // l_n, n = 0..N_ex
  std::vector<double> residual; // l_e(n) = n (d / (2|vy|) - T_ind Tp), s
  double prt = 0.0;
  double direction = 1.0;       // sign of vy

  int positions() const { return num_extra + 1; }
  // Elapsed time between snapshot 0 and snapshot n, s.
  double elapsed(int n) const { return (indices[static_cast<std::size_t>(n)] - l0) * prt; }
};

// floor(d / (2 |vy| Tp)). Throws SpeedOutOfRangeError outside the coherent
// speed window [d/(2 Ld Tp), d/(2 Tp)].
int compute_snapshot_interval(const RadarConfig& cfg, const EgoMotion& motion);

// floor(Ld / T_ind)
int max_snapshot_count(int num_chirps, int interval);

// Largest N_ex that fits l0 + N_ex * T_ind + L_s <= Ld, capped at N_m - 1.
int max_feasible_extra(int num_chirps, int interval, int l0, int length);

// length <= 0 selects L_s = T_ind. Throws FrameTooShortError (carrying the
// largest feasible N_ex) when the request does not fit in the frame.
SnapshotPlan build_plan(const RadarConfig& cfg, const EgoMotion& motion, int l0, int num_extra,
                        int length = 0);

// Extended data cube Z[n][channel][s] = slice(channel, l_n + s).
struct SnapshotTensor {
  Array3<cplx> z;
  SnapshotPlan plan;
  int range_bin = 0;
};

SnapshotTensor form_tensor(const Eigen::MatrixXcd& slice, const SnapshotPlan& plan, int range_bin);

// Row n * channels + c, column s holds Z[n][c][s]: snapshot (azimuth) index
// outer, channel inner, matching the Kronecker order of the steering vector.
struct StackedMatrix {
  Eigen::MatrixXcd x;
  int snapshots = 0;
  int channels = 0;
};

StackedMatrix stack(const SnapshotTensor& tensor);
Array3<cplx> unstack(const StackedMatrix& m);

}  // namespace meshot
