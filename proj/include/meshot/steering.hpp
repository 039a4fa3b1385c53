#pragma once

#include <Eigen/Core>
#include <vector>

#include "meshot/radar_config.hpp"
#include "meshot/snapshot.hpp"

namespace meshot {

// Everything the steering model needs for one imaging run.
struct SteeringContext {
  std::vector<ChannelOffset> channels;
  SnapshotPlan plan;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double lambda = 0.0;
  double spacing = 0.0;
  bool compensate = true;

  static SteeringContext make(const RadarConfig& cfg, const SnapshotPlan& plan,
                              const EgoMotion& motion, bool compensate = true);
  int size() const { return plan.positions() * static_cast<int>(channels.size()); }
};

// Phase-error terms for snapshot n at look direction (theta, phi), in cycles.
struct Compensation {
  double along;  // rounding residual of the integer interval (w_ea)
  double cross;  // vx / vz displacement (w_ev)
  double total() const { return along + cross; }
};

Compensation compensation_terms(const SnapshotPlan& plan, const EgoMotion& motion, double theta,
                                double phi, int n, double lambda);

// w_er(n) = w_ea + w_ev, cycles. Zero at n = 0.
double compensation_phase(const SnapshotPlan& plan, const EgoMotion& motion, double theta,
                          double phi, int n, double lambda);

// Total azimuth phase of snapshot n, cycles: direction * n d sin(theta) cos(phi) / lambda,
// plus w_er(n) when compensating.
double azimuth_cycles(const SteeringContext& ctx, double theta, double phi, int n);

// a_theta: one entry per aperture position (N_ex + 1).
Eigen::VectorXcd azimuth_factor(const SteeringContext& ctx, double theta, double phi);
// Physical-array factor: one entry per channel; for the vertical array this is
// a_phi[q] = exp(-j 2 pi q d sin(phi) / lambda).
Eigen::VectorXcd channel_factor(const SteeringContext& ctx, double theta, double phi);

struct SteeringVector {
  Eigen::VectorXcd values;  // entry n * channels + c
  double theta = 0.0;
  double phi = 0.0;
};

// a_theta (x) a_channel.
SteeringVector steering_vector(double theta, double phi, const SteeringContext& ctx);

// alpha / sqrt(alpha^H alpha)
Eigen::VectorXcd dbf_weight(const SteeringVector& sv);

// w_er for every snapshot (rows) and (theta, phi) pair (columns).
Eigen::MatrixXd compensation_table(const SteeringContext& ctx,
                                   const std::vector<std::pair<double, double>>& angles);

}  // namespace meshot
