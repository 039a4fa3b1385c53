#include "meshot/steering.hpp"

#include <cmath>

#include "meshot/phase_convention.hpp"

namespace meshot {

SteeringContext SteeringContext::make(const RadarConfig& cfg, const SnapshotPlan& plan,
                                      const EgoMotion& motion, bool compensate) {
  SteeringContext ctx;
  ctx.channels = cfg.channels();
  ctx.plan = plan;
  ctx.velocity = motion.velocity;
  ctx.lambda = cfg.wavelength();
  ctx.spacing = cfg.spacing();
  ctx.compensate = compensate;
  return ctx;
}

Compensation compensation_terms(const SnapshotPlan& plan, const EgoMotion& motion, double theta,
                                double phi, int n, double lambda) {
  const auto& v = motion.velocity;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  // The platform covers vy * l_e(n) less than the ideal n * d / 2; two-way,
  // that shortfall costs 2 vy l_e sin(theta) cos(phi) / lambda.
  const double along = -2.0 * v.y() * plan.residual[static_cast<std::size_t>(n)] * st * cp / lambda;
  // Two-way displacement along the look direction from vx and vz.
  const double cross = 2.0 * plan.elapsed(n) * (v.x() * ct * cp + v.z() * sp) / lambda;
  return {along, cross};
}

double compensation_phase(const SnapshotPlan& plan, const EgoMotion& motion, double theta,
                          double phi, int n, double lambda) {
  return compensation_terms(plan, motion, theta, phi, n, lambda).total();
}

double azimuth_cycles(const SteeringContext& ctx, double theta, double phi, int n) {
  double cycles = ctx.plan.direction * n * ctx.spacing * std::sin(theta) * std::cos(phi) / ctx.lambda;
  if (ctx.compensate && n > 0) {
    cycles += compensation_phase(ctx.plan, EgoMotion{ctx.velocity}, theta, phi, n, ctx.lambda);
  }
  return cycles;
}

Eigen::VectorXcd azimuth_factor(const SteeringContext& ctx, double theta, double phi) {
  const int np = ctx.plan.positions();
  Eigen::VectorXcd a(np);
  for (int n = 0; n < np; ++n) a(n) = advance_phasor(azimuth_cycles(ctx, theta, phi, n));
  return a;
}

Eigen::VectorXcd channel_factor(const SteeringContext& ctx, double theta, double phi) {
  const double uy = std::sin(theta) * std::cos(phi);
  const double uz = std::sin(phi);
  Eigen::VectorXcd a(static_cast<Eigen::Index>(ctx.channels.size()));
  for (std::size_t c = 0; c < ctx.channels.size(); ++c) {
    const auto& off = ctx.channels[c];
    a(static_cast<Eigen::Index>(c)) = advance_phasor((off.y * uy + off.z * uz) / ctx.lambda);
  }
  return a;
}

SteeringVector steering_vector(double theta, double phi, const SteeringContext& ctx) {
  const auto az = azimuth_factor(ctx, theta, phi);
  const auto ch = channel_factor(ctx, theta, phi);
  SteeringVector sv;
  sv.theta = theta;
  sv.phi = phi;
  sv.values.resize(az.size() * ch.size());
  for (Eigen::Index n = 0; n < az.size(); ++n) {
    sv.values.segment(n * ch.size(), ch.size()) = az(n) * ch;
  }
  return sv;
}

Eigen::VectorXcd dbf_weight(const SteeringVector& sv) {
  return sv.values / std::sqrt(sv.values.squaredNorm());
}

Eigen::MatrixXd compensation_table(const SteeringContext& ctx,
                                   const std::vector<std::pair<double, double>>& angles) {
  const int np = ctx.plan.positions();
  Eigen::MatrixXd table(np, static_cast<Eigen::Index>(angles.size()));
  const EgoMotion motion{ctx.velocity};
  for (std::size_t m = 0; m < angles.size(); ++m) {
    for (int n = 0; n < np; ++n) {
      table(n, static_cast<Eigen::Index>(m)) =
          compensation_phase(ctx.plan, motion, angles[m].first, angles[m].second, n, ctx.lambda);
    }
  }
  return table;
}

}  // namespace meshot
