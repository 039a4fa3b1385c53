#include "meshot/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "meshot/errors.hpp"

namespace meshot {

namespace {
constexpr double kRatioTolerance = 1e-9;
}

int compute_snapshot_interval(const RadarConfig& cfg, const EgoMotion& motion) {
  const double vy = motion.velocity.y();
  if (vy == 0.0) {
    throw SpeedOutOfRangeError("snapshot interval: vy = 0 never shifts the aperture (below d/(2 Ld Tp))");
  }
  const auto bounds = speed_bounds(cfg);
  const double ratio = coherence_ratio(cfg, vy);
  if (ratio < 1.0 - kRatioTolerance) {
    std::ostringstream os;
    os << "snapshot interval: |vy| = " << std::abs(vy) << " m/s exceeds upper bound d/(2 Tp) = "
       << bounds.upper << " m/s";
    throw SpeedOutOfRangeError(os.str());
  }
  if (ratio > cfg.num_chirps * (1.0 + kRatioTolerance)) {
    std::ostringstream os;
    os << "snapshot interval: |vy| = " << std::abs(vy) << " m/s is below lower bound d/(2 Ld Tp) = "
       << bounds.lower << " m/s";
    throw SpeedOutOfRangeError(os.str());
  }
  const int interval = static_cast<int>(std::floor(ratio * (1.0 + kRatioTolerance)));
  return std::clamp(interval, 1, cfg.num_chirps);
}

int max_snapshot_count(int num_chirps, int interval) { return num_chirps / interval; }

int max_feasible_extra(int num_chirps, int interval, int l0, int length) {
  const int room = num_chirps - l0 - length;
  if (room < 0) return -1;
  return std::min(room / interval, max_snapshot_count(num_chirps, interval) - 1);
}

SnapshotPlan build_plan(const RadarConfig& cfg, const EgoMotion& motion, int l0, int num_extra,
                        int length) {
  cfg.validate();
  if (l0 < 0 || num_extra < 0) throw ConfigError("snapshots: l0 and count must be non-negative");

  SnapshotPlan plan;
  plan.l0 = l0;
  plan.prt = cfg.prt;
  const double vy = motion.velocity.y();
  plan.direction = vy < 0.0 ? -1.0 : 1.0;

  if (num_extra == 0 && validate_speed(cfg, motion) != SpeedClass::ok) {
    // A lone physical aperture needs no coherent speed.
    plan.interval = 1;
  } else {
    plan.interval = compute_snapshot_interval(cfg, motion);
  }
  plan.length = length > 0 ? length : plan.interval;
  plan.max_snapshots = max_snapshot_count(cfg.num_chirps, plan.interval);

  if (l0 + num_extra * plan.interval + plan.length > cfg.num_chirps) {
    const int feasible = max_feasible_extra(cfg.num_chirps, plan.interval, l0, plan.length);
    std::ostringstream os;
    os << "snapshots: l0 + N_ex*T_ind + L_s = " << l0 + num_extra * plan.interval + plan.length
       << " exceeds Ld = " << cfg.num_chirps << "; max feasible N_ex = " << feasible;
    throw FrameTooShortError(os.str(), feasible);
  }
  plan.num_extra = std::min(num_extra, plan.max_snapshots - 1);

  const double ideal_step = vy == 0.0 ? 0.0 : cfg.spacing() / (2.0 * std::abs(vy));
  const double step_error = num_extra == 0 && vy == 0.0 ? 0.0 : ideal_step - plan.interval * cfg.prt;
  for (int n = 0; n <= plan.num_extra; ++n) {
    plan.indices.push_back(l0 + n * plan.interval);
    plan.residual.push_back(n * step_error);
  }
  return plan;
}

SnapshotTensor form_tensor(const Eigen::MatrixXcd& slice, const SnapshotPlan& plan, int range_bin) {
  const auto channels = static_cast<std::size_t>(slice.rows());
  const auto positions = static_cast<std::size_t>(plan.positions());
  const auto length = static_cast<std::size_t>(plan.length);
  for (int ln : plan.indices) {
    if (ln < 0 || ln + plan.length > slice.cols()) {
      throw BoundsError("form_tensor: snapshot starting at chirp " + std::to_string(ln) +
                        " overruns slice of " + std::to_string(slice.cols()) + " chirps");
    }
  }
  SnapshotTensor t{Array3<cplx>(positions, channels, length), plan, range_bin};
  for (std::size_t n = 0; n < positions; ++n) {
    const auto start = static_cast<Eigen::Index>(plan.indices[n]);
    for (std::size_t c = 0; c < channels; ++c) {
      auto row = t.z.row(n, c);
      for (std::size_t s = 0; s < length; ++s) {
        row[s] = slice(static_cast<Eigen::Index>(c), start + static_cast<Eigen::Index>(s));
      }
    }
  }
  return t;
}

StackedMatrix stack(const SnapshotTensor& tensor) {
  const auto np = tensor.z.dim(0), nc = tensor.z.dim(1), ns = tensor.z.dim(2);
  StackedMatrix m{Eigen::MatrixXcd(static_cast<Eigen::Index>(np * nc), static_cast<Eigen::Index>(ns)),
                  static_cast<int>(np), static_cast<int>(nc)};
  for (std::size_t n = 0; n < np; ++n) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t s = 0; s < ns; ++s) {
        m.x(static_cast<Eigen::Index>(n * nc + c), static_cast<Eigen::Index>(s)) = tensor.z(n, c, s);
      }
    }
  }
  return m;
}

Array3<cplx> unstack(const StackedMatrix& m) {
  const auto np = static_cast<std::size_t>(m.snapshots), nc = static_cast<std::size_t>(m.channels);
  const auto ns = static_cast<std::size_t>(m.x.cols());
  if (static_cast<std::size_t>(m.x.rows()) != np * nc) {
    throw DimensionError("unstack: row count does not match snapshots x channels");
  }
  Array3<cplx> z(np, nc, ns);
  for (std::size_t n = 0; n < np; ++n) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t s = 0; s < ns; ++s) {
        z(n, c, s) = m.x(static_cast<Eigen::Index>(n * nc + c), static_cast<Eigen::Index>(s));
      }
    }
  }
  return z;
}

}  // namespace meshot
