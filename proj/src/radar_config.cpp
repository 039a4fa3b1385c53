#include "meshot/radar_config.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "meshot/errors.hpp"

namespace meshot {

namespace {

// Guards the floor in d/(2 vy Tp) against the last-ulp error of speeds chosen
// to land exactly on an integer interval.
constexpr double kRatioTolerance = 1e-9;

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError("radar." + field + ": " + why);
}

}  // namespace

int RadarConfig::samples_per_chirp() const {
  return static_cast<int>(std::lround(chirp_duration * sample_rate));
}

std::vector<ChannelOffset> RadarConfig::channels() const {
  const double d = spacing();
  std::vector<ChannelOffset> out;
  out.reserve(static_cast<std::size_t>(num_channels()));
  for (int q = 0; q < num_elev; ++q) out.push_back({0.0, q * d});
  for (int p = 1; p < num_azimuth; ++p) out.push_back({p * d, 0.0});
  return out;
}

void RadarConfig::validate() const {
  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(finite_pos(f0), "f0", "must be positive");
  require(finite_pos(bandwidth), "bandwidth", "must be positive");
  require(finite_pos(chirp_duration), "chirp_duration", "must be positive");
  require(finite_pos(sample_rate), "sample_rate", "must be positive");
  require(finite_pos(prt), "prt", "must be positive");
  require(prt >= chirp_duration, "prt", "must be >= chirp_duration");
  require(num_chirps > 0, "num_chirps", "must be positive");
  require(num_elev > 0, "num_elev", "must be positive");
  require(num_azimuth > 0, "num_azimuth", "must be positive");
  require(std::isfinite(elem_spacing), "elem_spacing", "must be finite");
  require(samples_per_chirp() >= 8, "sample_rate", "Tc*fs must give at least 8 samples");
}

DerivedParams derived_params(const RadarConfig& cfg) {
  DerivedParams p{};
  p.mu = cfg.bandwidth / cfg.chirp_duration;
  p.lambda = kSpeedOfLight / cfg.f0;
  p.samples_per_chirp = cfg.samples_per_chirp();
  p.range_res = kSpeedOfLight / (2.0 * cfg.bandwidth);
  const double denom = cfg.complex_baseband ? 2.0 : 4.0;
  p.unambiguous_range = cfg.sample_rate * kSpeedOfLight / (denom * p.mu);
  return p;
}

std::string to_string(SpeedClass c) {
  switch (c) {
    case SpeedClass::ok: return "ok";
    case SpeedClass::too_slow: return "too-slow";
    case SpeedClass::too_fast: return "too-fast";
  }
  return "?";
}

SpeedBounds speed_bounds(const RadarConfig& cfg) {
  const double d = cfg.spacing();
  return {d / (2.0 * cfg.num_chirps * cfg.prt), d / (2.0 * cfg.prt)};
}

double coherence_ratio(const RadarConfig& cfg, double vy) {
  if (vy == 0.0) return std::numeric_limits<double>::infinity();
  return cfg.spacing() / (2.0 * std::abs(vy) * cfg.prt);
}

SpeedClass validate_speed(const RadarConfig& cfg, const EgoMotion& motion) {
  const double ratio = coherence_ratio(cfg, motion.velocity.y());
  if (!std::isfinite(ratio) || ratio > cfg.num_chirps * (1.0 + kRatioTolerance)) {
    return SpeedClass::too_slow;
  }
  if (ratio < 1.0 - kRatioTolerance) return SpeedClass::too_fast;
  return SpeedClass::ok;
}

std::vector<double> ImagingGrid::axis(const AngleAxis& a) {
  if (!(a.step_deg > 0.0) || !(a.max_deg >= a.min_deg) || a.min_deg < -90.0 || a.max_deg > 90.0) {
    throw ConfigError("grid: angle axis must satisfy -90 <= min <= max <= 90 with step > 0");
  }
  std::vector<double> out;
  const auto count = static_cast<int>(std::floor((a.max_deg - a.min_deg) / a.step_deg + 1e-9)) + 1;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back((a.min_deg + i * a.step_deg) * std::numbers::pi / 180.0);
  }
  return out;
}

ImagingGrid ImagingGrid::make(const AngleAxis& az, const AngleAxis& el, const RadarConfig& cfg) {
  ImagingGrid g;
  g.azimuth = axis(az);
  g.elevation = axis(el);
  const double res = derived_params(cfg).range_res;
  const int bins = usable_range_bins(cfg);
  g.range.resize(static_cast<std::size_t>(bins));
  for (int r = 0; r < bins; ++r) g.range[static_cast<std::size_t>(r)] = r * res;
  return g;
}

void ImagingGrid::validate() const {
  auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) return false;
    }
    return !v.empty();
  };
  if (!increasing(azimuth) || !increasing(elevation) || !increasing(range)) {
    throw ConfigError("grid: axes must be non-empty and strictly increasing");
  }
}

int usable_range_bins(const RadarConfig& cfg) {
  const int bd = cfg.samples_per_chirp();
  return cfg.complex_baseband ? bd : bd / 2;
}

}  // namespace meshot
