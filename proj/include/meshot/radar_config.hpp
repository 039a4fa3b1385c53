#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace meshot {

inline constexpr double kSpeedOfLight = 299792458.0;

// Virtual receive channel offset from the array reference point, meters.
// y runs along the direction of travel, z is elevation.
struct ChannelOffset {
  double y = 0.0;
  double z = 0.0;
  bool operator==(const ChannelOffset&) const = default;
};

struct RadarConfig {
  double f0 = 77e9;              // chirp start frequency, Hz
  double bandwidth = 1e9;        // Hz
  double chirp_duration = 16e-6; // Tc, s
  double sample_rate = 32e6;     // fs, samples/s
  double prt = 16e-6;            // Tp, chirp repetition interval, s
  int num_chirps = 512;          // Ld
  int num_elev = 86;             // Ne
  double elem_spacing = 0.0;     // d; <= 0 means lambda/2
  bool complex_baseband = false; // detection/unambiguous-range convention
  bool range_attenuation = false;
  // Physical azimuth elements of an L-shaped base array (shares the corner
  // element with the elevation column). 1 means the plain vertical array.
  int num_azimuth = 1;

  double wavelength() const { return kSpeedOfLight / f0; }
  double spacing() const { return elem_spacing > 0.0 ? elem_spacing : 0.5 * wavelength(); }
  int samples_per_chirp() const;

  // Virtual channels: the elevation column first (q * d on z), then the extra
  // azimuth elements (p * d on y, p = 1..num_azimuth-1).
  std::vector<ChannelOffset> channels() const;
  int num_channels() const { return num_elev + num_azimuth - 1; }

  // Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const RadarConfig&) const = default;
};

struct EgoMotion {
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // (vx, vy, vz) m/s
};

struct DerivedParams {
  double mu;                 // Hz/s
  double lambda;             // m
  int samples_per_chirp;     // Bd
  double range_res;          // m
  double unambiguous_range;  // m
};

DerivedParams derived_params(const RadarConfig& cfg);

enum class SpeedClass { ok, too_slow, too_fast };

std::string to_string(SpeedClass c);

struct SpeedBounds {
  double lower;  // d / (2 Ld Tp)
  double upper;  // d / (2 Tp)
};

SpeedBounds speed_bounds(const RadarConfig& cfg);

// d / (2 |vy| Tp): how many chirps the platform needs to advance by d/2.
double coherence_ratio(const RadarConfig& cfg, double vy);

SpeedClass validate_speed(const RadarConfig& cfg, const EgoMotion& motion);

struct AngleAxis {
  double min_deg = -90.0;
  double max_deg = 90.0;
  double step_deg = 1.0;
};

struct ImagingGrid {
  std::vector<double> azimuth;    // rad, strictly increasing
  std::vector<double> elevation;  // rad, strictly increasing
  std::vector<double> range;      // bin centers, m

  static ImagingGrid make(const AngleAxis& az, const AngleAxis& el, const RadarConfig& cfg);
  static std::vector<double> axis(const AngleAxis& a);
  void validate() const;
};

// Number of range bins the detector may look at: Bd/2 for real sampling, Bd
// for complex baseband.
int usable_range_bins(const RadarConfig& cfg);

}  // namespace meshot
