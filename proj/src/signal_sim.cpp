#include "meshot/signal_sim.hpp"

#include <atomic>
#include <cmath>

#include "meshot/counter_rng.hpp"
#include "meshot/errors.hpp"
#include "meshot/phase_convention.hpp"

namespace meshot {

namespace {

constexpr double kMinRange = 1e-9;

void check_inputs(const Scene& scene, const RadarConfig& cfg) {
  cfg.validate();
  if (scene.empty()) throw EmptySceneError("simulate: scene has no scatterers");
}

// Frozen far-field parameters for the literal model.
struct FarField {
  std::complex<double> amplitude;
  double gamma;      // 2 D0 / c
  Eigen::Vector3d u; // unit direction (cos t cos p, sin t cos p, sin p)
  double radial;     // v . u, closing speed
};

std::vector<FarField> far_field_params(const Scene& scene, const EgoMotion& motion) {
  std::vector<FarField> out;
  out.reserve(scene.size());
  for (const auto& s : scene.scatterers) {
    const double d0 = s.position.norm();
    if (d0 < kMinRange) throw SingularGeometryError("scatterer at zero range");
    const auto sph = cartesian_to_spherical(s.position);
    FarField f;
    f.amplitude = s.amplitude;
    f.gamma = 2.0 * d0 / kSpeedOfLight;
    f.u = spherical_to_cartesian(1.0, sph.azimuth, sph.elevation);
    f.radial = motion.velocity.dot(f.u);
    out.push_back(f);
  }
  return out;
}

struct TwoWay {
  double tau;   // two-way delay, s
  double gain;  // amplitude scale
  bool singular;
};

inline TwoWay two_way(const Eigen::Vector3d& target, const Eigen::Vector3d& tx,
                      const Eigen::Vector3d& rx, bool attenuate) {
  const double d_tx = (target - tx).norm();
  const double d_rx = (target - rx).norm();
  TwoWay out{(d_tx + d_rx) / kSpeedOfLight, 1.0, d_tx < kMinRange || d_rx < kMinRange};
  if (attenuate && !out.singular) out.gain = 1.0 / (d_tx * d_rx);
  return out;
}

// Phase in cycles of the literal model at sample (channel offset, chirp, b=0),
// plus the fast-time rate in cycles per sample.
inline void literal_phase(const FarField& f, const ChannelOffset& off, double t, double f0,
                          double lambda, double mu, double fs, double& cycles, double& rate) {
  const double array_advance = (off.y * f.u.y() + off.z * f.u.z()) / lambda;
  const double motion_advance = 2.0 * f.radial * t / lambda;
  cycles = f0 * f.gamma - array_advance - motion_advance;
  rate = mu * f.gamma / fs;
}

void add_sample_noise(Array3<cplx>& samples, double power, std::uint64_t seed) {
  if (power <= 0.0) return;
  auto flat = samples.flat();
  const auto n = static_cast<std::int64_t>(flat.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    flat[static_cast<std::size_t>(i)] += complex_gaussian(seed, static_cast<std::uint64_t>(i), power);
  }
}

}  // namespace

double mean_power(const Array3<cplx>& a) {
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& v : a.flat()) acc += std::norm(v);
  return acc / static_cast<double>(a.size());
}

RawDataCube simulate_frame(const Scene& scene, const RadarConfig& cfg, const EgoMotion& motion,
                           const SimOptions& opts) {
  check_inputs(scene, cfg);
  const auto dp = derived_params(cfg);
  const auto channels = cfg.channels();
  const auto nc = channels.size();
  const auto nl = static_cast<std::size_t>(cfg.num_chirps);
  const auto nb = static_cast<std::size_t>(dp.samples_per_chirp);

  RawDataCube cube{Array3<cplx>(nc, nl, nb), cfg, motion};
  std::vector<FarField> far;
  if (opts.mode == SimMode::literal_eq1) far = far_field_params(scene, motion);

  std::atomic<bool> singular{false};
  const auto jobs = static_cast<std::int64_t>(nc * nl);
#pragma omp parallel for schedule(static)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto c = static_cast<std::size_t>(job) / nl;
    const auto l = static_cast<std::size_t>(job) % nl;
    const double t = static_cast<double>(l) * cfg.prt;
    const Eigen::Vector3d platform = t * motion.velocity;
    const Eigen::Vector3d rx = platform + Eigen::Vector3d(0.0, channels[c].y, channels[c].z);
    auto out = cube.samples.row(c, l);

    for (std::size_t o = 0; o < scene.size(); ++o) {
      double cycles = 0.0, rate = 0.0, gain = 1.0;
      if (opts.mode == SimMode::geometric) {
        const auto tw = two_way(scene.scatterers[o].position, platform, rx, cfg.range_attenuation);
        if (tw.singular) {
          singular = true;
          continue;
        }
        cycles = cfg.f0 * tw.tau;
        rate = dp.mu * tw.tau / cfg.sample_rate;
        gain = tw.gain;
      } else {
        literal_phase(far[o], channels[c], t, cfg.f0, dp.lambda, dp.mu, cfg.sample_rate, cycles, rate);
      }
      // Fast-time tone as a phasor recurrence; reduce the carrier phase mod 1
      // first to keep the argument small.
      const cplx start = gain * scene.scatterers[o].amplitude * delay_phasor(cycles - std::floor(cycles));
      const cplx step = delay_phasor(rate);
      // Eight interleaved recurrences so consecutive samples don't wait on
      // each other.
      constexpr std::size_t kLanes = 8;
      double re[kLanes], im[kLanes];
      cplx lane = start;
      for (std::size_t k = 0; k < kLanes; ++k) {
        re[k] = lane.real();
        im[k] = lane.imag();
        lane *= step;
      }
      const cplx jump = delay_phasor(double(kLanes) * rate);
      const double jr = jump.real(), ji = jump.imag();
      std::size_t b = 0;
      for (; b + kLanes <= nb; b += kLanes) {
        for (std::size_t k = 0; k < kLanes; ++k) {
          out[b + k] += cplx(re[k], im[k]);
          const double next = re[k] * jr - im[k] * ji;
          im[k] = re[k] * ji + im[k] * jr;
          re[k] = next;
        }
      }
      for (std::size_t k = 0; b < nb; ++b, ++k) out[b] += cplx(re[k], im[k]);
    }
  }
  if (singular) throw SingularGeometryError("scatterer coincides with an antenna position");
  add_sample_noise(cube.samples, opts.noise_power, opts.seed);
  return cube;
}

RawDataCube simulate_frame_reference(const Scene& scene, const RadarConfig& cfg,
                                     const EgoMotion& motion, const SimOptions& opts) {
  check_inputs(scene, cfg);
  const auto dp = derived_params(cfg);
  const auto channels = cfg.channels();
  const auto nc = channels.size();
  const auto nl = static_cast<std::size_t>(cfg.num_chirps);
  const auto nb = static_cast<std::size_t>(dp.samples_per_chirp);

  RawDataCube cube{Array3<cplx>(nc, nl, nb), cfg, motion};
  std::vector<FarField> far;
  if (opts.mode == SimMode::literal_eq1) far = far_field_params(scene, motion);

  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t l = 0; l < nl; ++l) {
      const double t = static_cast<double>(l) * cfg.prt;
      const Eigen::Vector3d platform = t * motion.velocity;
      const Eigen::Vector3d rx = platform + Eigen::Vector3d(0.0, channels[c].y, channels[c].z);
      for (std::size_t o = 0; o < scene.size(); ++o) {
        double cycles = 0.0, rate = 0.0, gain = 1.0;
        if (opts.mode == SimMode::geometric) {
          const auto tw = two_way(scene.scatterers[o].position, platform, rx, cfg.range_attenuation);
          if (tw.singular) throw SingularGeometryError("scatterer coincides with an antenna position");
          cycles = cfg.f0 * tw.tau;
          rate = dp.mu * tw.tau / cfg.sample_rate;
          gain = tw.gain;
        } else {
          literal_phase(far[o], channels[c], t, cfg.f0, dp.lambda, dp.mu, cfg.sample_rate, cycles, rate);
        }
        for (std::size_t b = 0; b < nb; ++b) {
          const double phase = (cycles - std::floor(cycles)) + rate * static_cast<double>(b);
          cube.samples(c, l, b) += gain * scene.scatterers[o].amplitude * delay_phasor(phase);
        }
      }
    }
  }
  add_sample_noise(cube.samples, opts.noise_power, opts.seed);
  return cube;
}

RawDataCube add_noise(const RawDataCube& cube, double snr_db, std::uint64_t seed) {
  const double signal = mean_power(cube.samples);
  if (!(signal > 0.0)) throw UndefinedSnrError("add_noise: cube has zero signal power");
  for (const auto& v : cube.samples.flat()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error("add_noise: cube contains non-finite samples");
    }
  }
  RawDataCube out = cube;
  add_sample_noise(out.samples, signal / std::pow(10.0, snr_db / 10.0), seed);
  return out;
}

}  // namespace meshot
