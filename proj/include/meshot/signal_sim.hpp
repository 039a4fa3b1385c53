#pragma once

#include <cstdint>

#include "meshot/array3.hpp"
#include "meshot/radar_config.hpp"
#include "meshot/scene.hpp"

namespace meshot {

// De-chirped samples indexed [channel q][chirp l][fast-time b].
struct RawDataCube {
  Array3<cplx> samples;
  RadarConfig cfg;
  EgoMotion motion;
};

enum class SimMode {
  geometric,    // exact per-chirp two-way path for every channel
  literal_eq1,  // far-field phase terms with frozen per-target angles and radial speed
};

struct SimOptions {
  double noise_power = 0.0;  // total complex noise power per sample
  std::uint64_t seed = 0;
  SimMode mode = SimMode::geometric;
};

// Stop-and-go: the platform sits at l * Tp * v during chirp l. The transmitter
// is the array reference point; channel c receives at reference + offset_c.
// OpenMP-parallel over (channel, chirp).
RawDataCube simulate_frame(const Scene& scene, const RadarConfig& cfg, const EgoMotion& motion,
                           const SimOptions& opts = {});

// Direct per-sample evaluation, single-threaded. Kept for testing and the
// benchmark; agrees with simulate_frame to rounding.
RawDataCube simulate_frame_reference(const Scene& scene, const RadarConfig& cfg,
                                     const EgoMotion& motion, const SimOptions& opts = {});

// Adds circular Gaussian noise so that mean signal power / noise power equals
// 10^(snr_db/10). Throws UndefinedSnrError on an all-zero cube.
RawDataCube add_noise(const RawDataCube& cube, double snr_db, std::uint64_t seed);

double mean_power(const Array3<cplx>& a);

}  // namespace meshot
