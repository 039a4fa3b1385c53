#include <chrono>
#include <cstdio>
#include <algorithm>
#include <numbers>
#include <omp.h>

#include "meshot/imaging.hpp"
#include "meshot/range_processing.hpp"
#include "meshot/signal_sim.hpp"
#include "meshot/steering.hpp"

using namespace meshot;

namespace {

template <typename F>
double seconds(F&& f, int reps = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

double max_rel_diff(const Array3<double>& a, const Array3<double>& b) {
  double peak = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    peak = std::max(peak, std::abs(b.flat()[i]));
    diff = std::max(diff, std::abs(a.flat()[i] - b.flat()[i]));
  }
  return peak > 0.0 ? diff / peak : diff;
}

}  // namespace

int main() {
  const double deg = std::numbers::pi / 180.0;
  RadarConfig cfg;
  cfg.num_elev = 16;
  EgoMotion motion;
  motion.velocity = {-1.0, 15.0, 2.0};

  Scene scene;
  for (int k = 0; k < 13; ++k) {
    scene.scatterers.push_back({spherical_to_cartesian(10.0, (-30.0 + 5.0 * k) * deg, (k % 5 - 2) * 8.0 * deg), 1.0});
  }

  std::printf("threads available: %d\n", omp_get_max_threads());

  RawDataCube par, ref;
  const double t_sim = seconds([&] { par = simulate_frame(scene, cfg, motion); });
  const double t_sim_ref = seconds([&] { ref = simulate_frame_reference(scene, cfg, motion); });
  double sim_err = 0.0;
  for (std::size_t i = 0; i < par.samples.size(); ++i) {
    sim_err = std::max(sim_err, std::abs(par.samples.flat()[i] - ref.samples.flat()[i]));
  }
  std::printf("simulate  %ux%ux%u  parallel %.3fs  reference %.3fs  speedup %.2fx  max |diff| %.2e\n",
              unsigned(par.samples.dim(0)), unsigned(par.samples.dim(1)), unsigned(par.samples.dim(2)), t_sim,
              t_sim_ref, t_sim_ref / t_sim, sim_err);

  RawDataCube head{Array3<cplx>(par.samples.dim(0), 32, par.samples.dim(2)), par.cfg, {}};
  for (std::size_t q = 0; q < head.samples.dim(0); ++q)
    for (std::size_t l = 0; l < head.samples.dim(1); ++l)
      std::ranges::copy(par.samples.row(q, l), head.samples.row(q, l).begin());
  RangeSpectrum fft_par, fft_ref;
  const double t_fft = seconds([&] { fft_par = range_fft(head); });
  const double t_fft_ref = seconds([&] { fft_ref = range_fft_reference(head); });
  double fft_err = 0.0;
  for (std::size_t i = 0; i < fft_par.bins.size(); ++i) {
    fft_err = std::max(fft_err, std::abs(fft_par.bins.flat()[i] - fft_ref.bins.flat()[i]));
  }
  std::printf("range fft %ux%ux%u  fftw %.4fs  direct dft %.3fs  speedup %.0fx  max |diff| %.2e\n",
              unsigned(head.samples.dim(0)), unsigned(head.samples.dim(1)), unsigned(head.samples.dim(2)), t_fft,
              t_fft_ref, t_fft_ref / t_fft, fft_err);

  const auto spec = range_fft(add_noise(par, 10.0, 7));
  const auto plan = build_plan(cfg, motion, 0, 31, 32);
  const auto ctx = SteeringContext::make(cfg, plan, motion);
  const std::vector<SnapshotTensor> tensors{form_tensor(extract_slice(spec, 67), plan, 67)};
  const auto grid = ImagingGrid::make({-60, 60, 1}, {-30, 30, 1}, cfg);

  for (auto kind : {Method::dbf, Method::mvdr, Method::music}) {
    ScanMethod m{kind, 4, kind == Method::mvdr ? 1e-3 : 0.0};
    PowerCube fast, slow;
    const double t_fast = seconds([&] { fast = scan(tensors, grid, m, ctx); });
    const double t_slow = seconds([&] { slow = scan_reference(tensors, grid, m, ctx); });
    std::printf("scan %-10s %zux%zu cells, M=%d  fast %.3fs  reference %.3fs  speedup %.1fx  max rel diff %.2e\n",
                m.tag().c_str(), grid.azimuth.size(), grid.elevation.size(), ctx.size(), t_fast, t_slow,
                t_slow / t_fast, max_rel_diff(fast.values, slow.values));
  }
  return 0;
}
