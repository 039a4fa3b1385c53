#include "meshot/range_processing.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

#include "meshot/errors.hpp"

namespace meshot {

namespace {

// fftw_plan creation is not thread-safe; execution on fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

PlanPtr forward_plan(int n) {
  std::vector<cplx> scratch(static_cast<std::size_t>(n));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  return PlanPtr(fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
}

}  // namespace

Window parse_window(const std::string& name) {
  if (name == "rect") return Window::rect;
  if (name == "hann") return Window::hann;
  if (name == "hamming") return Window::hamming;
  throw ConfigError("unknown window '" + name + "'");
}

std::vector<double> window_coefficients(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::rect || n < 2) return out;
  const double a0 = w == Window::hann ? 0.5 : 0.54;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a0 - (1.0 - a0) * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(n - 1));
  }
  return out;
}

RangeSpectrum range_fft(const RawDataCube& cube, Window window) {
  const auto nc = cube.samples.dim(0);
  const auto nl = cube.samples.dim(1);
  const auto nb = cube.samples.dim(2);
  RangeSpectrum spec{Array3<cplx>(nc, nl, nb), {}, cube.cfg};
  const double res = derived_params(cube.cfg).range_res;
  spec.axis.resize(nb);
  for (std::size_t r = 0; r < nb; ++r) spec.axis[r] = static_cast<double>(r) * res;
  if (nb == 0) return spec;

  const auto coeffs = window_coefficients(window, nb);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nb));
  auto plan = forward_plan(static_cast<int>(nb));
  const auto jobs = static_cast<std::int64_t>(nc * nl);
#pragma omp parallel for schedule(static)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto q = static_cast<std::size_t>(job) / nl;
    const auto l = static_cast<std::size_t>(job) % nl;
    auto in = cube.samples.row(q, l);
    auto out = spec.bins.row(q, l);
    for (std::size_t b = 0; b < nb; ++b) out[b] = in[b] * (coeffs[b] * scale);
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan.get(), buf, buf);
  }
  return spec;
}

RangeSpectrum range_fft_reference(const RawDataCube& cube, Window window) {
  const auto nc = cube.samples.dim(0);
  const auto nl = cube.samples.dim(1);
  const auto nb = cube.samples.dim(2);
  RangeSpectrum spec{Array3<cplx>(nc, nl, nb), {}, cube.cfg};
  const double res = derived_params(cube.cfg).range_res;
  spec.axis.resize(nb);
  for (std::size_t r = 0; r < nb; ++r) spec.axis[r] = static_cast<double>(r) * res;
  if (nb == 0) return spec;

  const auto coeffs = window_coefficients(window, nb);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nb));
  std::vector<cplx> twiddle(nb);
  for (std::size_t k = 0; k < nb; ++k)
    twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nb));
  for (std::size_t q = 0; q < nc; ++q)
    for (std::size_t l = 0; l < nl; ++l)
      for (std::size_t k = 0; k < nb; ++k) {
        cplx acc = 0.0;
        for (std::size_t b = 0; b < nb; ++b) acc += cube.samples(q, l, b) * coeffs[b] * twiddle[(k * b) % nb];
        spec.bins(q, l, k) = acc * scale;
      }
  return spec;
}

std::vector<double> noncoherent_power(const RangeSpectrum& spec) {
  const auto usable = std::min<std::size_t>(static_cast<std::size_t>(usable_range_bins(spec.cfg)),
                                            spec.bins.dim(2));
  std::vector<double> power(usable, 0.0);
  for (std::size_t q = 0; q < spec.bins.dim(0); ++q) {
    for (std::size_t l = 0; l < spec.bins.dim(1); ++l) {
      auto row = spec.bins.row(q, l);
      for (std::size_t r = 0; r < usable; ++r) power[r] += std::norm(row[r]);
    }
  }
  return power;
}

DetectionList detect_range_bins(const RangeSpectrum& spec, double threshold_db) {
  const auto power = noncoherent_power(spec);
  DetectionList out;
  if (power.empty()) return out;
  auto sorted = power;
  const auto mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  for (std::size_t r = 0; r < power.size(); ++r) {
    if (!(power[r] > 0.0)) continue;
    const double rel_db = median > 0.0 ? 10.0 * std::log10(power[r] / median)
                                       : std::numeric_limits<double>::infinity();
    if (rel_db > threshold_db) out.bins.push_back(static_cast<int>(r));
  }
  return out;
}

Eigen::MatrixXcd extract_slice(const RangeSpectrum& spec, int bin) {
  if (bin < 0 || static_cast<std::size_t>(bin) >= spec.bins.dim(2)) {
    throw BoundsError("extract_slice: range bin " + std::to_string(bin) + " out of range");
  }
  const auto nc = spec.bins.dim(0);
  const auto nl = spec.bins.dim(1);
  Eigen::MatrixXcd slice(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(nl));
  for (std::size_t q = 0; q < nc; ++q) {
    for (std::size_t l = 0; l < nl; ++l) {
      slice(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l)) =
          spec.bins(q, l, static_cast<std::size_t>(bin));
    }
  }
  return slice;
}

}  // namespace meshot
