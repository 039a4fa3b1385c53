#pragma once

#include <Eigen/Core>
#include <vector>

#include "meshot/array3.hpp"
#include "meshot/signal_sim.hpp"

namespace meshot {

enum class Window { rect, hann, hamming };

Window parse_window(const std::string& name);
std::vector<double> window_coefficients(Window w, std::size_t n);

// Fast-time spectrum [channel q][chirp l][range bin r]. Unitary scaling
// (1/sqrt(Bd)) so the rect-window transform preserves energy.
struct RangeSpectrum {
  Array3<cplx> bins;
  std::vector<double> axis;  // meters per bin index
  RadarConfig cfg;
};

// Ascending, unique bin indices.
struct DetectionList {
  std::vector<int> bins;
};

RangeSpectrum range_fft(const RawDataCube& cube, Window window = Window::hann);

// Direct O(Bd^2) DFT, single-threaded. Same output as range_fft.
RangeSpectrum range_fft_reference(const RawDataCube& cube, Window window = Window::hann);

// Noncoherent power per bin (summed over channels and chirps), restricted to
// the usable bins of the sampling convention.
std::vector<double> noncoherent_power(const RangeSpectrum& spec);

// Bins whose noncoherent power exceeds the median by threshold_db.
DetectionList detect_range_bins(const RangeSpectrum& spec, double threshold_db);

// Channel x slow-time matrix at one range bin.
Eigen::MatrixXcd extract_slice(const RangeSpectrum& spec, int bin);

}  // namespace meshot
