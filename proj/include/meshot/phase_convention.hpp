#pragma once

#include <complex>
#include <numbers>

namespace meshot {

// The one place the phase sign lives. The de-chirped baseband is modeled as
// tx * conj(rx), so a two-way delay tau shows up as exp(+j 2 pi f tau): the
// beat tone sits at a positive frequency and a path that shortens by omega
// wavelengths rotates the sample by exp(-j 2 pi omega). Steering vectors use
// the same rotation, which is what makes w^H x coherent.
inline constexpr double kDelaySign = +1.0;

// exp(j * kDelaySign * 2 pi * cycles)
inline std::complex<double> delay_phasor(double cycles) {
  return std::polar(1.0, kDelaySign * 2.0 * std::numbers::pi * cycles);
}

// Steering entry for a path shortening of `cycles` wavelengths.
inline std::complex<double> advance_phasor(double cycles) {
  return delay_phasor(-cycles);
}

}  // namespace meshot
