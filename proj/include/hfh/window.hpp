#pragma once

#include <cmath>
#include <complex>

namespace hfh {

// (1/a) int_0^a exp(i kappa x) dx = (e^{ix} - 1) / (ix) with x = kappa a.
// Written through sin(x/2) so whole multiples of 2 pi give (almost) exact zeros.
inline std::complex<double> window_mean(double x) {
  if (std::abs(x) < 1e-12) return {1.0, 0.0};
  return std::polar(1.0, 0.5 * x) * (std::sin(0.5 * x) / (0.5 * x));
}

}  // namespace hfh
