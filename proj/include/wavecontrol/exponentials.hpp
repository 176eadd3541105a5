#pragma once

#include <complex>

namespace wavecontrol {

/// e^z - 1 without cancellation for small |z|.
std::complex<double> expm1(std::complex<double> z);

/// Integral of e^{i d t} over [0, T]; Taylor branch for |d| <= small.
std::complex<double> exp_integral(std::complex<double> d, double t, double small = 1e-6);

}  // namespace wavecontrol
