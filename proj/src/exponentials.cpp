#include "wavecontrol/exponentials.hpp"

#include <cmath>

namespace wavecontrol {

std::complex<double> expm1(std::complex<double> z) {
    const double a = z.real();
    const double b = z.imag();
    const double half = std::sin(0.5 * b);
    // e^{a+ib} - 1 = expm1(a) cos b + (cos b - 1) + i e^a sin b
    const double re = std::expm1(a) * std::cos(b) - 2.0 * half * half;
    const double im = std::exp(a) * std::sin(b);
    return {re, im};
}

std::complex<double> exp_integral(std::complex<double> d, double t, double small) {
    const std::complex<double> i(0.0, 1.0);
    if (std::abs(d) <= small) return t + i * d * t * t / 2.0 - d * d * t * t * t / 6.0;
    return expm1(i * d * t) / (i * d);
}

}  // namespace wavecontrol
