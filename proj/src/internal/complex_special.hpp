// complex_special.hpp — Complex exponential integral and upper incomplete gamma.
#pragma once

#include <complex>

namespace qdcav::cspec {

// E1(z) for complex z away from the negative real axis (principal branch).
// Accurate for |z| <= 4 via the convergent series and via a continued
// fraction for larger |z| with Re z >= 0 (purely imaginary arguments are the
// slowest case and still converge).
std::complex<double> exp_integral_e1(std::complex<double> z);

// Upper incomplete gamma Gamma(a, z) for real a in [-4, 1.5] and complex z on
// the principal branch.  Integer a <= 0 is handled by downward recurrence
// from E1; elsewhere a small-|z| series or a continued fraction is used.
// Intended domain: Re z >= 0 for any |z|; left half-plane only for |z| <= 4.
std::complex<double> upper_gamma(double a, std::complex<double> z);

// exp(z) * Gamma(a, z): the combination entering half-line Fourier tails.
// Stable for large |Im z| where the two factors would overflow separately.
std::complex<double> upper_gamma_scaled(double a, std::complex<double> z);

}  // namespace qdcav::cspec
