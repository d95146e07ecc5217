// complex_special.cpp — Series, continued-fraction and recurrence evaluations.
#include "internal/complex_special.hpp"

#include <cmath>
#include <limits>

#include "internal/errors.hpp"

namespace qdcav::cspec {

namespace {

using cd = std::complex<double>;

constexpr double kEulerGamma = 0.57721566490153286061;

// Power series E1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k k!).
cd e1_series(cd z) {
  cd sum = 0.0;
  cd term = 1.0;  // holds (-1)^{k+1} z^k / k!
  for (int k = 1; k <= 64; ++k) {
    term *= -z / static_cast<double>(k);
    const cd add = -term / static_cast<double>(k);
    sum += add;
    if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return -kEulerGamma - std::log(z) + sum;
}

// Modified Lentz continued fraction for e^{z} Gamma(a, z):
// Gamma(a, z) = e^{-z} z^a / (z + 1 - a - 1(1-a)/(z + 3 - a - 2(2-a)/(...)))
cd gamma_cf_scaled(double a, cd z) {
  const double tiny = 1e-300;
  cd b = z + 1.0 - a;
  cd c = 1.0 / tiny;
  cd d = 1.0 / b;
  cd h = d;
  for (int i = 1; i <= 400; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cd delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      return std::pow(z, a) * h;
    }
  }
  throw err::NumericsFailure("upper_gamma: continued fraction stalled");
}

// exp(z) Gamma(-m, z) for integer m >= 0, by downward recurrence from
// exp(z) Gamma(0, z) = exp(z) E1(z); the e^{-z} of the power term cancels.
cd upper_gamma_scaled_nonpositive_integer(int m, cd z) {
  cd g = (std::abs(z) <= 4.0) ? std::exp(z) * e1_series(z)
                              : gamma_cf_scaled(0.0, z);
  for (int a = 0; a > -m; --a) {
    g = (g - std::pow(z, a - 1)) / static_cast<double>(a - 1);
  }
  return g;
}

// Lower incomplete gamma series: gamma(a,z) = z^a e^{-z} sum_k z^k / (a)_{k+1}.
cd lower_gamma_series(double a, cd z) {
  cd ap = a;
  cd sum = 1.0 / ap;
  cd del = sum;
  for (int k = 0; k < 500; ++k) {
    ap += 1.0;
    del *= z / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) {
      return sum * std::exp(-z) * std::pow(z, a);
    }
  }
  throw err::NumericsFailure("upper_gamma: series stalled");
}

}  // namespace

std::complex<double> exp_integral_e1(std::complex<double> z) {
  if (z == cd(0.0, 0.0))
    throw err::RangeError("exp_integral_e1: z = 0");
  if (std::abs(z) <= 4.0) return e1_series(z);
  return std::exp(-z) * gamma_cf_scaled(0.0, z);  // E1(z) = Gamma(0, z)
}

std::complex<double> upper_gamma_scaled(double a, std::complex<double> z) {
  if (!(a >= -4.0 && a <= 1.5))
    throw err::RangeError("upper_gamma: exponent outside supported range");
  if (z == cd(0.0, 0.0))
    throw err::RangeError("upper_gamma_scaled: z = 0");

  const double ar = std::round(a);
  if (std::abs(a - ar) < 1e-9 && ar <= 0.0) {
    return upper_gamma_scaled_nonpositive_integer(static_cast<int>(-ar), z);
  }
  if (std::abs(z) <= 4.0) {
    return std::exp(z) * (std::tgamma(a) - lower_gamma_series(a, z));
  }
  if (z.real() < 0.0)
    throw err::RangeError("upper_gamma: large |z| in left half-plane");
  return gamma_cf_scaled(a, z);
}

std::complex<double> upper_gamma(double a, std::complex<double> z) {
  if (z == cd(0.0, 0.0)) {
    if (a > 0.0) return std::tgamma(a);
    throw err::RangeError("upper_gamma: z = 0 with a <= 0");
  }
  return std::exp(-z) * upper_gamma_scaled(a, z);
}

}  // namespace qdcav::cspec
