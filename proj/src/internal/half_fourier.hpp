// half_fourier.hpp — Damped half-line Fourier transforms of the correlators.
#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <memory>

#include "internal/bath_correlation.hpp"

namespace qdcav::fourier {

using cd = std::complex<double>;

enum class Which { Gg, Gu };

// Analytic continuation model for t beyond the tabulated grid.
struct TailInfo {
  enum class Kind { None, Exponential, PowerLaw };
  Kind kind{Kind::None};
  double p{0.0};      // power-law exponent
  double kappa{0.0};  // fitted exponential rate
  double nu{0.0};     // fitted residual phase velocity
};

// F(omega) = int_0^inf e^{i omega t - gamma t / 2} G(t) dt.
// The spectral part G'' is Re F, the dispersive part G' is Im F.
class HalfTransform {
 public:
  // Grid-based quintic Filon evaluation for continuum correlators; exact
  // Lorentzian comb for the analytic sideband path.  The correlation object
  // must outlive the transform.
  static std::unique_ptr<HalfTransform> make(const bath::BathCorrelation& corr,
                                             double gamma);

  virtual ~HalfTransform() = default;
  virtual cd eval(Which which, double omega) const = 0;

  // Largest |omega| the discretization can resolve (pi/dt on the grid path).
  virtual double omega_limit() const = 0;

  double gamma() const { return gamma_; }
  const TailInfo& tail(Which which) const {
    return tails_[static_cast<int>(which)];
  }
  // Number of queries whose extrapolated tail exceeded 1e-4 of the result.
  std::uint64_t tail_warnings() const { return tail_warnings_.load(); }

 protected:
  double gamma_{0.0};
  TailInfo tails_[2];
  mutable std::atomic<std::uint64_t> tail_warnings_{0};
};

// The eta = +/- combinations entering the polariton branches: each branch
// mixes the even correlator at omega - eta g~ with the odd one at
// omega + eta g~.  Re = spectral part, Im = dispersive part.
struct PMPair {
  cd plus;
  cd minus;
};

PMPair combined_pm(const HalfTransform& tf, double omega, double g_tilde);

}  // namespace qdcav::fourier
