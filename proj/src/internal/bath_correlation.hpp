// bath_correlation.hpp — Phonon propagator Q(t) and dressed-operator correlators.
#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "internal/spectral_density.hpp"

namespace qdcav::bath {

using cd = std::complex<double>;

// Sideband expansion of a single undamped mode: the correlators are discrete
// frequency combs  green_g(t) = sum_m g_coef[m + mmax] e^{-i m omega_b t}
// (even m only; odd m for green_u).
struct Sidebands {
  int mmax{0};
  double omega_b{1.0};
  std::vector<double> g_coef;  // size 2*mmax + 1, index m + mmax
  std::vector<double> u_coef;
};

// Time-domain bath tables built once per (model, temperature).
class BathCorrelation {
 public:
  // Continuum models: Q by frequency quadrature on a uniform t-grid whose
  // extent is chosen from the correlator decay (capped).  Single-mode and
  // uncoupled models use analytic series and also materialize the grid.
  BathCorrelation(const spectral::PhononModel& model, double temperature,
                  double dt = 0.01, double t_cap = 1000.0);

  // Test/composition hook: explicit Q samples on a uniform grid plus the
  // Huang-Rhys factor the caller wants the dressing to use (NaN = divergent).
  // When the samples follow a known density, pass it as tail_model so the
  // transform layer can pick the matching large-t continuation.
  static BathCorrelation from_Q_table(
      std::vector<cd> q, double dt, double huang_rhys, double temperature,
      const spectral::PhononModel* tail_model = nullptr);

  const spectral::PhononModel& model() const { return model_; }
  const spectral::BathScalars& scalars() const { return scalars_; }
  double temperature() const { return temperature_; }
  double dt() const { return dt_; }
  double t_max() const { return dt_ * static_cast<double>(n_ - 1); }
  std::size_t size() const { return n_; }

  double t_at(std::size_t i) const { return dt_ * static_cast<double>(i); }
  cd Q_at(std::size_t i) const { return q_[i]; }
  cd C_at(std::size_t i) const { return c_[i]; }
  cd green_g_at(std::size_t i) const { return gg_[i]; }
  cd green_u_at(std::size_t i) const { return gu_[i]; }

  // Cubic off-grid interpolation, valid on [0, t_max].
  cd green_g(double t) const { return interp(gg_, t); }
  cd green_u(double t) const { return interp(gu_, t); }

  // Non-null for the analytic sideband path (DeltaMode and None).
  const Sidebands* sidebands() const {
    return sidebands_ ? sidebands_.get() : nullptr;
  }

  // Low-frequency slope of the density, lim J(w)/w (0 when not finite).
  double low_freq_slope() const { return c_j_; }

 private:
  BathCorrelation() = default;
  void build_continuum(double dt, double t_cap);
  void build_sidebands();
  void dress();  // Q -> C -> green_g / green_u
  cd interp(const std::vector<cd>& arr, double t) const;

  spectral::PhononModel model_{};
  spectral::BathScalars scalars_{};
  double temperature_{0.0};
  double dt_{0.01};
  std::size_t n_{0};
  double c_j_{0.0};
  std::vector<cd> q_, c_, gg_, gu_;
  std::unique_ptr<Sidebands> sidebands_;
};

}  // namespace qdcav::bath
