// spectra.hpp — Absorption, emission and polaron spectra on frequency grids.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "internal/bath_correlation.hpp"
#include "internal/errors.hpp"
#include "internal/half_fourier.hpp"
#include "internal/spectral_density.hpp"

namespace qdcav::spectra {

// Cavity-exciton system parameters; frequencies in omega_b units with the
// origin at the zero-phonon line (cavity resonant with the ZPL by default).
struct SystemParams {
  double g{0.0};            // exciton-cavity coupling
  double gamma_c{0.0};      // cavity loss rate
  double gamma_qd{0.0};     // exciton line broadening
  double detuning{0.0};     // ZPL frequency minus cavity frequency
  double temperature{0.0};  // phonon bath temperature

  // The lineshape formulas assume equal loss rates; returns the shared value
  // or throws UnsupportedParams when the two rates differ.
  double common_gamma() const;
};

enum class SpectrumKind {
  Absorption,
  Emission,
  PolaronAbsorption,
  OracleAbsorption,
  OracleExact,
};

std::string kind_label(SpectrumKind k);

struct Spectrum {
  std::vector<double> grid;    // frequencies, strictly ascending
  std::vector<double> values;  // intensities, peak-normalized to 1
  double raw_peak{0.0};        // pre-normalization maximum (arbitrary units)
  SpectrumKind kind{SpectrumKind::Absorption};
  std::string params_fingerprint;
  err::WarningList warnings;
};

// Uniform main window plus an optional refined inset; build() merges both
// into one ascending, de-duplicated grid.
struct GridSpec {
  double lo{-4.5};
  double hi{4.5};
  std::size_t points{4001};
  bool has_inset{false};
  double inset_lo{0.0};
  double inset_hi{0.0};
  std::size_t inset_points{2001};

  std::vector<double> build() const;
};

// Default window: +-1.5 max(polaron shift, 3 omega_b) with a 2001-point inset
// across +-3 g~ around the ZPL.
GridSpec default_grid(const spectral::PhononModel& m, const SystemParams& p);

// --------------------------------------------------------------------------
// Engine: one bath correlator per (model, params); half-line transforms are
// cached per damping value and shared by the spectrum assemblies below.
// --------------------------------------------------------------------------
class Engine {
 public:
  struct BathOptions {
    double dt{0.01};       // correlator time step
    double t_cap{1000.0};  // correlator grid extent
  };

  // Validates the model, derives the bath scalars and tabulates the
  // correlator.  Throws ValidityError when the coupling reaches the phonon
  // scale (the lineshape theory has no claim there); records a soft warning
  // above 30% of it.
  Engine(const spectral::PhononModel& model, const SystemParams& params);
  Engine(const spectral::PhononModel& model, const SystemParams& params,
         BathOptions opts);

  const spectral::PhononModel& model() const { return model_; }
  const SystemParams& params() const { return params_; }
  const bath::BathCorrelation& correlator() const { return corr_; }
  const spectral::BathScalars& scalars() const { return corr_.scalars(); }
  double g_tilde() const { return params_.g * scalars().mean_b; }

  // Polariton branch frequencies from the renormalized coupling, including
  // the detuned generalization (+- g~ on resonance).
  double lambda(int eta) const;

  const fourier::HalfTransform& transform(double gamma) const;

  err::WarningList validity_warnings() const { return validity_; }

  // Weak-probe absorption at the configured loss rate.
  Spectrum absorption(const std::vector<double>& grid) const;

  // Emission; derived strictly at zero loss, so params gamma must be 0 and
  // the on-shell denominators are regularized by gamma_eff (insensitive over
  // a decade by construction).  Requires a finite dressing weight (or no
  // phonon coupling at all, handled analytically).
  Spectrum emission(const std::vector<double>& grid,
                    double gamma_eff = 1e-6) const;

  // Independent-boson absorption (g = 0) rendered with the given loss rate;
  // the ZPL appears as a Lorentzian of that width, so render_gamma > 0.
  Spectrum polaron(const std::vector<double>& grid, double render_gamma) const;

  std::string fingerprint() const { return fingerprint_; }

 private:
  Spectrum finalize(std::vector<double> grid, std::vector<double> values,
                    SpectrumKind kind, std::uint64_t tail_delta) const;
  double absorption_value(const fourier::HalfTransform& tf, double g,
                          double gamma, double omega) const;

  spectral::PhononModel model_;
  SystemParams params_;
  bath::BathCorrelation corr_;
  err::WarningList validity_;
  std::string fingerprint_;
  mutable std::map<double, std::unique_ptr<fourier::HalfTransform>> tf_cache_;
};

}  // namespace qdcav::spectra
