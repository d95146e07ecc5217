// spectral_density.hpp — Phonon spectral density models and derived scalars.
#pragma once

#include <string>

#include "internal/quadrature.hpp"

namespace qdcav::spectral {

enum class Kind {
  ConfinedMode,    // resonant phonon mode with finite linewidth
  SuperohmicBulk,  // alias: ConfinedMode with n = 3 and linewidth = 2 omega_b
  OhmicExp,        // ohmic with exponential cutoff
  DeltaMode,       // single undamped mode (distributional density)
  None,            // no phonon coupling
};

struct PhononModel {
  Kind kind{Kind::ConfinedMode};
  double n{3.0};          // low-frequency power law exponent (confined family)
  double delta{2.0};      // target polaron shift: integral of J(w)/w dw
  double omega_b{1.0};    // phonon resonance frequency / cutoff unit
  double linewidth{2.0};  // resonance width J~(omega_b) (confined family)
  double cutoff{20.0};    // omega_*: truncation of dynamical integrals
};

// Scalars derived from a model at temperature T.
struct BathScalars {
  double delta{0.0};       // realized polaron shift
  double huang_rhys{0.0};  // S(T); meaningless when s_divergent
  bool s_divergent{false};
  double mean_b{1.0};      // <B> = exp(-S/2); 0 when S diverges
  double delta_ph{1.0};    // phonon damping scale entering validity conditions
};

// Throws InvalidConfig on inconsistent parameters.
void validate_model(const PhononModel& m);

// Smooth density J(omega) for omega > 0 (0 otherwise).  The formula is not
// truncated at cutoff; the cutoff only limits dynamical integrals.
// Throws UnsupportedParams for DeltaMode (distributional).
double eval_J(const PhononModel& m, double omega);

// Normalization prefactor c such that the full frequency integral of J/omega
// equals delta.  Exact closed form for integer n; hybrid quadrature otherwise.
double norm_prefactor(const PhononModel& m);

// Numerically realized integral of J/omega over [0, inf); equals delta up to
// quadrature accuracy.  Independent of cutoff.
double polaron_shift(const PhononModel& m);

struct SResult {
  double value{0.0};
  bool divergent{false};
};

// Huang-Rhys factor S(T) = int_0^cutoff J/w^2 coth(w/2T) dw.
// Divergence is decided analytically from the low-frequency power.
SResult huang_rhys(const PhononModel& m, double temperature);

// <B> = exp(-S/2), exactly 0 when S diverges.
double mean_b(const PhononModel& m, double temperature);

BathScalars bath_scalars(const PhononModel& m, double temperature);

// Quadrature rule used for all dynamical frequency integrals: panels on
// [0, cutoff], refined around the phonon resonance for narrow linewidths.
quad::CompositeRule dynamics_rule(const PhononModel& m);

// coth(omega / (2T)) with a stable small-argument series; returns 1 for T=0.
double coth_half(double omega, double temperature);

std::string kind_name(Kind k);

}  // namespace qdcav::spectral
