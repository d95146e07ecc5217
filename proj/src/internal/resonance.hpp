// resonance.hpp — Polariton pole location, widths, strengths and VRS class.
#pragma once

#include <string>

#include "internal/errors.hpp"
#include "internal/spectra.hpp"

namespace qdcav::resonance {

enum class VrsClass { Underdamped, Overdamped, Marginal };

std::string vrs_label(VrsClass v);

// One located pole of a polariton branch.
struct Root {
  bool found{false};
  double omega{0.0};     // pole position inside (-g, g)
  double width{0.0};     // effective broadening gamma + 2 g^2 G''_eta
  double slope{0.0};     // reactive dressing g^2 dG'_eta/dw at the pole
  double strength{0.0};  // Lorentzian oscillator strength (residue at width 0)
};

struct ResonanceReport {
  Root plus;                      // branch with positive pole
  Root minus;                     // branch with negative pole
  double splitting{0.0};          // omega_plus - omega_minus when both exist
  double splitting_estimate{0.0};  // 2 g <B>
  double compound_strength{0.0};   // strength_plus + strength_minus
  double compound_estimate{0.0};   // exp(-S), 0 when S diverges
  VrsClass vrs{VrsClass::Overdamped};
  bool multiple_roots{false};
  err::WarningList warnings;
};

// Locates the zeros of (w - lambda_eta) - g^2 G'_eta(w) on (-g, g) by a
// 64-node sign scan plus bisection to |f| < 1e-10, assigning positive zeros
// to the + branch and negative zeros to the - branch (multiple candidates on
// one side are flagged and the narrowest kept).  Widths, local reactive
// slopes and pole strengths are evaluated at the located roots; the
// classification compares the narrower width against the splitting
// (narrower < 0.5 x splitting: Underdamped; pair missing or narrower
// > 2 x splitting: Overdamped; else Marginal).
ResonanceReport analyze(const spectra::Engine& engine, double gamma);

}  // namespace qdcav::resonance
