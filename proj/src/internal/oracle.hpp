// oracle.hpp — Brute-force cross-checks: exact diagonalization and direct
// time-domain integration of the memory-kernel master equation.
#pragma once

#include <vector>

#include "internal/spectra.hpp"

namespace qdcav::oracle {

// --------------------------------------------------------------------------
// Exact diagonalization on a truncated Hilbert space
// --------------------------------------------------------------------------

// A hand-picked set of undamped phonon modes coupled linearly to the exciton.
struct DiscreteBath {
  std::vector<double> mode_freqs;  // mode frequencies, all > 0
  std::vector<double> couplings;   // linear coupling of each mode
  int fock_cutoff{8};              // highest phonon number kept per mode
};

// Weak-probe absorption from the full exciton-cavity-phonon Hamiltonian on
// the truncated space {|g,0>,|g,1>,|e,0>} x Fock^modes: the one-excitation
// manifold is diagonalized exactly and every thermally occupied phonon
// configuration contributes a Lorentzian line of half-width gamma/2.  The
// frequency origin sits at the cavity mode; params.detuning displaces the
// dressed exciton line against it.  Requires gamma > 0 to render the lines.
spectra::Spectrum exact_absorption(const DiscreteBath& bath,
                                   const spectra::SystemParams& params,
                                   const std::vector<double>& grid);

// --------------------------------------------------------------------------
// Time-domain integration of the memory-kernel master equation
// --------------------------------------------------------------------------

struct TimeDomainOptions {
  double dt{0.05};          // integrator and correlator-table step
  double t_max{6000.0};     // integration horizon per probe frequency
  double tau_mem{400.0};    // memory-depth cap; the kernel-decay rule may
                            // shorten it (|G| < 1e-8 |G(0)|)
  double t_ramp{2500.0};    // smooth probe switch-on: suppresses the pole
                            // transients a sudden probe would excite (0 = off)
  bool time_local{false};   // evaluate the memory on the instantaneous state
                            // instead of the delayed one
  double rate_tol{5e-3};    // allowed growth-rate drift between fit windows
};

// Weak-probe absorption computed by marching the three-state reduced density
// matrix, order by order in the probe amplitude, under the delayed-kernel
// master equation (trapezoidal memory, 4th-order predictor-corrector local
// stepping).  The intensity at each probe frequency is the stationary growth
// rate of the probe-quadratic ground-state population, extracted by a
// smooth-window average over the late half of the run; disagreement between
// staggered windows beyond rate_tol raises NonConvergence.
spectra::Spectrum time_domain_spectrum(const spectral::PhononModel& model,
                                       const spectra::SystemParams& params,
                                       const std::vector<double>& probe_grid,
                                       const TimeDomainOptions& opts);
spectra::Spectrum time_domain_spectrum(const spectral::PhononModel& model,
                                       const spectra::SystemParams& params,
                                       const std::vector<double>& probe_grid);

// Conservation diagnostics of the probe-free block: the excited two-state
// block is marched from the exciton state under the full delayed kernel with
// no Hermiticity or trace constraint imposed, and the drifts are reported.
// At zero loss the exact dynamics preserves both.
struct BlockInvariants {
  double trace_drift{0.0};  // max |tr rho(t) - tr rho(0)|
  double herm_defect{0.0};  // max entrywise |rho - rho^dagger|
};

BlockInvariants time_domain_invariants(const spectral::PhononModel& model,
                                       const spectra::SystemParams& params,
                                       const TimeDomainOptions& opts);

}  // namespace qdcav::oracle
