// scenario.hpp — Config files, presets, validation reports and scenario runs.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "internal/errors.hpp"
#include "internal/spectra.hpp"
#include "internal/spectral_density.hpp"

namespace qdcav::scenario {

// Frequency window of the output grid; unset bounds fall back to the
// model-derived defaults (+-1.5 max(polaron shift, 3 omega_b), inset across
// +-3 g~ whenever the dressed coupling is finite).
struct GridConfig {
  std::optional<double> lo;            // window minimum
  std::optional<double> hi;            // window maximum
  std::size_t points{4001};            // main-window sample count
  std::optional<bool> inset_enabled;   // unset: on whenever g~ > 0
  std::optional<double> inset_lo;      // refined-window minimum
  std::optional<double> inset_hi;      // refined-window maximum
  std::size_t inset_points{2001};      // refined-window sample count
};

// Which artifacts a run writes.
struct OutputToggles {
  bool absorption{true};
  bool emission{true};          // skipped with a warning when loss > 0
  bool polaron{true};           // independent-boson reference curve
  bool resonance_report{true};  // pole/width/strength sidecar
  bool oracle_check{false};     // independent cross-check, see OracleParams
  bool correlator{false};       // bath correlator table dump
};

// Discretization and regularization knobs; everything lands in the manifest.
struct NumericsConfig {
  double bath_dt{0.01};         // correlator time step
  double bath_t_cap{1000.0};    // correlator grid extent
  double emission_gamma_eff{1e-6};  // emission on-shell regularizer
  std::optional<double> polaron_render_gamma;  // unset: loss rate, or 1e-3
};

// Cross-check controls.  The verification path is picked by the phonon
// model: exact diagonalization for the single undamped mode, delayed-kernel
// time integration otherwise.
struct OracleParams {
  std::size_t probe_count{11};       // probe frequencies near the line center
  std::optional<double> probe_span;  // unset: min(5e-3 omega_b, 0.175 g~)
  std::vector<double> probe_freqs;   // explicit probe list overrides the span
  double dt{0.05};                   // time-integration step
  double t_max{6000.0};              // integration horizon per probe
  double tau_mem{400.0};             // memory-depth cap
  double t_ramp{2500.0};             // smooth probe switch-on period
  bool time_local{false};            // instantaneous-memory variant
  double rate_tol{5e-3};             // stationary-rate window agreement
  int fock_cutoff{12};               // phonon ladder size, exact path
  std::optional<double> tolerance;   // unset: 2e-2 rates / 1e-3 positions
};

// One self-contained scenario: what to compute, how, and where to put it.
struct ScenarioConfig {
  spectral::PhononModel model;
  spectra::SystemParams params;
  GridConfig grid;
  OutputToggles outputs;
  NumericsConfig numerics;
  OracleParams oracle;
  std::string output_dir{"qdcav_out"};
};

// --------------------------------------------------------------------------
// Config file format: a single JSON document with nested keys mirroring the
// structs above.  Every field has a default; unknown keys are errors that
// name the offending path.  Throws InvalidConfig with diagnostics.
// --------------------------------------------------------------------------

ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig config_from_file(const std::string& path);

// Canonical serialization; parse(dump(c)) reproduces dump(c) byte for byte.
std::string config_to_json(const ScenarioConfig& cfg);

// Compiled-in scenario presets, dumped or run on request.
std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);

// Library version string.
std::string version();

// --------------------------------------------------------------------------
// Operations
// --------------------------------------------------------------------------

// Derived scalars without running any spectra.
struct DerivedScalars {
  spectral::BathScalars bath;
  double g_tilde{0.0};
};
DerivedScalars derive_scalars(const ScenarioConfig& cfg);

// Diagnostics only: effective scalars, soft validity warnings, and whether
// the coupling hard-violates the g << delta_ph condition.  Malformed models
// still throw InvalidConfig; everything else is reported, not thrown.
struct ValidateReport {
  DerivedScalars scalars;
  err::WarningList warnings;
  bool hard_violation{false};
  std::string text;  // printable diagnostics block
};
ValidateReport validate(const ScenarioConfig& cfg);

// Runs the scenario pipeline and writes the toggled artifacts plus a
// manifest into cfg.output_dir.  Returns what was written; throws on config,
// numerical, or validity errors.
struct RunReport {
  std::vector<std::string> files;  // names written under output_dir
  err::WarningList warnings;
  std::string manifest_json;
  std::string manifest_path;
  std::string summary;  // printable block: files written plus warnings
};
RunReport run(const ScenarioConfig& cfg);

// Independent cross-check of the frequency-domain lineshape.  For the
// undamped single-mode model the reference and an exact-diagonalization
// spectrum are compared by peak positions; otherwise the delayed-kernel time
// integration is compared by normalized intensity at the probe frequencies.
struct OracleReport {
  std::string method;            // "exact_diagonalization" | "time_domain"
  std::vector<double> probes;    // probe frequencies / matched peak positions
  std::vector<double> reference; // normalized primary intensities / positions
  std::vector<double> check;     // normalized oracle intensities / positions
  double deviation{0.0};         // worst relative gap / position offset
  double tolerance{2e-2};
  bool passed{false};
  err::WarningList warnings;
  std::string csv_path;  // side-by-side curves, empty if not written
  std::string summary;   // printable block
};
OracleReport oracle_check(const ScenarioConfig& cfg);

}  // namespace qdcav::scenario
