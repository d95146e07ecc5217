// spectra.cpp — Lineshape assembly from the polariton-branch transforms.
#include "internal/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace qdcav::spectra {

namespace {

using fourier::Which;

double sq(double x) { return x * x; }

// Deterministic FNV-1a over the exact bit patterns of the inputs.
struct Fnv64 {
  std::uint64_t h{1469598103934665603ull};
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 1099511628211ull;
  }
  void num(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    bytes(&u, sizeof u);
  }
  void num(int v) { bytes(&v, sizeof v); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
  }
};

// Occupation factor 1 / (1 + e^{eta 2 g~ / T}) with its T = 0 limits.
double branch_weight(int eta, double g_tilde, double temperature) {
  if (g_tilde <= 0.0) return 0.5;
  if (temperature <= 0.0) return eta > 0 ? 0.0 : 1.0;
  const double x = 2.0 * eta * g_tilde / temperature;
  if (x > 700.0) return 0.0;
  if (x < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

double SystemParams::common_gamma() const {
  const double scale = std::max({std::abs(gamma_c), std::abs(gamma_qd), 1.0});
  if (std::abs(gamma_c - gamma_qd) > 1e-14 * scale)
    throw err::UnsupportedParams(
        "spectra: lineshapes are derived for equal cavity and exciton loss "
        "rates");
  return gamma_c;
}

std::string kind_label(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::Absorption: return "absorption";
    case SpectrumKind::Emission: return "emission";
    case SpectrumKind::PolaronAbsorption: return "polaron_absorption";
    case SpectrumKind::OracleAbsorption: return "oracle_absorption";
    case SpectrumKind::OracleExact: return "oracle_exact";
  }
  return "unknown";
}

// --------------------------------------------------------------------------
// Grids
// --------------------------------------------------------------------------

std::vector<double> GridSpec::build() const {
  if (!(hi > lo) || points < 2)
    throw err::InvalidConfig("grid: need hi > lo and at least 2 points");
  std::vector<double> out;
  out.reserve(points + (has_inset ? inset_points : 0));
  for (std::size_t k = 0; k < points; ++k)
    out.push_back(lo + (hi - lo) * static_cast<double>(k) /
                           static_cast<double>(points - 1));
  if (has_inset) {
    if (!(inset_hi > inset_lo) || inset_points < 2)
      throw err::InvalidConfig("grid: malformed inset window");
    for (std::size_t k = 0; k < inset_points; ++k)
      out.push_back(inset_lo + (inset_hi - inset_lo) * static_cast<double>(k) /
                                    static_cast<double>(inset_points - 1));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <=
                                   1e-12 * std::max(1.0, std::abs(a));
                          }),
              out.end());
  }
  return out;
}

GridSpec default_grid(const spectral::PhononModel& m, const SystemParams& p) {
  GridSpec spec;
  const double span =
      1.5 * std::max(m.kind == spectral::Kind::None ? 0.0 : m.delta,
                     3.0 * m.omega_b);
  spec.lo = -span;
  spec.hi = span;
  spec.points = 4001;
  const double gt = p.g * spectral::mean_b(m, p.temperature);
  if (gt > 0.0) {
    spec.has_inset = true;
    spec.inset_lo = -3.0 * gt;
    spec.inset_hi = 3.0 * gt;
    spec.inset_points = 2001;
  }
  return spec;
}

// --------------------------------------------------------------------------
// Engine
// --------------------------------------------------------------------------

Engine::Engine(const spectral::PhononModel& model, const SystemParams& params)
    : Engine(model, params, BathOptions{}) {}

Engine::Engine(const spectral::PhononModel& model, const SystemParams& params,
               BathOptions opts)
    : model_(model),
      params_(params),
      corr_(model, params.temperature, opts.dt, opts.t_cap) {
  const double gamma = params_.common_gamma();
  if (gamma < 0.0) throw err::InvalidConfig("spectra: negative loss rate");
  if (params_.g < 0.0) throw err::InvalidConfig("spectra: negative coupling");

  if (model_.kind != spectral::Kind::None && params_.g > 0.0) {
    const double dph = scalars().delta_ph;
    if (params_.g >= dph)
      throw err::ValidityError(
          "spectra: coupling g reaches the phonon scale delta_ph; the "
          "renormalized-coupling treatment does not apply");
    if (params_.g > 0.3 * dph)
      validity_.push_back(
          {"ValidityWarning",
           "coupling g exceeds 30% of the phonon scale delta_ph; lineshapes "
           "are approaching the limit of their validity"});
  }

  Fnv64 f;
  f.num(static_cast<int>(model_.kind));
  f.num(model_.n);
  f.num(model_.delta);
  f.num(model_.omega_b);
  f.num(model_.linewidth);
  f.num(model_.cutoff);
  f.num(params_.g);
  f.num(params_.gamma_c);
  f.num(params_.gamma_qd);
  f.num(params_.detuning);
  f.num(params_.temperature);
  f.num(opts.dt);
  f.num(opts.t_cap);
  fingerprint_ = f.hex();
}

double Engine::lambda(int eta) const {
  const double gt = g_tilde();
  const double d = params_.detuning;
  const double r = std::sqrt(gt * gt + 0.25 * d * d);
  return 0.5 * d + (eta > 0 ? r : -r);
}

const fourier::HalfTransform& Engine::transform(double gamma) const {
  auto it = tf_cache_.find(gamma);
  if (it == tf_cache_.end()) {
    it = tf_cache_.emplace(gamma, fourier::HalfTransform::make(corr_, gamma))
             .first;
  }
  return *it->second;
}

double Engine::absorption_value(const fourier::HalfTransform& tf, double g,
                                double gamma, double omega) const {
  const double b = scalars().mean_b;
  const double gt = g * b;
  const double d = params_.detuning;
  const double r = std::sqrt(gt * gt + 0.25 * d * d);
  const double g2 = g * g;
  double acc = 0.0;
  for (int eta : {+1, -1}) {
    const double lam = 0.5 * d + (eta > 0 ? r : -r);
    const double lam_opp = 0.5 * d - (eta > 0 ? r : -r);
    const fourier::cd f_eta = tf.eval(Which::Gg, omega - lam) +
                              tf.eval(Which::Gu, omega - lam_opp);
    const double gpp = f_eta.real();
    const double gp = f_eta.imag();
    const double num =
        gpp * (omega * omega + 0.5 * gamma * g2 * gpp + 0.25 * gamma * gamma) +
        0.5 * gamma * sq(eta * b + g * gp);
    const double den = sq((omega - lam) - g2 * gp) + sq(0.5 * gamma + g2 * gpp);
    acc += num / den;
  }
  return acc;
}

Spectrum Engine::absorption(const std::vector<double>& grid) const {
  const double gamma = params_.common_gamma();
  const auto& tf = transform(gamma);
  const std::uint64_t warn0 = tf.tail_warnings();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    values[i] = absorption_value(tf, params_.g, gamma, grid[i]);
  return finalize(grid, std::move(values), SpectrumKind::Absorption,
                  tf.tail_warnings() - warn0);
}

Spectrum Engine::polaron(const std::vector<double>& grid,
                         double render_gamma) const {
  if (!(render_gamma > 0.0))
    throw err::InvalidConfig(
        "spectra: the g = 0 spectrum renders the ZPL as a Lorentzian and "
        "needs a positive width");
  const auto& tf = transform(render_gamma);
  const std::uint64_t warn0 = tf.tail_warnings();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    values[i] = absorption_value(tf, 0.0, render_gamma, grid[i]);
  return finalize(grid, std::move(values), SpectrumKind::PolaronAbsorption,
                  tf.tail_warnings() - warn0);
}

Spectrum Engine::emission(const std::vector<double>& grid,
                          double gamma_eff) const {
  if (params_.common_gamma() != 0.0)
    throw err::UnsupportedParams(
        "spectra: emission lineshapes are derived strictly at zero loss");
  if (!(gamma_eff > 0.0))
    throw err::InvalidConfig("spectra: emission regularizer must be positive");

  const double gt = g_tilde();
  const double T = params_.temperature;
  std::vector<double> values(grid.size(), 0.0);

  if (model_.kind == spectral::Kind::None) {
    // No phonons: the fluctuation correlators vanish identically and the
    // lines sit exactly on the polariton branches with thermal weights.
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double w = grid[i];
      double acc = 0.0;
      for (int eta : {+1, -1}) {
        const double weight = branch_weight(eta, gt, T);
        acc += weight * 0.5 * gamma_eff /
               (sq(w - lambda(eta)) + 0.25 * gamma_eff * gamma_eff);
      }
      values[i] = 2.0 * w * w * acc;
    }
    return finalize(grid, std::move(values), SpectrumKind::Emission, 0);
  }

  if (scalars().s_divergent)
    throw err::UnsupportedParams(
        "spectra: emission needs a finite dressing weight; divergent "
        "Huang-Rhys models are covered for absorption only");

  const auto& tf = transform(gamma_eff);
  const std::uint64_t warn0 = tf.tail_warnings();
  const double g = params_.g;
  const double g2 = g * g;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid[i];
    double acc = 0.0;
    for (int eta : {+1, -1}) {
      const double a_same = w - lambda(eta);
      const double a_opp = w - lambda(-eta);
      const fourier::cd f_eta =
          tf.eval(Which::Gg, a_same) + tf.eval(Which::Gu, a_opp);
      const double gpp = f_eta.real();
      const double gp = f_eta.imag();
      // Reactive cross-terms (the Delta'_eta functions) are set to zero.
      const double num =
          branch_weight(eta, gt, T) * tf.eval(Which::Gg, -a_same).real() +
          branch_weight(-eta, gt, T) * tf.eval(Which::Gu, -a_opp).real();
      const double den = sq(a_same - g2 * gp) + sq(g2 * gpp);
      acc += num / den;
    }
    values[i] = 2.0 * w * w * acc;
  }
  Spectrum out = finalize(grid, std::move(values), SpectrumKind::Emission,
                          tf.tail_warnings() - warn0);
  out.warnings.push_back(
      {"ApproximationNote",
       "emission drops the reactive cross-terms (set identically to zero)"});
  return out;
}

Spectrum Engine::finalize(std::vector<double> grid, std::vector<double> values,
                          SpectrumKind kind, std::uint64_t tail_delta) const {
  double peak = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw err::NumericsFailure("spectra: non-finite intensity at omega = " +
                                 std::to_string(grid[i]));
    peak = std::max(peak, values[i]);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < -1e-9 * std::max(peak, 1e-300))
      throw err::NumericsFailure(
          "spectra: negative intensity at omega = " + std::to_string(grid[i]) +
          " exceeds the roundoff allowance");
    if (values[i] < 0.0) values[i] = 0.0;
  }
  if (peak > 0.0)
    for (double& v : values) v /= peak;

  Spectrum out;
  out.grid = std::move(grid);
  out.values = std::move(values);
  out.raw_peak = peak;
  out.kind = kind;
  out.params_fingerprint = fingerprint_;
  out.warnings = validity_;
  if (tail_delta > 0)
    out.warnings.push_back(
        {"AccuracyWarning",
         "extrapolated large-time tail exceeded 1e-4 of the transform at " +
             std::to_string(tail_delta) + " evaluations"});
  return out;
}

}  // namespace qdcav::spectra
