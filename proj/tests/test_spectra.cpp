// test_spectra.cpp — Lineshape assembly: limits, anchors, and properties.
#include "internal/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "internal/errors.hpp"

using namespace qdcav;
using spectra::Engine;
using spectra::GridSpec;
using spectra::Spectrum;
using spectra::SystemParams;

namespace {

spectral::PhononModel bulk_n3() {
  spectral::PhononModel m;
  m.kind = spectral::Kind::SuperohmicBulk;
  m.n = 3.0;
  m.delta = 2.0;
  m.omega_b = 1.0;
  m.cutoff = 20.0;
  return m;
}

spectral::PhononModel none_model() {
  spectral::PhononModel m;
  m.kind = spectral::Kind::None;
  m.delta = 0.0;
  return m;
}

spectral::PhononModel delta_mode(double s_target) {
  spectral::PhononModel m;
  m.kind = spectral::Kind::DeltaMode;
  m.delta = s_target;  // at T=0, S = delta / omega_b
  m.omega_b = 1.0;
  return m;
}

SystemParams make_params(double g, double gamma, double T) {
  SystemParams p;
  p.g = g;
  p.gamma_c = gamma;
  p.gamma_qd = gamma;
  p.temperature = T;
  return p;
}

// Shared heavyweight engines, built once per process.
const Engine& fig1_engine() {
  static Engine e(bulk_n3(), make_params(0.05, 1e-6, 0.1));
  return e;
}

const Engine& fig1_zero_loss_engine() {
  static Engine e(bulk_n3(), make_params(0.05, 0.0, 0.1));
  return e;
}

constexpr double kGTilde1 = 0.028580838113965362;  // g <B> for the fig-1 set
constexpr double kB2Fig1 = 0.32674572291867804;    // <B>^2 at T = 0.1

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k)
    g[k] = lo + (hi - lo) * double(k) / double(n - 1);
  return g;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return acc;
}

std::size_t argmax_in(const Spectrum& s, double lo, double hi) {
  std::size_t best = 0;
  double vb = -1.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    if (s.grid[i] < lo || s.grid[i] > hi) continue;
    if (s.values[i] > vb) {
      vb = s.values[i];
      best = i;
    }
  }
  return best;
}

// Full width of the peak at index ip measured at half its height.
double half_height_width(const Spectrum& s, std::size_t ip) {
  const double half = 0.5 * s.values[ip];
  std::size_t l = ip, r = ip;
  while (l > 0 && s.values[l] > half) --l;
  while (r + 1 < s.values.size() && s.values[r] > half) ++r;
  return s.grid[r] - s.grid[l];
}

}  // namespace

TEST_CASE("no-phonon absorption is the exact two-Lorentzian doublet") {
  const double g = 0.1, gamma = 0.01;
  Engine eng(none_model(), make_params(g, gamma, 0.0),
             Engine::BathOptions{0.01, 50.0});
  const auto grid = linspace(-0.4, 0.4, 4001);
  const Spectrum a = eng.absorption(grid);

  std::vector<double> exact(grid.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = grid[i];
    exact[i] = 0.5 * gamma / ((w - g) * (w - g) + 0.25 * gamma * gamma) +
               0.5 * gamma / ((w + g) * (w + g) + 0.25 * gamma * gamma);
    peak = std::max(peak, exact[i]);
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(a.values[i] == doctest::Approx(exact[i] / peak).epsilon(1e-9));
  CHECK(a.raw_peak == doctest::Approx(peak).epsilon(1e-12));

  // A detuned cavity moves the doublet onto the dressed-state frequencies.
  SystemParams pd = make_params(g, gamma, 0.0);
  pd.detuning = 0.12;
  Engine engd(none_model(), pd, Engine::BathOptions{0.01, 50.0});
  const double r = std::sqrt(g * g + 0.25 * pd.detuning * pd.detuning);
  const double lam_hi = 0.06 + r, lam_lo = 0.06 - r;
  const auto gridd = linspace(-0.3, 0.4, 7001);
  const Spectrum ad = engd.absorption(gridd);
  const double hstep = (0.7) / 7000.0;
  CHECK(std::abs(ad.grid[argmax_in(ad, lam_hi - 0.05, lam_hi + 0.05)] -
                 lam_hi) <= 2.0 * hstep);
  CHECK(std::abs(ad.grid[argmax_in(ad, lam_lo - 0.05, lam_lo + 0.05)] -
                 lam_lo) <= 2.0 * hstep);
}

TEST_CASE("branch transforms hit the frozen production anchors") {
  const auto& tf = fig1_engine().transform(1e-6);
  using fourier::Which;
  const double gt = kGTilde1;
  CHECK(fig1_engine().g_tilde() == doctest::Approx(gt).epsilon(1e-9));

  CHECK(tf.eval(Which::Gg, 0.0).real() ==
        doctest::Approx(3.2666e-3).epsilon(0.02));
  CHECK(tf.eval(Which::Gu, 0.0).real() ==
        doctest::Approx(0.11788).epsilon(0.02));
  CHECK(tf.eval(Which::Gg, gt).real() ==
        doctest::Approx(3.7609e-3).epsilon(0.02));
  CHECK(tf.eval(Which::Gu, gt).real() ==
        doctest::Approx(0.13190).epsilon(0.02));
  CHECK(tf.eval(Which::Gg, -gt).real() ==
        doctest::Approx(2.8260e-3).epsilon(0.02));
  CHECK(tf.eval(Which::Gu, -gt).real() ==
        doctest::Approx(0.099112).epsilon(0.02));
}

TEST_CASE("doublet splitting and width asymmetry at the figure-1 set") {
  const auto grid = spectra::default_grid(bulk_n3(), fig1_engine().params());
  CHECK(grid.has_inset);
  const Spectrum a = fig1_engine().absorption(grid.build());

  const std::size_t ilo = argmax_in(a, -2.5 * kGTilde1, -0.2 * kGTilde1);
  const std::size_t ihi = argmax_in(a, 0.2 * kGTilde1, 2.5 * kGTilde1);
  const double sep = a.grid[ihi] - a.grid[ilo];
  CHECK(sep == doctest::Approx(2.0 * 0.05 * std::exp(-0.5 * 1.1185730163303389))
                   .epsilon(0.10));

  // Thermal asymmetry: the lower resonance stays narrower.
  const double w_lo = half_height_width(a, ilo);
  const double w_hi = half_height_width(a, ihi);
  CHECK(w_lo < w_hi);
  CHECK(w_lo > 0.0);
}

TEST_CASE("vanishing coupling reduces absorption to the independent-boson "
          "spectrum and the band weight is conserved in g") {
  // Inset resolves the sharp features (ZPL width 1e-3, polariton widths
  // down to ~7e-4) that a uniform band-scale grid would under-sample.
  GridSpec gs;
  gs.lo = -4.5;
  gs.hi = 4.5;
  gs.points = 3001;
  gs.has_inset = true;
  gs.inset_lo = -0.1;
  gs.inset_hi = 0.1;
  gs.inset_points = 6001;
  const auto grid = gs.build();

  Engine weak(bulk_n3(), make_params(1e-6, 1e-3, 0.1));
  const Spectrum a = weak.absorption(grid);
  const Spectrum p = weak.polaron(grid, 1e-3);

  double mx = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i]) < 1e-4) continue;  // polariton-splitting scale
    const double ref = p.values[i] * p.raw_peak;
    const double got = a.values[i] * a.raw_peak;
    if (ref > 1e-9 * p.raw_peak)
      mx = std::max(mx, std::abs(got - ref) / ref);
  }
  CHECK(mx < 1e-3);

  // Oscillator-strength conservation: the integrated raw band moves by < 1%
  // between a tiny and the production coupling at fixed loss.
  Engine strong(bulk_n3(), make_params(0.05, 1e-3, 0.1));
  const Spectrum a2 = strong.absorption(grid);
  std::vector<double> raw1(grid.size()), raw2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    raw1[i] = a.values[i] * a.raw_peak;
    raw2[i] = a2.values[i] * a2.raw_peak;
  }
  const double i1 = trapezoid(grid, raw1);
  const double i2 = trapezoid(grid, raw2);
  CHECK(i2 / i1 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("emission needs zero loss and redistributes weight thermally") {
  CHECK_THROWS_AS((void)fig1_engine().emission(linspace(-0.1, 0.1, 11)),
                  err::UnsupportedParams);

  const auto& eng = fig1_zero_loss_engine();
  GridSpec gs;
  gs.lo = -4.5;
  gs.hi = 4.5;
  gs.points = 801;
  gs.has_inset = true;
  gs.inset_lo = -3.0 * kGTilde1;
  gs.inset_hi = 3.0 * kGTilde1;
  gs.inset_points = 1201;
  const auto grid = gs.build();

  const Spectrum em = eng.emission(grid);
  const std::size_t ilo = argmax_in(em, -2.5 * kGTilde1, -0.2 * kGTilde1);
  const std::size_t ihi = argmax_in(em, 0.2 * kGTilde1, 2.5 * kGTilde1);
  CHECK(em.values[ilo] > em.values[ihi]);  // weight flows to the lower line
  CHECK(em.values[ihi] > 0.05);            // but the upper line is present

  bool has_note = false;
  for (const auto& w : em.warnings) has_note |= w.code == "ApproximationNote";
  CHECK(has_note);

  // Regularizer insensitivity across a decade.
  const Spectrum em2 = eng.emission(grid, 1e-7);
  double mx = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (em.values[i] > 1e-3)
      mx = std::max(mx,
                    std::abs(em2.values[i] - em.values[i]) / em.values[i]);
  CHECK(mx < 5e-3);
}

TEST_CASE("no-phonon emission picks the lower dressed state at T = 0") {
  Engine eng(none_model(), make_params(0.1, 0.0, 0.0),
             Engine::BathOptions{0.01, 50.0});
  const auto grid = linspace(-0.3, 0.3, 6001);
  const Spectrum em = eng.emission(grid);
  const std::size_t ip = argmax_in(em, -0.3, 0.3);
  CHECK(std::abs(em.grid[ip] + 0.1) <= 2.0 * 0.6 / 6000.0);
  // The upper line is switched off by the zero-temperature weight.
  const std::size_t iup = argmax_in(em, 0.09, 0.11);
  CHECK(em.values[iup] < 1e-6);

  // At finite temperature the two lines obey the dressed-state Boltzmann
  // ratio exactly (analytic path).
  Engine engt(none_model(), make_params(0.1, 0.0, 0.1),
              Engine::BathOptions{0.01, 50.0});
  const Spectrum emt = engt.emission(grid);
  const std::size_t a = argmax_in(emt, -0.11, -0.09);
  const std::size_t b = argmax_in(emt, 0.09, 0.11);
  const double expected = std::exp(2.0 * 0.1 / 0.1);
  CHECK(emt.values[a] / emt.values[b] ==
        doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("independent-boson rendering: ZPL weight and delta-mode sidebands") {
  // The density's slow ~1/omega high-frequency tail keeps ~11% of the band
  // above |omega| = 4.5, so the weight ratio needs the full support in the
  // denominator: span past the quadrature cutoff.
  GridSpec gs;
  gs.lo = -21.0;
  gs.hi = 21.0;
  gs.points = 4001;
  gs.has_inset = true;
  gs.inset_lo = -0.02;
  gs.inset_hi = 0.02;
  gs.inset_points = 1601;
  const auto grid = gs.build();
  const Spectrum pol = fig1_engine().polaron(grid, 1e-3);

  std::vector<double> raw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    raw[i] = pol.values[i] * pol.raw_peak;
  std::vector<double> zpl(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i]) <= 0.02) zpl[i] = raw[i];
  const double ratio = trapezoid(grid, zpl) / trapezoid(grid, raw);
  CHECK(std::abs(ratio - kB2Fig1) < 0.015);

  // Single-mode bath at S = 1, T = 0: the first sideband of the rendered
  // comb carries exactly S times the ZPL height.
  Engine dm(delta_mode(1.0), make_params(0.0, 1e-3, 0.0),
            Engine::BathOptions{0.01, 200.0});
  const std::vector<double> probe{0.0, 1.0};
  const Spectrum pd = dm.polaron(probe, 1e-3);
  CHECK(pd.values[1] / pd.values[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("spectra are deterministic across independent engines") {
  const auto grid = linspace(-2.0, 2.0, 201);
  Engine e1(delta_mode(1.0), make_params(0.01, 1e-4, 0.4),
            Engine::BathOptions{0.01, 200.0});
  Engine e2(delta_mode(1.0), make_params(0.01, 1e-4, 0.4),
            Engine::BathOptions{0.01, 200.0});
  const Spectrum s1 = e1.absorption(grid);
  const Spectrum s2 = e2.absorption(grid);
  REQUIRE(s1.values.size() == s2.values.size());
  CHECK(std::memcmp(s1.values.data(), s2.values.data(),
                    s1.values.size() * sizeof(double)) == 0);
  CHECK(s1.params_fingerprint == s2.params_fingerprint);
  CHECK(s1.params_fingerprint.size() == 16);
}

TEST_CASE("validity guards fire on couplings near the phonon scale") {
  spectral::PhononModel narrow;
  narrow.kind = spectral::Kind::ConfinedMode;
  narrow.n = 1.0;
  narrow.delta = 3.0;
  narrow.omega_b = 1.0;
  narrow.linewidth = 0.06;
  narrow.cutoff = 20.0;

  CHECK_THROWS_AS(Engine(narrow, make_params(0.07, 1e-4, 0.0),
                         Engine::BathOptions{0.02, 400.0}),
                  err::ValidityError);

  // The confined resonance rings for ~2/linewidth, so the time window must
  // reach the asymptotic regime for the tail model to apply.
  Engine warned(narrow, make_params(0.02, 1e-4, 0.0),
                Engine::BathOptions{0.02, 400.0});
  REQUIRE(warned.validity_warnings().size() == 1);
  CHECK(warned.validity_warnings()[0].code == "ValidityWarning");
  const Spectrum a = warned.absorption(linspace(-0.1, 0.1, 51));
  bool carried = false;
  for (const auto& w : a.warnings) carried |= w.code == "ValidityWarning";
  CHECK(carried);

  SystemParams unequal = make_params(0.01, 1e-4, 0.0);
  unequal.gamma_qd = 2e-4;
  CHECK_THROWS_AS(
      Engine(narrow, unequal, Engine::BathOptions{0.02, 400.0}),
      err::UnsupportedParams);

  CHECK_THROWS_AS(
      (void)fig1_engine().polaron(linspace(-1.0, 1.0, 11), 0.0),
      err::InvalidConfig);

  // Divergent Huang-Rhys models are absorption-only.
  spectral::PhononModel oh;
  oh.kind = spectral::Kind::OhmicExp;
  oh.delta = 0.5;
  oh.omega_b = 1.0;
  oh.cutoff = 20.0;
  Engine ohe(oh, make_params(0.05, 0.0, 0.0), Engine::BathOptions{0.05, 60.0});
  CHECK_THROWS_AS((void)ohe.emission(linspace(-0.1, 0.1, 11)),
                  err::UnsupportedParams);
}
