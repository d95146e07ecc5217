// resonance.cpp — Pole search and the Lorentzian (pole) approximation.
#include "internal/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "internal/half_fourier.hpp"

namespace qdcav::resonance {

namespace {

using fourier::Which;

double sq(double x) { return x * x; }

// Branch transform F_eta(w) = F_g(w - lambda_eta) + F_u(w - lambda_-eta);
// Re is the dissipative part, Im the reactive part.
struct BranchEval {
  const fourier::HalfTransform& tf;
  double lam_same;
  double lam_opp;

  fourier::cd eval(double omega) const {
    return tf.eval(Which::Gg, omega - lam_same) +
           tf.eval(Which::Gu, omega - lam_opp);
  }
};

}  // namespace

std::string vrs_label(VrsClass v) {
  switch (v) {
    case VrsClass::Underdamped: return "underdamped";
    case VrsClass::Overdamped: return "overdamped";
    case VrsClass::Marginal: return "marginal";
  }
  return "unknown";
}

ResonanceReport analyze(const spectra::Engine& engine, double gamma) {
  const auto& params = engine.params();
  const double g = params.g;
  if (!(g > 0.0))
    throw err::InvalidConfig("resonance: pole analysis needs a coupling g > 0");
  if (gamma < 0.0)
    throw err::InvalidConfig("resonance: negative loss rate");

  const auto& tf = engine.transform(gamma);
  const double b = engine.scalars().mean_b;
  const double g2 = g * g;

  ResonanceReport rep;
  rep.splitting_estimate = 2.0 * g * b;
  rep.compound_estimate =
      engine.scalars().s_divergent ? 0.0
                                   : std::exp(-engine.scalars().huang_rhys);

  for (int eta : {+1, -1}) {
    const BranchEval branch{tf, engine.lambda(eta), engine.lambda(-eta)};
    const double lam = engine.lambda(eta);
    const auto froot = [&](double w) { return (w - lam) - g2 * branch.eval(w).imag(); };

    // Sign scan over (-g, g) padded by a relative 1e-6 — the no-phonon
    // dressed states sit exactly at the endpoints — then bisect per bracket.
    constexpr int kScan = 64;
    const double w_lo = -g * (1.0 + 1e-6);
    const double w_hi = g * (1.0 + 1e-6);
    std::vector<double> zeros;
    double w_prev = w_lo;
    double f_prev = froot(w_prev);
    for (int k = 1; k <= kScan; ++k) {
      const double w = w_lo + (w_hi - w_lo) * double(k) / double(kScan);
      const double f = froot(w);
      if (f_prev == 0.0) zeros.push_back(w_prev);
      if (f_prev * f < 0.0) {
        double a = w_prev, fa = f_prev;
        double c = w, fc = f;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (a + c);
          const double fm = froot(mid);
          if (std::abs(fm) < 1e-10 || 0.5 * (c - a) < 1e-15 * g) {
            a = c = mid;
            break;
          }
          if (fa * fm <= 0.0) {
            c = mid;
            fc = fm;
          } else {
            a = mid;
            fa = fm;
          }
        }
        (void)fc;
        zeros.push_back(0.5 * (a + c));
      }
      w_prev = w;
      f_prev = f;
    }
    if (f_prev == 0.0) zeros.push_back(w_prev);

    // The physical branches order their poles by sign; keep same-sign
    // candidates only and, of several, the narrowest.
    std::vector<Root> candidates;
    for (double z : zeros) {
      if (eta > 0 ? !(z > 0.0) : !(z < 0.0)) continue;
      Root r;
      r.found = true;
      r.omega = z;
      const fourier::cd fz = branch.eval(z);
      const double gpp = fz.real();
      const double gp = fz.imag();
      r.width = gamma + 2.0 * g2 * gpp;
      const double h = 1e-3 * g;
      r.slope =
          g2 * (branch.eval(z + h).imag() - branch.eval(z - h).imag()) /
          (2.0 * h);
      const double num =
          gpp * (z * z + 0.5 * gamma * g2 * gpp + 0.25 * gamma * gamma) +
          0.5 * gamma * sq(eta * b + g * gp);
      const double half_width = 0.5 * gamma + g2 * gpp;
      if (half_width > 1e-300) {
        r.strength = num / (2.0 * (1.0 - r.slope) * half_width);
      } else {
        // Width-free pole: the term is a delta line whose weight is the
        // residue of the Lorentzian family as the width tends to zero.
        r.strength = sq(eta * b + g * gp) / (2.0 * (1.0 - r.slope));
      }
      candidates.push_back(r);
    }
    if (candidates.size() > 1) {
      rep.multiple_roots = true;
      rep.warnings.push_back(
          {"MultipleRoots",
           std::string("several candidate poles on the ") +
               (eta > 0 ? "+" : "-") +
               " branch; keeping the narrowest (uniqueness is only "
               "guaranteed for smooth superohmic densities)"});
      std::sort(candidates.begin(), candidates.end(),
                [](const Root& x, const Root& y) { return x.width < y.width; });
    }
    Root& slot = eta > 0 ? rep.plus : rep.minus;
    if (!candidates.empty()) {
      slot = candidates.front();
    } else {
      rep.warnings.push_back(
          {"NoRootInInterval",
           std::string("no pole found on the ") + (eta > 0 ? "+" : "-") +
               " branch inside (-g, g); the branch is overdamped there"});
    }
  }

  if (rep.plus.found && rep.minus.found) {
    rep.splitting = rep.plus.omega - rep.minus.omega;
    rep.compound_strength = rep.plus.strength + rep.minus.strength;
    const double narrow = std::min(rep.plus.width, rep.minus.width);
    if (!(rep.splitting > 0.0)) {
      rep.vrs = VrsClass::Overdamped;
      rep.warnings.push_back(
          {"RootOrdering", "pole pair is not split; treating as overdamped"});
    } else if (narrow < 0.5 * rep.splitting) {
      rep.vrs = VrsClass::Underdamped;
    } else if (narrow > 2.0 * rep.splitting) {
      rep.vrs = VrsClass::Overdamped;
    } else {
      rep.vrs = VrsClass::Marginal;
    }
  } else {
    rep.compound_strength = (rep.plus.found ? rep.plus.strength : 0.0) +
                            (rep.minus.found ? rep.minus.strength : 0.0);
    rep.vrs = VrsClass::Overdamped;
  }
  return rep;
}

}  // namespace qdcav::resonance
