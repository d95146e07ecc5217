// bath_correlation.cpp — Quadrature-based Q(t) tables and analytic sidebands.
#include "internal/bath_correlation.hpp"

#include <algorithm>
#include <cmath>

#include "internal/errors.hpp"

namespace qdcav::bath {

namespace {

// Dressing of a single propagator value into the even/odd correlators.
struct Dresser {
  bool divergent;
  double b2;  // exp(-S); unused when divergent

  std::pair<cd, cd> operator()(cd q) const {
    const cd c = std::exp(-q);
    if (divergent) return {0.5 * c, 0.5 * c};
    const cd ratio = b2 * b2 / c;
    return {0.5 * (c + ratio) - b2, 0.5 * (c - ratio)};
  }
};

double low_freq_slope_of(const spectral::PhononModel& m) {
  using spectral::Kind;
  switch (m.kind) {
    case Kind::OhmicExp:
      return m.delta / m.omega_b;
    case Kind::ConfinedMode:
      if (std::abs(m.n - 1.0) < 1e-12) {
        const double c = spectral::norm_prefactor(m);
        return c / (m.omega_b * m.omega_b + 0.25 * m.linewidth * m.linewidth);
      }
      return 0.0;
    default:
      return 0.0;
  }
}

}  // namespace

BathCorrelation::BathCorrelation(const spectral::PhononModel& model,
                                 double temperature, double dt, double t_cap) {
  spectral::validate_model(model);
  if (!(dt > 0.0) || !(t_cap > 10.0 * dt))
    throw err::InvalidConfig("bath correlation: invalid time grid");
  model_ = model;
  temperature_ = temperature;
  scalars_ = spectral::bath_scalars(model, temperature);
  c_j_ = low_freq_slope_of(model);
  dt_ = dt;

  using spectral::Kind;
  if (model.kind == Kind::DeltaMode || model.kind == Kind::None) {
    build_sidebands();
    // Materialize a short grid for dumps and kernel resampling.
    const double span = std::min(t_cap, 200.0);
    auto steps = static_cast<std::size_t>(std::ceil(span / dt));
    steps += (5 - steps % 5) % 5;
    n_ = steps + 1;
    q_.resize(n_);
    const double s0 =
        model.kind == Kind::None ? 0.0 : model.delta / model.omega_b;
    const double cth = spectral::coth_half(model.omega_b, temperature);
    for (std::size_t j = 0; j < n_; ++j) {
      const double wt = model.omega_b * t_at(j);
      q_[j] = cd(s0 * cth * (1.0 - std::cos(wt)), s0 * std::sin(wt));
    }
    dress();
    return;
  }
  build_continuum(dt, t_cap);
}

BathCorrelation BathCorrelation::from_Q_table(
    std::vector<cd> q, double dt, double huang_rhys, double temperature,
    const spectral::PhononModel* tail_model) {
  if (q.size() < 6 || (q.size() - 1) % 5 != 0)
    throw err::InvalidConfig("from_Q_table: need 5k+1 samples");
  BathCorrelation out;
  if (tail_model) {
    out.model_ = *tail_model;
    out.c_j_ = low_freq_slope_of(*tail_model);
  } else {
    out.model_.kind = spectral::Kind::None;
    out.model_.delta = 0.0;
  }
  out.temperature_ = temperature;
  out.dt_ = dt;
  out.n_ = q.size();
  out.q_ = std::move(q);
  out.scalars_.s_divergent = std::isnan(huang_rhys);
  out.scalars_.huang_rhys = out.scalars_.s_divergent ? 0.0 : huang_rhys;
  out.scalars_.mean_b =
      out.scalars_.s_divergent ? 0.0 : std::exp(-0.5 * huang_rhys);
  out.dress();
  return out;
}

void BathCorrelation::build_continuum(double dt, double t_cap) {
  const auto rule = spectral::dynamics_rule(model_);
  const auto& w = rule.nodes();
  const std::size_t nw = rule.size();

  // Per-node weights for Re and Im parts of Q.
  std::vector<double> wre(nw), wim(nw), omg(nw);
  for (std::size_t i = 0; i < nw; ++i) {
    const double om = w[i];
    const double dens = spectral::eval_J(model_, om) / (om * om);
    const double base = rule.weights()[i] * dens;
    omg[i] = om;
    wim[i] = base;
    wre[i] = base * spectral::coth_half(om, temperature_);
  }

  const Dresser dresser{scalars_.s_divergent,
                        scalars_.s_divergent
                            ? 0.0
                            : std::exp(-scalars_.huang_rhys)};

  // Coarse probe to find where the dressed correlators have decayed.
  auto q_direct = [&](double t) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < nw; ++i) {
      re += wre[i] * (1.0 - std::cos(omg[i] * t));
      im += wim[i] * std::sin(omg[i] * t);
    }
    return cd(re, im);
  };
  const auto [gg0, gu0] = dresser(cd(0.0, 0.0));
  const double ref = std::max(std::abs(gg0), std::abs(gu0));
  double t_end = t_cap;
  if (ref > 0.0) {
    for (double t = 10.0; t < t_cap; t += 5.0) {
      const auto [gg, gu] = dresser(q_direct(t));
      if (std::max(std::abs(gg), std::abs(gu)) < 1e-8 * ref) {
        t_end = t;
        break;
      }
    }
  } else {
    t_end = 10.0;  // uncoupled: keep a token grid
  }

  auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  steps += (5 - steps % 5) % 5;
  n_ = steps + 1;
  q_.assign(n_, cd(0.0, 0.0));

  // Uniform-step phase recurrence, re-anchored periodically.
  std::vector<double> cs(nw), sn(nw), cd_(nw), sd_(nw);
  for (std::size_t i = 0; i < nw; ++i) {
    cs[i] = 1.0;
    sn[i] = 0.0;
    cd_[i] = std::cos(omg[i] * dt);
    sd_[i] = std::sin(omg[i] * dt);
  }
  for (std::size_t j = 1; j < n_; ++j) {
    if (j % 1024 == 0) {
      const double t = t_at(j - 1);
      for (std::size_t i = 0; i < nw; ++i) {
        cs[i] = std::cos(omg[i] * t);
        sn[i] = std::sin(omg[i] * t);
      }
    }
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < nw; ++i) {
      const double c_new = cs[i] * cd_[i] - sn[i] * sd_[i];
      const double s_new = sn[i] * cd_[i] + cs[i] * sd_[i];
      cs[i] = c_new;
      sn[i] = s_new;
      re += wre[i] * (1.0 - c_new);
      im += wim[i] * s_new;
    }
    q_[j] = cd(re, im);
  }
  dress();
}

void BathCorrelation::build_sidebands() {
  auto sb = std::make_unique<Sidebands>();
  sb->omega_b = model_.omega_b;
  const double s0 =
      model_.kind == spectral::Kind::None ? 0.0 : model_.delta / model_.omega_b;
  const double S = scalars_.huang_rhys;
  const double b2 = std::exp(-S);

  // Comb weights q_m of C(t) = sum_m q_m e^{-i m omega_b t}.
  std::vector<double> qm_pos, qm_neg;  // m >= 0 and m < 0 (index |m| - 1)
  const bool effectively_cold =
      temperature_ <= 0.0 || model_.omega_b / temperature_ > 600.0;
  if (effectively_cold) {
    double term = std::exp(-s0);  // q_0
    qm_pos.push_back(term);
    for (int m = 1; m <= 350; ++m) {
      term *= s0 / static_cast<double>(m);
      if (term < 1e-18 && m > 2) break;
      qm_pos.push_back(term);
    }
  } else {
    const double nbar = 1.0 / std::expm1(model_.omega_b / temperature_);
    const double x = 2.0 * s0 * std::sqrt(nbar * (nbar + 1.0));
    if (x > 600.0)
      throw err::UnsupportedParams(
          "single-mode sideband series: temperature too high");
    const double r = std::sqrt((nbar + 1.0) / nbar);
    for (int m = 0; m <= 350; ++m) {
      const double im = (x > 0.0)
                            ? std::cyl_bessel_i(static_cast<double>(m), x)
                            : (m == 0 ? 1.0 : 0.0);
      const double qp = b2 * std::pow(r, m) * im;
      const double qn = b2 * std::pow(r, -m) * im;
      if (m > 0) qm_neg.push_back(qn);
      if (m == 0) {
        qm_pos.push_back(qp);
      } else {
        qm_pos.push_back(qp);
        if (qp + qn < 1e-18 && m > 2) break;
      }
    }
  }
  if (qm_pos.size() > 349)
    throw err::NumericsFailure("sideband series did not converge");

  const int mmax = static_cast<int>(qm_pos.size()) - 1;
  sb->mmax = mmax;
  sb->g_coef.assign(2 * mmax + 1, 0.0);
  sb->u_coef.assign(2 * mmax + 1, 0.0);
  auto qm_at = [&](int m) -> double {
    if (m >= 0) return qm_pos[static_cast<std::size_t>(m)];
    const auto idx = static_cast<std::size_t>(-m - 1);
    return idx < qm_neg.size() ? qm_neg[idx] : 0.0;
  };
  for (int m = -mmax; m <= mmax; ++m) {
    const double q = qm_at(m);
    if ((m % 2) == 0) {
      sb->g_coef[static_cast<std::size_t>(m + mmax)] = q - (m == 0 ? b2 : 0.0);
    } else {
      sb->u_coef[static_cast<std::size_t>(m + mmax)] = q;
    }
  }
  sidebands_ = std::move(sb);
}

void BathCorrelation::dress() {
  const Dresser dresser{scalars_.s_divergent,
                        scalars_.s_divergent
                            ? 0.0
                            : std::exp(-scalars_.huang_rhys)};
  c_.resize(n_);
  gg_.resize(n_);
  gu_.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    c_[j] = std::exp(-q_[j]);
    const auto [gg, gu] = dresser(q_[j]);
    gg_[j] = gg;
    gu_[j] = gu;
  }
}

cd BathCorrelation::interp(const std::vector<cd>& arr, double t) const {
  if (t < 0.0 || t > t_max() + 1e-12)
    throw err::RangeError("bath correlation: time outside tabulated range");
  const double x = t / dt_;
  auto j = static_cast<std::ptrdiff_t>(std::floor(x));
  j = std::clamp<std::ptrdiff_t>(j - 1, 0,
                                 static_cast<std::ptrdiff_t>(n_) - 4);
  const double u = x - static_cast<double>(j);  // in [~1, ~2] typically
  // 4-point Lagrange weights at offsets 0..3.
  const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
  const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
  const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
  const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
  const auto uj = static_cast<std::size_t>(j);
  return l0 * arr[uj] + l1 * arr[uj + 1] + l2 * arr[uj + 2] + l3 * arr[uj + 3];
}

}  // namespace qdcav::bath
