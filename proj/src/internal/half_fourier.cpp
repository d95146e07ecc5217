// half_fourier.cpp — Quintic Filon quadrature with analytic tail closures.
#include "internal/half_fourier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "internal/complex_special.hpp"
#include "internal/errors.hpp"

namespace qdcav::fourier {

namespace {

constexpr int kSeg = 5;  // grid intervals per polynomial segment

// Moments m_p(kappa) = int_0^5 u^p e^{i kappa u} du, p = 0..5.
void segment_moments(double kappa, cd out[6]) {
  if (std::abs(kappa) < 1.0) {
    // Taylor series in (i kappa); converges fast for |5 kappa| <= 5.
    for (int p = 0; p < 6; ++p) {
      cd term = std::pow(5.0, p + 1) / static_cast<double>(p + 1);
      cd sum = term;
      cd ik(0.0, kappa);
      cd fac = 1.0;
      double p5 = std::pow(5.0, p + 1);
      for (int k = 1; k <= 60; ++k) {
        fac *= ik / static_cast<double>(k);
        p5 *= 5.0;
        const cd add = fac * p5 / static_cast<double>(p + k + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum))) break;
      }
      out[p] = sum;
    }
    return;
  }
  const cd ik(0.0, kappa);
  const cd e5 = std::exp(cd(0.0, 5.0 * kappa));
  out[0] = (e5 - 1.0) / ik;
  double p5 = 1.0;  // 5^p
  for (int p = 1; p < 6; ++p) {
    p5 *= 5.0;
    out[p] = (p5 * e5 - static_cast<double>(p) * out[p - 1]) / ik;
  }
}

// Least-squares fit of log G over the final decade of the grid.
struct LogSlopes {
  double kappa{0.0};  // -d ln|G| / dt
  double nu{0.0};     // d arg G / dt
};

LogSlopes fit_log_slopes(const bath::BathCorrelation& corr, Which which,
                         cd ring_pos, cd ring_neg, double ring_omega) {
  const std::size_t n = corr.size();
  const double t_lo = corr.t_max() / 10.0;
  auto idx_lo = static_cast<std::size_t>(t_lo / corr.dt());
  const std::size_t stride = std::max<std::size_t>(1, (n - idx_lo) / 256);
  const bool has_ring = ring_pos != cd(0.0, 0.0) || ring_neg != cd(0.0, 0.0);

  double sum_t = 0.0, sum_tt = 0.0, sum_a = 0.0, sum_ta = 0.0;
  double sum_p = 0.0, sum_tp = 0.0;
  double prev_phase = 0.0;
  double unwound = 0.0;
  std::size_t count = 0;
  for (std::size_t i = idx_lo; i < n; i += stride) {
    cd g = which == Which::Gg ? corr.green_g_at(i) : corr.green_u_at(i);
    if (has_ring) {
      const double t = corr.t_at(i);
      const cd rot = std::polar(1.0, ring_omega * t);
      g -= (ring_pos * rot + ring_neg * std::conj(rot)) / t;
    }
    const double mag = std::abs(g);
    if (mag <= 0.0) continue;
    const double t = corr.t_at(i);
    const double lnm = std::log(mag);
    double ph = std::arg(g);
    if (count > 0) {
      double d = ph - prev_phase;
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d < -M_PI) d += 2.0 * M_PI;
      unwound += d;
    }
    prev_phase = ph;
    const double phi = unwound;
    sum_t += t;
    sum_tt += t * t;
    sum_a += lnm;
    sum_ta += t * lnm;
    sum_p += phi;
    sum_tp += t * phi;
    ++count;
  }
  if (count < 8) return {};
  const double nc = static_cast<double>(count);
  const double det = nc * sum_tt - sum_t * sum_t;
  if (std::abs(det) < 1e-30) return {};
  LogSlopes out;
  out.kappa = -(nc * sum_ta - sum_t * sum_a) / det;
  out.nu = (nc * sum_tp - sum_t * sum_p) / det;
  return out;
}

class FilonTransform final : public HalfTransform {
 public:
  FilonTransform(const bath::BathCorrelation& corr, double gamma)
      : corr_(corr) {
    gamma_ = gamma;
    dt_ = corr.dt();
    t_max_ = corr.t_max();
    const std::size_t n = corr.size();
    if ((n - 1) % kSeg != 0)
      throw err::InvalidConfig("half transform: grid not segment-aligned");
    n_seg_ = (n - 1) / kSeg;

    // A density truncated at a hard upper edge leaves an oscillatory
    // integration-by-parts remainder ~ e^{+-i w_c t} / t in the phase
    // function; once the dressing weight is finite it survives linearly in
    // the odd correlator.  The amplitudes follow from the edge values of
    // J/w^2 and its thermal partner, so the grid part can be fitted and
    // anchored on the clean algebraic decay while the ring is transformed
    // exactly (an E1 function) in the tail.
    {
      const auto& m = corr.model();
      const auto& sc = corr.scalars();
      using spectral::Kind;
      const bool hard_edge = m.kind == Kind::ConfinedMode ||
                             m.kind == Kind::SuperohmicBulk ||
                             m.kind == Kind::OhmicExp;
      if (hard_edge && !sc.s_divergent && sc.mean_b > 0.0 && m.cutoff > 0.0) {
        const double b2 = sc.mean_b * sc.mean_b;
        const double h0 =
            spectral::eval_J(m, m.cutoff) / (m.cutoff * m.cutoff);
        const double hc = h0 * spectral::coth_half(m.cutoff,
                                                   corr.temperature());
        const int u = static_cast<int>(Which::Gu);
        ring_pos_[u] = cd(0.0, 0.5 * b2 * (h0 - hc));
        ring_neg_[u] = cd(0.0, 0.5 * b2 * (h0 + hc));
        ring_omega_ = m.cutoff;
      }
    }

    // Inverse Vandermonde for 6 equally spaced nodes u = 0..5.
    Eigen::Matrix<double, 6, 6> v;
    for (int k = 0; k < 6; ++k)
      for (int p = 0; p < 6; ++p) v(k, p) = std::pow(static_cast<double>(k), p);
    const Eigen::Matrix<double, 6, 6> vinv = v.inverse();

    for (int w = 0; w < 2; ++w) {
      const Which which = static_cast<Which>(w);
      std::vector<cd> damped(n);
      for (std::size_t j = 0; j < n; ++j) {
        const cd g =
            which == Which::Gg ? corr.green_g_at(j) : corr.green_u_at(j);
        damped[j] = g * std::exp(-0.5 * gamma * corr.t_at(j));
      }
      auto& coef = coef_[w];
      coef.assign(n_seg_ * 6, cd(0.0, 0.0));
      for (std::size_t s = 0; s < n_seg_; ++s) {
        for (int p = 0; p < 6; ++p) {
          cd acc(0.0, 0.0);
          for (int k = 0; k < 6; ++k)
            acc += vinv(p, k) * damped[s * kSeg + static_cast<std::size_t>(k)];
          coef[s * 6 + static_cast<std::size_t>(p)] = acc;
        }
      }
      f_last_[w] = damped[n - 1];
      if (has_ring(which))
        f_last_[w] -= ring_at(which, t_max_) * std::exp(-0.5 * gamma * t_max_);
      decide_tail(which);
    }
  }

  cd eval(Which which, double omega) const override {
    if (std::abs(omega) > omega_limit())
      throw err::RangeError("half transform: frequency beyond grid resolution");
    const double kappa = omega * dt_;
    cd m[6];
    segment_moments(kappa, m);

    const auto& coef = coef_[static_cast<int>(which)];
    const cd step = std::polar(1.0, omega * dt_ * kSeg);
    cd phase(1.0, 0.0);
    cd sum(0.0, 0.0);
    for (std::size_t s = 0; s < n_seg_; ++s) {
      if (s % 512 == 0)
        phase = std::polar(1.0, omega * dt_ * kSeg * static_cast<double>(s));
      const cd* a = &coef[s * 6];
      cd acc = a[0] * m[0];
      for (int p = 1; p < 6; ++p) acc += a[p] * m[p];
      sum += phase * acc;
      phase *= step;
    }
    cd result = sum * dt_;

    const cd tail = tail_contribution(which, omega);
    result += tail;
    if (std::abs(tail) > 1e-4 * std::abs(result) && std::abs(result) > 0.0)
      tail_warnings_.fetch_add(1, std::memory_order_relaxed);
    return result;
  }

  double omega_limit() const override { return M_PI / dt_; }

 private:
  void decide_tail(Which which) {
    auto& ti = tails_[static_cast<int>(which)];
    const int w = static_cast<int>(which);
    const cd g0 = which == Which::Gg ? corr_.green_g_at(0) : corr_.green_u_at(0);
    const std::size_t n = corr_.size();
    cd gl =
        which == Which::Gg ? corr_.green_g_at(n - 1) : corr_.green_u_at(n - 1);
    if (has_ring(which)) gl -= ring_at(which, t_max_);
    if (std::abs(g0) <= 0.0 || std::abs(gl) < 1e-12 * std::abs(g0)) {
      ti.kind = TailInfo::Kind::None;
      return;
    }
    const auto& sc = corr_.scalars();
    const auto& m = corr_.model();
    const double T = corr_.temperature();
    const LogSlopes fit = fit_log_slopes(corr_, which, ring_pos_[w],
                                         ring_neg_[w], ring_omega_);

    if (sc.s_divergent) {
      if (T > 0.0) {
        ti.kind = TailInfo::Kind::Exponential;
        ti.kappa = std::max(fit.kappa, 0.0);
        ti.nu = fit.nu;
        return;
      }
      const double p = corr_.low_freq_slope();
      if (p > 0.0 && p <= 4.0) {
        ti.kind = TailInfo::Kind::PowerLaw;
        ti.p = p;
        ti.nu = fit.nu;
      } else {
        ti.kind = TailInfo::Kind::Exponential;
        ti.kappa = std::max(fit.kappa, 0.0);
        ti.nu = fit.nu;
      }
      return;
    }

    // Finite S: algebraic decay of the dressed correlators at every
    // temperature, with the exponent set by the low-frequency power of the
    // density (the order-(n-2) thermal term carries a vanishing coefficient
    // at exactly n = 3).
    double ne = m.n;
    if (m.kind == spectral::Kind::SuperohmicBulk) ne = 3.0;
    double p;
    if (T <= 0.0) {
      p = ne - 1.0;
    } else {
      p = (std::abs(ne - 3.0) < 1e-12) ? 2.0 : ne - 2.0;
    }
    if (p > 4.0 || p <= 0.1) {
      ti.kind = TailInfo::Kind::None;
      return;
    }
    ti.kind = TailInfo::Kind::PowerLaw;
    ti.p = p;
    ti.nu = fit.nu;
  }

  bool has_ring(Which which) const {
    const int w = static_cast<int>(which);
    return ring_pos_[w] != cd(0.0, 0.0) || ring_neg_[w] != cd(0.0, 0.0);
  }

  // Undamped cutoff-edge oscillation at time t.
  cd ring_at(Which which, double t) const {
    const int w = static_cast<int>(which);
    const cd rot = std::polar(1.0, ring_omega_ * t);
    return (ring_pos_[w] * rot + ring_neg_[w] * std::conj(rot)) / t;
  }

  // Exact transform of the edge oscillation over (t_max, infinity):
  // integral of e^{(i omega - gamma/2) t} A e^{+-i w_c t} / t dt = A E1(z).
  cd ring_tail(Which which, double omega) const {
    const int w = static_cast<int>(which);
    cd sum(0.0, 0.0);
    for (int sgn = 0; sgn < 2; ++sgn) {
      const cd amp = sgn == 0 ? ring_pos_[w] : ring_neg_[w];
      if (amp == cd(0.0, 0.0)) continue;
      const double wc = sgn == 0 ? ring_omega_ : -ring_omega_;
      const cd z = cd(0.5 * gamma_, -(omega + wc)) * t_max_;
      if (std::abs(z) < 1e-12)
        throw err::NumericsFailure(
            "half transform: undamped query at the cutoff edge");
      sum += amp * cspec::exp_integral_e1(z);
    }
    return sum;
  }

  cd tail_contribution(Which which, double omega) const {
    const auto& ti = tails_[static_cast<int>(which)];
    const cd ring = has_ring(which) ? ring_tail(which, omega) : cd(0.0, 0.0);
    if (ti.kind == TailInfo::Kind::None) return ring;
    const cd f_last = f_last_[static_cast<int>(which)];
    const cd s(0.5 * gamma_, -(omega + ti.nu));
    const cd phase = std::polar(1.0, omega * t_max_);
    if (ti.kind == TailInfo::Kind::Exponential) {
      return ring + f_last * phase / (ti.kappa + s);
    }
    const cd z = s * t_max_;
    if (std::abs(z) < 1e-14) {
      // Degenerate corner: resolve as an effective 1/s pole.
      throw err::NumericsFailure("half transform: tail pole at zero damping");
    }
    return ring + f_last * phase * t_max_ * std::pow(z, ti.p - 1.0) *
                      cspec::upper_gamma_scaled(1.0 - ti.p, z);
  }

  const bath::BathCorrelation& corr_;
  double dt_{0.01};
  double t_max_{0.0};
  std::size_t n_seg_{0};
  std::vector<cd> coef_[2];
  cd f_last_[2];
  cd ring_pos_[2]{};
  cd ring_neg_[2]{};
  double ring_omega_{0.0};
};

class SidebandTransform final : public HalfTransform {
 public:
  SidebandTransform(const bath::BathCorrelation& corr, double gamma)
      : sb_(*corr.sidebands()) {
    gamma_ = gamma;
  }

  cd eval(Which which, double omega) const override {
    const auto& coef = which == Which::Gg ? sb_.g_coef : sb_.u_coef;
    cd sum(0.0, 0.0);
    for (int m = -sb_.mmax; m <= sb_.mmax; ++m) {
      const double c = coef[static_cast<std::size_t>(m + sb_.mmax)];
      if (c == 0.0) continue;
      const cd den(0.5 * gamma_, -(omega - m * sb_.omega_b));
      if (std::abs(den) < 1e-14)
        throw err::NumericsFailure(
            "sideband transform: undamped pole at query frequency");
      sum += c / den;
    }
    return sum;
  }

  double omega_limit() const override {
    return std::numeric_limits<double>::infinity();
  }

 private:
  const bath::Sidebands sb_;  // copied: small
};

}  // namespace

std::unique_ptr<HalfTransform> HalfTransform::make(
    const bath::BathCorrelation& corr, double gamma) {
  if (!(gamma >= 0.0))
    throw err::InvalidConfig("half transform: negative damping");
  if (corr.sidebands() != nullptr)
    return std::make_unique<SidebandTransform>(corr, gamma);
  return std::make_unique<FilonTransform>(corr, gamma);
}

PMPair combined_pm(const HalfTransform& tf, double omega, double g_tilde) {
  const cd fg_minus = tf.eval(Which::Gg, omega - g_tilde);
  const cd fg_plus = tf.eval(Which::Gg, omega + g_tilde);
  const cd fu_minus = tf.eval(Which::Gu, omega - g_tilde);
  const cd fu_plus = tf.eval(Which::Gu, omega + g_tilde);
  return {fg_minus + fu_plus, fg_plus + fu_minus};
}

}  // namespace qdcav::fourier
