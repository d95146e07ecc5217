// oracle.cpp — Exact diagonalization and delayed-kernel time integration.
#include "internal/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "internal/bath_correlation.hpp"
#include "internal/errors.hpp"

namespace qdcav::oracle {
namespace {

using cd = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;
constexpr cd kI{0.0, 1.0};

// Deterministic FNV-1a over the exact bit patterns of the inputs (the same
// scheme the spectrum engine uses for its fingerprints).
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
  void text(const std::string& s) { bytes(s.data(), s.size()); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
  }
};

void require_probe_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw err::InvalidConfig("probe grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]))
      throw err::InvalidConfig("probe grid contains a non-finite frequency");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw err::InvalidConfig("probe grid must be strictly ascending");
  }
}

// Peak-normalization with the same negativity policy as the engine spectra.
spectra::Spectrum finalize(std::vector<double> grid, std::vector<double> vals,
                           spectra::SpectrumKind kind, std::string fingerprint,
                           err::WarningList warnings) {
  double peak = 0.0;
  for (double v : vals) {
    if (!std::isfinite(v))
      throw err::NumericsFailure("non-finite oracle intensity");
    peak = std::max(peak, v);
  }
  if (peak <= 0.0) throw err::NumericsFailure("oracle spectrum has no weight");
  for (double& v : vals) {
    if (v < -1e-9 * peak)
      throw err::NumericsFailure("negative oracle intensity beyond roundoff");
    v = std::max(v, 0.0) / peak;
  }
  spectra::Spectrum out;
  out.grid = std::move(grid);
  out.values = std::move(vals);
  out.raw_peak = peak;
  out.kind = kind;
  out.params_fingerprint = std::move(fingerprint);
  out.warnings = std::move(warnings);
  return out;
}

// --------------------------------------------------------------------------
// Exact diagonalization
// --------------------------------------------------------------------------

constexpr std::size_t kMaxTotalDim = 8192;  // 3 x product of mode levels

void validate_bath(const DiscreteBath& bath) {
  if (bath.mode_freqs.size() != bath.couplings.size())
    throw err::InvalidConfig("mode frequency and coupling lists differ");
  if (bath.mode_freqs.empty())
    throw err::InvalidConfig("discrete bath needs at least one mode");
  if (bath.mode_freqs.size() > 4)
    throw err::InvalidConfig("at most 4 discrete modes are supported");
  if (bath.fock_cutoff < 0 || bath.fock_cutoff > 12)
    throw err::InvalidConfig("fock_cutoff must lie in [0, 12]");
  for (double w : bath.mode_freqs)
    if (!(w > 0.0) || !std::isfinite(w))
      throw err::InvalidConfig("mode frequencies must be positive");
  for (double l : bath.couplings)
    if (!std::isfinite(l))
      throw err::InvalidConfig("mode couplings must be finite");
}

}  // namespace

spectra::Spectrum exact_absorption(const DiscreteBath& bath,
                                   const spectra::SystemParams& params,
                                   const std::vector<double>& grid) {
  validate_bath(bath);
  require_probe_grid(grid);
  const double gamma = params.common_gamma();
  if (!(gamma > 0.0))
    throw err::InvalidConfig(
        "exact_absorption renders discrete lines and needs gamma > 0");

  const std::size_t n_modes = bath.mode_freqs.size();
  const std::size_t levels = static_cast<std::size_t>(bath.fock_cutoff) + 1;
  std::size_t n_conf = 1;
  for (std::size_t k = 0; k < n_modes; ++k) {
    if (n_conf > kMaxTotalDim / levels)
      throw err::DimensionOverflow("truncated Hilbert space exceeds 8192");
    n_conf *= levels;
  }
  if (3 * n_conf > kMaxTotalDim)
    throw err::DimensionOverflow("truncated Hilbert space exceeds 8192");

  // Phonon configurations are flat multi-indices; mode k advances by
  // stride levels^k.  The one-excitation manifold interleaves the cavity
  // state (even rows) with the exciton state (odd rows) per configuration.
  std::vector<std::size_t> stride(n_modes, 1);
  for (std::size_t k = 1; k < n_modes; ++k) stride[k] = stride[k - 1] * levels;

  double shift = 0.0;  // polaron displacement of the bare exciton line
  for (std::size_t k = 0; k < n_modes; ++k)
    shift += bath.couplings[k] * bath.couplings[k] / bath.mode_freqs[k];
  const double diag2 = params.detuning + shift;

  const std::size_t dim = 2 * n_conf;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<double> eps(n_conf, 0.0);
  std::vector<std::size_t> digits(n_modes, 0);
  for (std::size_t c = 0; c < n_conf; ++c) {
    double e = 0.0;
    for (std::size_t k = 0; k < n_modes; ++k)
      e += double(digits[k]) * bath.mode_freqs[k];
    eps[c] = e;
    const std::size_t cav = 2 * c, exc = 2 * c + 1;
    h(cav, cav) = e;
    h(exc, exc) = e + diag2;
    h(cav, exc) = h(exc, cav) = params.g;
    for (std::size_t k = 0; k < n_modes; ++k) {
      if (digits[k] + 1 < levels) {
        const std::size_t up = 2 * (c + stride[k]) + 1;
        const double amp =
            bath.couplings[k] * std::sqrt(double(digits[k]) + 1.0);
        h(exc, up) = h(up, exc) = amp;
      }
    }
    for (std::size_t k = 0; k < n_modes; ++k) {  // increment multi-index
      if (++digits[k] < levels) break;
      digits[k] = 0;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success)
    throw err::NumericsFailure("manifold diagonalization failed");
  const Eigen::VectorXd& energy = es.eigenvalues();
  const Eigen::MatrixXd& modes = es.eigenvectors();

  // Thermal weight of each phonon configuration (product Gibbs state,
  // normalized on the truncated ladders; T = 0 keeps only the vacuum).
  std::vector<double> occ(n_conf, 1.0);
  if (params.temperature > 0.0) {
    for (std::size_t k = 0; k < n_modes; ++k) {
      const double x = std::exp(-bath.mode_freqs[k] / params.temperature);
      double z = 0.0;
      for (std::size_t n = 0; n < levels; ++n) z += std::pow(x, double(n));
      for (std::size_t c = 0; c < n_conf; ++c) {
        const std::size_t n = (c / stride[k]) % levels;
        occ[c] *= std::pow(x, double(n)) / z;
      }
    }
  } else {
    for (std::size_t c = 1; c < n_conf; ++c) occ[c] = 0.0;
  }

  // Spectral lines: promote |g,0;n> to the exciton, project on the manifold
  // eigenstates, and emit one Lorentzian per (configuration, eigenstate).
  struct Line {
    double pos, weight;
  };
  std::vector<Line> lines;
  for (std::size_t c = 0; c < n_conf; ++c) {
    if (occ[c] < 1e-14) continue;
    const std::size_t exc = 2 * c + 1;
    for (std::size_t j = 0; j < dim; ++j) {
      const double a = modes(exc, j);
      const double w = occ[c] * a * a;
      if (w > 1e-14) lines.push_back({energy[j] - eps[c], w});
    }
  }

  std::vector<double> vals(grid.size(), 0.0);
  const double hw = 0.5 * gamma;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double acc = 0.0;
    for (const Line& ln : lines) {
      const double d = grid[i] - ln.pos;
      acc += ln.weight * hw / (d * d + hw * hw);
    }
    vals[i] = acc;
  }

  Fnv64 f;
  f.text("oracle_exact");
  for (double w : bath.mode_freqs) f.num(w);
  for (double l : bath.couplings) f.num(l);
  f.num(bath.fock_cutoff);
  f.num(params.g);
  f.num(gamma);
  f.num(params.detuning);
  f.num(params.temperature);
  f.num(int(grid.size()));
  f.num(grid.front());
  f.num(grid.back());
  return finalize(grid, std::move(vals), spectra::SpectrumKind::OracleExact,
                  f.hex(), {});
}

// --------------------------------------------------------------------------
// Time-domain integration
// --------------------------------------------------------------------------

namespace {

// Closed-form propagator of the lossy two-state block in the one-excitation
// manifold: exp(-i M tau) for M = [[-i gamma/2, g~], [g~, d - i gamma/2]].
struct BlockPropagator {
  double g_tilde{0.0};
  double detuning{0.0};
  double gamma{0.0};

  Mat2 at(double tau) const {
    const double half_d = 0.5 * detuning;
    const double theta = std::hypot(g_tilde, half_d);
    const cd avg(half_d, -0.5 * gamma);
    const double c = std::cos(theta * tau);
    const double s =
        theta > 0.0 ? std::sin(theta * tau) / theta : tau;  // sinc limit
    Mat2 n;
    n << -half_d, g_tilde, g_tilde, half_d;
    return std::exp(-kI * avg * tau) *
           (c * Mat2::Identity() - kI * s * n).eval();
  }
};

// Scalar kernel tables for one probe frequency.  Everything the marching
// loop consumes reduces to four combinations of the correlators with the
// block propagator, phased by the probe detuning:
//   P_aa = e^{i w tau} (G_g + G_u) V_aa,   Q_ab = e^{i w tau} (G_g - G_u) V_ab.
struct ProbeTables {
  std::vector<cd> p11, p22, q12, q21;
  std::vector<cd> drive1, drive2;  // running trapezoid of the drive kernel
  std::vector<cd> back22;          // running trapezoid of P22 (background)
  std::vector<Mat2> ksum;          // running trapezoid of the 2x2 kernel
};

struct KernelGrid {
  double dt{0.0};
  std::size_t mem{0};  // memory depth in steps
  std::vector<cd> gg, gu;
  std::vector<Mat2> v;
};

// Memory depth by the kernel-decay rule |G(tau)| < 1e-8 |G(0)|, capped.
std::size_t memory_depth(const bath::BathCorrelation& corr, double dt,
                         double tau_cap) {
  const double g0 = std::abs(corr.green_g_at(0)) + std::abs(corr.green_u_at(0));
  if (g0 <= 0.0) return 0;
  std::size_t cap = std::min(
      corr.size() - 1, static_cast<std::size_t>(std::llround(tau_cap / dt)));
  std::size_t last = 0;
  for (std::size_t j = 0; j <= cap; ++j) {
    const double g = std::abs(corr.green_g_at(j)) + std::abs(corr.green_u_at(j));
    if (g >= 1e-8 * g0) last = j;
  }
  return std::max<std::size_t>(last, 1);
}

KernelGrid build_kernel_grid(const bath::BathCorrelation& corr,
                             const BlockPropagator& prop, double dt,
                             double tau_cap) {
  KernelGrid k;
  k.dt = dt;
  k.mem = memory_depth(corr, dt, tau_cap);
  k.gg.resize(k.mem + 1);
  k.gu.resize(k.mem + 1);
  k.v.resize(k.mem + 1);
  for (std::size_t j = 0; j <= k.mem; ++j) {
    k.gg[j] = corr.green_g_at(j);
    k.gu[j] = corr.green_u_at(j);
    k.v[j] = prop.at(dt * double(j));
  }
  return k;
}

ProbeTables build_probe_tables(const KernelGrid& k, double omega, double g) {
  const std::size_t m = k.mem;
  ProbeTables t;
  t.p11.resize(m + 1);
  t.p22.resize(m + 1);
  t.q12.resize(m + 1);
  t.q21.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const cd phase = std::polar(1.0, omega * k.dt * double(j));
    const cd sum = phase * (k.gg[j] + k.gu[j]);
    const cd dif = phase * (k.gg[j] - k.gu[j]);
    t.p11[j] = sum * k.v[j](0, 0);
    t.p22[j] = sum * k.v[j](1, 1);
    t.q12[j] = dif * k.v[j](1, 0);
    t.q21[j] = dif * k.v[j](0, 1);
  }
  // Running trapezoids: drive kernel g (P22, Q12), background P22, and the
  // full 2x2 kernel for the time-local variant.
  t.drive1.assign(m + 1, 0.0);
  t.drive2.assign(m + 1, 0.0);
  t.back22.assign(m + 1, 0.0);
  t.ksum.assign(m + 1, Mat2::Zero());
  cd a1 = 0.0, a2 = 0.0, b = 0.0;
  Mat2 ks = Mat2::Zero();
  auto kmat = [&](std::size_t j) {
    Mat2 kk;
    kk << t.p22[j], t.q21[j], t.q12[j], t.p11[j];
    return (g * g * kk).eval();
  };
  for (std::size_t j = 1; j <= m; ++j) {
    const double w = 0.5 * k.dt;
    a1 += w * g * (t.p22[j - 1] + t.p22[j]);
    a2 += w * g * (t.q12[j - 1] + t.q12[j]);
    b += w * (t.p22[j - 1] + t.p22[j]);
    ks += w * (kmat(j - 1) + kmat(j));
    t.drive1[j] = a1;
    t.drive2[j] = a2;
    t.back22[j] = b;
    t.ksum[j] = ks;
  }
  return t;
}

// Smooth (raised-cosine) window average of the rate samples on [a, b].
double hann_mean(const std::vector<double>& rate, std::size_t a,
                 std::size_t b) {
  double sw = 0.0, sv = 0.0;
  const double span = double(b - a);
  for (std::size_t i = a; i <= b; ++i) {
    const double w = 1.0 - std::cos(2.0 * M_PI * double(i - a) / span);
    sw += w;
    sv += w * rate[i];
  }
  return sv / sw;
}

struct ProbeResult {
  double intensity{0.0};
  double window_drift{0.0};
};

// March the first-order coherence pair under the delayed-kernel equation and
// accumulate the second-order ground-population growth rate.  The state is
// the column coherence (cavity, exciton) against the ground level; the
// conjugate row follows by Hermiticity and the local part is the lossy
// two-state block shifted by the probe frequency.
ProbeResult integrate_probe(const KernelGrid& kern, const ProbeTables& tabs,
                            const Mat2& local_gen, double mean_b, double g,
                            double omega, const TimeDomainOptions& opts) {
  const double dt = kern.dt;
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(opts.t_max / dt));
  if (n_steps < 16) throw err::InvalidConfig("t_max spans too few steps");
  const std::size_t m = kern.mem;
  const std::size_t i_ramp =
      static_cast<std::size_t>(std::llround(opts.t_ramp / dt));

  // The stationary rate exists only once the switch-on has left the memory
  // window; a sudden probe would flood the late-time signal with ringing at
  // the pole detunings instead.
  const std::size_t a0 = i_ramp + m;
  if (n_steps < a0 + 16) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "integration horizon %.6g ends inside the probe switch-on "
                  "at probe %.6g",
                  opts.t_max, omega);
    throw err::NonConvergence(buf);
  }

  std::vector<Vec2> c(n_steps + 1, Vec2::Zero());
  std::vector<double> rate(n_steps + 1, 0.0);
  Vec2 f_hist[4] = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};

  const cd drive_const = -kI * mean_b;  // probe drive on the exciton
  const bool has_memory = m > 0 && g != 0.0;

  auto envelope = [&](std::size_t i) -> double {
    if (i >= i_ramp) return 1.0;
    const double x = double(i) / double(i_ramp);
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
  };

  // One history sweep per step: sum_{j>=1} w_j K[j] c[i+1-j] in the scalar
  // combinations (a1, a2); the j = 0 endpoint is applied to the evaluation
  // state so the corrector stays implicit in it.  While the ramp is inside
  // the memory window the drive convolution (d1, d2) shares the sweep;
  // afterwards the precomputed running trapezoids take over.
  cd a1 = 0.0, a2 = 0.0;
  Vec2 drive_cur = Vec2::Zero();
  auto sweep = [&](std::size_t inew) {
    a1 = 0.0;
    a2 = 0.0;
    const std::size_t jm = std::min(inew, m);
    const bool volterra = has_memory && !opts.time_local && jm > 0;
    const bool ramped_drive = has_memory && jm > 0 && inew < i_ramp + jm;
    cd d1 = 0.0, d2 = 0.0;
    if (volterra || ramped_drive) {
      for (std::size_t j = 1; j <= jm; ++j) {
        const double w = j == jm ? 0.5 * dt : dt;
        if (volterra) {
          const Vec2& cc = c[inew - j];
          a1 += w * (tabs.p22[j] * cc(0) + tabs.q21[j] * cc(1));
          a2 += w * (tabs.q12[j] * cc(0) + tabs.p11[j] * cc(1));
        }
        if (ramped_drive) {
          const double s = envelope(inew - j);
          d1 += w * g * s * tabs.p22[j];
          d2 += w * g * s * tabs.q12[j];
        }
      }
      if (ramped_drive) {  // switch-on endpoint of the drive trapezoid
        const double s = envelope(inew);
        d1 += 0.5 * dt * g * s * tabs.p22[0];
        d2 += 0.5 * dt * g * s * tabs.q12[0];
      }
    }
    drive_cur = Vec2::Zero();
    if (has_memory && jm > 0 && !ramped_drive) {
      d1 = tabs.drive1[jm];
      d2 = tabs.drive2[jm];
    }
    drive_cur(0) = -d1;
    drive_cur(1) = envelope(inew) * drive_const - d2;
  };

  // conv = g^2 (a1, a2) + endpoint(state); row 1 of conv also feeds the rate.
  auto conv = [&](std::size_t inew, const Vec2& y) -> Vec2 {
    if (!has_memory) return Vec2::Zero();
    const std::size_t jm = std::min(inew, m);
    if (opts.time_local) return tabs.ksum[jm] * y;
    if (jm == 0) return Vec2::Zero();
    Vec2 out;
    const double w0 = 0.5 * dt;
    out(0) = g * g * (a1 + w0 * (tabs.p22[0] * y(0) + tabs.q21[0] * y(1)));
    out(1) = g * g * (a2 + w0 * (tabs.q12[0] * y(0) + tabs.p11[0] * y(1)));
    return out;
  };

  auto rate_at = [&](std::size_t inew, const Vec2& y, const Vec2& cv) {
    const std::size_t jm = std::min(inew, m);
    double r = 2.0 * mean_b * std::imag(y(1));
    if (m > 0) r -= 2.0 * std::real(tabs.back22[jm]);
    if (has_memory) r -= 2.0 * std::real(cv(0)) / g;
    return -r;  // absorption removes ground population
  };

  auto rhs = [&](std::size_t inew, const Vec2& y) -> Vec2 {
    return local_gen * y - conv(inew, y) + drive_cur;
  };

  sweep(0);
  f_hist[0] = rhs(0, c[0]);
  rate[0] = rate_at(0, c[0], conv(0, c[0]));

  for (std::size_t i = 0; i < n_steps; ++i) {
    sweep(i + 1);
    // Adams-Bashforth predictor, order ramping up over the first steps.
    Vec2 cp;
    if (i >= 3) {
      cp = c[i] + (dt / 24.0) * (55.0 * f_hist[3] - 59.0 * f_hist[2] +
                                 37.0 * f_hist[1] - 9.0 * f_hist[0]);
    } else if (i == 2) {
      cp = c[i] + (dt / 12.0) *
                      (23.0 * f_hist[2] - 16.0 * f_hist[1] + 5.0 * f_hist[0]);
    } else if (i == 1) {
      cp = c[i] + (dt / 2.0) * (3.0 * f_hist[1] - f_hist[0]);
    } else {
      cp = c[i] + dt * f_hist[0];
    }
    const Vec2 fp = rhs(i + 1, cp);
    // Adams-Moulton corrector of matching order.
    Vec2 cn;
    if (i >= 3) {
      cn = c[i] + (dt / 24.0) *
                      (9.0 * fp + 19.0 * f_hist[3] - 5.0 * f_hist[2] +
                       f_hist[1]);
    } else if (i == 2) {
      cn = c[i] + (dt / 24.0) * (9.0 * fp + 19.0 * f_hist[2] -
                                 5.0 * f_hist[1] + f_hist[0]);
    } else if (i == 1) {
      cn = c[i] + (dt / 12.0) * (5.0 * fp + 8.0 * f_hist[1] - f_hist[0]);
    } else {
      cn = c[i] + (dt / 2.0) * (fp + f_hist[0]);
    }
    c[i + 1] = cn;
    const Vec2 cv = conv(i + 1, cn);
    rate[i + 1] = rate_at(i + 1, cn, cv);
    const Vec2 fn = local_gen * cn - cv + drive_cur;
    if (i >= 3) {
      f_hist[0] = f_hist[1];
      f_hist[1] = f_hist[2];
      f_hist[2] = f_hist[3];
      f_hist[3] = fn;
    } else {
      f_hist[i + 1] = fn;
    }
  }

  const std::size_t span = n_steps - a0;
  const double late = hann_mean(rate, a0 + span / 2, n_steps);
  const double early = hann_mean(rate, a0 + span / 4, a0 + 3 * span / 4);
  const double drift =
      std::abs(late - early) / std::max(std::abs(late), 1e-300);
  if (drift > opts.rate_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "growth rate not stationary at probe %.6g "
                  "(window drift %.2e, tolerance %.2e)",
                  omega, drift, opts.rate_tol);
    throw err::NonConvergence(buf);
  }
  return {late, drift};
}

}  // namespace

spectra::Spectrum time_domain_spectrum(const spectral::PhononModel& model,
                                       const spectra::SystemParams& params,
                                       const std::vector<double>& probe_grid,
                                       const TimeDomainOptions& opts) {
  require_probe_grid(probe_grid);
  const double gamma = params.common_gamma();
  if (gamma < 0.0 || params.g < 0.0)
    throw err::InvalidConfig("loss rates and coupling must be non-negative");
  if (!(opts.dt > 0.0) || !(opts.t_max > 0.0) || !(opts.tau_mem > 0.0) ||
      opts.t_ramp < 0.0)
    throw err::InvalidConfig("time-domain options must be positive");

  bath::BathCorrelation corr(model, params.temperature, opts.dt,
                             opts.tau_mem);
  const double mean_b = corr.scalars().mean_b;
  BlockPropagator prop{params.g * mean_b, params.detuning, gamma};
  const KernelGrid kern = build_kernel_grid(corr, prop, opts.dt, opts.tau_mem);

  std::vector<double> vals(probe_grid.size(), 0.0);
  double worst_drift = 0.0;
  double worst_probe = probe_grid.front();
  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    const double omega = probe_grid[i];
    const ProbeTables tabs = build_probe_tables(kern, omega, params.g);
    Mat2 msys;
    msys << cd(0.0, -0.5 * gamma), cd(prop.g_tilde, 0.0),
        cd(prop.g_tilde, 0.0), cd(params.detuning, -0.5 * gamma);
    const Mat2 local_gen =
        (-kI * (msys - omega * Mat2::Identity())).eval();
    const ProbeResult r =
        integrate_probe(kern, tabs, local_gen, mean_b, params.g, omega, opts);
    vals[i] = r.intensity;
    if (r.window_drift > worst_drift) {
      worst_drift = r.window_drift;
      worst_probe = omega;
    }
  }

  err::WarningList warnings;
  {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "stationary-rate windows agree to %.2e (worst probe %.6g)",
                  worst_drift, worst_probe);
    warnings.push_back({"OracleWindow", buf});
  }
  if (opts.time_local)
    warnings.push_back(
        {"TimeLocalVariant", "memory evaluated on the instantaneous state"});

  Fnv64 f;
  f.text("oracle_absorption");
  f.num(int(model.kind));
  f.num(model.n);
  f.num(model.delta);
  f.num(model.omega_b);
  f.num(model.linewidth);
  f.num(model.cutoff);
  f.num(params.g);
  f.num(gamma);
  f.num(params.detuning);
  f.num(params.temperature);
  f.num(opts.dt);
  f.num(opts.t_max);
  f.num(opts.tau_mem);
  f.num(int(opts.time_local));
  f.num(int(probe_grid.size()));
  f.num(probe_grid.front());
  f.num(probe_grid.back());
  return finalize(probe_grid, std::move(vals),
                  spectra::SpectrumKind::OracleAbsorption, f.hex(),
                  std::move(warnings));
}

spectra::Spectrum time_domain_spectrum(const spectral::PhononModel& model,
                                       const spectra::SystemParams& params,
                                       const std::vector<double>& probe_grid) {
  return time_domain_spectrum(model, params, probe_grid, TimeDomainOptions{});
}

// --------------------------------------------------------------------------
// Probe-free block invariants
// --------------------------------------------------------------------------

BlockInvariants time_domain_invariants(const spectral::PhononModel& model,
                                       const spectra::SystemParams& params,
                                       const TimeDomainOptions& opts) {
  const double gamma = params.common_gamma();
  if (!(opts.dt > 0.0) || !(opts.t_max > 0.0) || !(opts.tau_mem > 0.0))
    throw err::InvalidConfig("time-domain options must be positive");

  bath::BathCorrelation corr(model, params.temperature, opts.dt,
                             opts.tau_mem);
  const double g_tilde = params.g * corr.scalars().mean_b;
  BlockPropagator prop{g_tilde, params.detuning, gamma};
  const KernelGrid kern = build_kernel_grid(corr, prop, opts.dt, opts.tau_mem);
  const double dt = kern.dt;
  const std::size_t m = kern.mem;
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(opts.t_max / dt));
  if (n_steps < 16) throw err::InvalidConfig("t_max spans too few steps");

  const double g = params.g;
  Mat2 xg, xu;
  xg << 0.0, g, g, 0.0;
  xu << 0.0, kI * g, -kI * g, 0.0;
  Mat2 msys;
  msys << cd(0.0, -0.5 * gamma), cd(g_tilde, 0.0), cd(g_tilde, 0.0),
      cd(params.detuning, -0.5 * gamma);

  // Per-lag sandwich factors with the correlators folded in:
  //   direct  G [X, (V X) rho V+]   and   mirror  -G* [X, V rho (X V+)].
  std::vector<Mat2> lg(m + 1), lu(m + 1), rg(m + 1), ru(m + 1), vd(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    vd[j] = kern.v[j].adjoint();
    lg[j] = (kern.gg[j] * kern.v[j] * xg).eval();
    lu[j] = (kern.gu[j] * kern.v[j] * xu).eval();
    rg[j] = (std::conj(kern.gg[j]) * xg * vd[j]).eval();
    ru[j] = (std::conj(kern.gu[j]) * xu * vd[j]).eval();
  }

  auto memory_term = [&](std::size_t j, const Mat2& r) -> Mat2 {
    const Mat2 s1g = (lg[j] * r * vd[j]).eval();
    const Mat2 s1u = (lu[j] * r * vd[j]).eval();
    const Mat2 vr = (kern.v[j] * r).eval();
    const Mat2 s2g = (vr * rg[j]).eval();
    const Mat2 s2u = (vr * ru[j]).eval();
    return (xg * s1g - s1g * xg) + (xu * s1u - s1u * xu) -
           (xg * s2g - s2g * xg) - (xu * s2u - s2u * xu);
  };

  std::vector<Mat2> rho(n_steps + 1, Mat2::Zero());
  rho[0](1, 1) = 1.0;  // exciton occupied, cavity empty
  Mat2 f_hist[4];

  const bool has_memory = m > 0 && g != 0.0;
  // One history sweep per step, shared by the predictor and corrector
  // evaluations; only the j = 0 endpoint depends on the evaluation state.
  Mat2 hist = Mat2::Zero();
  auto sweep = [&](std::size_t inew) {
    hist = Mat2::Zero();
    if (!has_memory) return;
    const std::size_t jm = std::min(inew, m);
    for (std::size_t j = 1; j <= jm; ++j) {
      const double w = j == jm ? 0.5 * dt : dt;
      hist += w * memory_term(j, rho[inew - j]);
    }
  };
  auto rhs = [&](std::size_t inew, const Mat2& r) -> Mat2 {
    Mat2 out = -kI * (msys * r - r * msys.adjoint());
    if (!has_memory || inew == 0) return out;
    return out - hist - 0.5 * dt * memory_term(0, r);
  };

  double trace_drift = 0.0, herm_defect = 0.0;
  auto track = [&](const Mat2& r) {
    trace_drift = std::max(trace_drift, std::abs(r.trace() - cd(1.0)));
    const Mat2 dh = (r - r.adjoint()).eval();
    herm_defect = std::max(herm_defect, dh.cwiseAbs().maxCoeff());
  };
  track(rho[0]);
  f_hist[0] = rhs(0, rho[0]);

  for (std::size_t i = 0; i < n_steps; ++i) {
    sweep(i + 1);
    Mat2 rp;
    if (i >= 3) {
      rp = rho[i] + (dt / 24.0) * (55.0 * f_hist[3] - 59.0 * f_hist[2] +
                                   37.0 * f_hist[1] - 9.0 * f_hist[0]);
    } else if (i == 2) {
      rp = rho[i] + (dt / 12.0) *
                        (23.0 * f_hist[2] - 16.0 * f_hist[1] + 5.0 * f_hist[0]);
    } else if (i == 1) {
      rp = rho[i] + (dt / 2.0) * (3.0 * f_hist[1] - f_hist[0]);
    } else {
      rp = rho[i] + dt * f_hist[0];
    }
    const Mat2 fp = rhs(i + 1, rp);
    Mat2 rn;
    if (i >= 3) {
      rn = rho[i] + (dt / 24.0) * (9.0 * fp + 19.0 * f_hist[3] -
                                   5.0 * f_hist[2] + f_hist[1]);
    } else if (i == 2) {
      rn = rho[i] + (dt / 24.0) * (9.0 * fp + 19.0 * f_hist[2] -
                                   5.0 * f_hist[1] + f_hist[0]);
    } else if (i == 1) {
      rn = rho[i] + (dt / 12.0) * (5.0 * fp + 8.0 * f_hist[1] - f_hist[0]);
    } else {
      rn = rho[i] + (dt / 2.0) * (fp + f_hist[0]);
    }
    rho[i + 1] = rn;
    track(rn);
    const Mat2 fn = rhs(i + 1, rn);
    if (i >= 3) {
      f_hist[0] = f_hist[1];
      f_hist[1] = f_hist[2];
      f_hist[2] = f_hist[3];
      f_hist[3] = fn;
    } else {
      f_hist[i + 1] = fn;
    }
  }
  return {trace_drift, herm_defect};
}

}  // namespace qdcav::oracle
