// scenario.cpp — Config files, presets, validation reports and scenario runs.
#include "internal/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "internal/bath_correlation.hpp"
#include "internal/oracle.hpp"
#include "internal/resonance.hpp"
#include "json.hpp"

#ifndef QDCAV_VERSION
#define QDCAV_VERSION "1.0.0"
#endif

namespace qdcav::scenario {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

namespace {

// ----------------------------------------------------------------------------
// Small formatting helpers
// ----------------------------------------------------------------------------

std::string strf(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

// Shortest decimal that round-trips the double exactly (2, 0.05, 1e-06, ...).
std::string num_str(double x) { return njson(x).dump(); }

void append_row(std::string& out, double omega, double value,
                const std::string& kind) {
  out += strf("%.16e,%.16e,", omega, value);
  out += kind;
  out += '\n';
}

// ----------------------------------------------------------------------------
// JSON config parsing: every field defaulted, unknown keys rejected by path
// ----------------------------------------------------------------------------

[[noreturn]] void cfg_fail(const std::string& path, const std::string& what) {
  throw err::InvalidConfig("config: " + (path.empty() ? "top level" : path) +
                           ": " + what);
}

// Tracks which keys of one JSON object were consumed; flags the rest.
class Reader {
 public:
  Reader(const njson& node, std::string path)
      : node_(&node), path_(std::move(path)) {
    if (!node_->is_object()) cfg_fail(path_, "expected an object");
  }

  // Null values count as "use the default".
  const njson* get(const char* key) {
    seen_.insert(key);
    auto it = node_->find(key);
    if (it == node_->end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::string sub(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = node_->begin(); it != node_->end(); ++it)
      if (!seen_.count(it.key())) cfg_fail(sub(it.key()), "unknown key");
  }

 private:
  const njson* node_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_num(const njson& j, const std::string& path) {
  if (!j.is_number()) cfg_fail(path, "expected a number");
  return j.get<double>();
}

std::size_t as_count(const njson& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    cfg_fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

bool as_bool(const njson& j, const std::string& path) {
  if (!j.is_boolean()) cfg_fail(path, "expected true or false");
  return j.get<bool>();
}

std::string as_str(const njson& j, const std::string& path) {
  if (!j.is_string()) cfg_fail(path, "expected a string");
  return j.get<std::string>();
}

struct KindToken {
  const char* token;
  spectral::Kind kind;
};

constexpr KindToken kKindTokens[] = {
    {"confined_mode", spectral::Kind::ConfinedMode},
    {"superohmic_bulk", spectral::Kind::SuperohmicBulk},
    {"ohmic_exp", spectral::Kind::OhmicExp},
    {"delta_mode", spectral::Kind::DeltaMode},
    {"none", spectral::Kind::None},
};

spectral::Kind kind_from_token(const std::string& s, const std::string& path) {
  for (const auto& t : kKindTokens)
    if (s == t.token || s == spectral::kind_name(t.kind)) return t.kind;
  cfg_fail(path,
           "unknown model kind \"" + s +
               "\" (expected confined_mode, superohmic_bulk, ohmic_exp, "
               "delta_mode or none)");
}

std::string kind_token(spectral::Kind k) {
  for (const auto& t : kKindTokens)
    if (t.kind == k) return t.token;
  return "?";
}

void parse_model(Reader& top, spectral::PhononModel& m) {
  const njson* node = top.get("model");
  if (!node) return;
  Reader r(*node, "model");
  if (const njson* v = r.get("kind")) {
    m.kind = kind_from_token(as_str(*v, r.sub("kind")), r.sub("kind"));
    // No phonon coupling means no polaron shift unless set explicitly.
    if (m.kind == spectral::Kind::None) m.delta = 0.0;
  }
  if (const njson* v = r.get("n")) m.n = as_num(*v, r.sub("n"));
  if (const njson* v = r.get("delta")) m.delta = as_num(*v, r.sub("delta"));
  if (const njson* v = r.get("omega_b"))
    m.omega_b = as_num(*v, r.sub("omega_b"));
  if (const njson* v = r.get("linewidth"))
    m.linewidth = as_num(*v, r.sub("linewidth"));
  if (const njson* v = r.get("cutoff")) m.cutoff = as_num(*v, r.sub("cutoff"));
  r.finish();
}

void parse_params(Reader& top, spectra::SystemParams& p) {
  const njson* node = top.get("params");
  if (!node) return;
  Reader r(*node, "params");
  if (const njson* v = r.get("g")) p.g = as_num(*v, r.sub("g"));
  const njson* shared = r.get("gamma");
  const njson* gc = r.get("gamma_c");
  const njson* gq = r.get("gamma_qd");
  if (shared && (gc || gq))
    cfg_fail(r.sub("gamma"), "conflicts with gamma_c / gamma_qd");
  if (shared) {
    p.gamma_c = p.gamma_qd = as_num(*shared, r.sub("gamma"));
  } else {
    if (gc) p.gamma_c = as_num(*gc, r.sub("gamma_c"));
    if (gq) p.gamma_qd = as_num(*gq, r.sub("gamma_qd"));
  }
  if (const njson* v = r.get("detuning"))
    p.detuning = as_num(*v, r.sub("detuning"));
  if (const njson* v = r.get("temperature"))
    p.temperature = as_num(*v, r.sub("temperature"));
  r.finish();
}

void parse_grid(Reader& top, GridConfig& g) {
  const njson* node = top.get("grid");
  if (!node) return;
  Reader r(*node, "grid");
  if (const njson* v = r.get("min")) g.lo = as_num(*v, r.sub("min"));
  if (const njson* v = r.get("max")) g.hi = as_num(*v, r.sub("max"));
  if (const njson* v = r.get("points"))
    g.points = as_count(*v, r.sub("points"));
  if (const njson* inset = r.get("inset")) {
    Reader ri(*inset, "grid.inset");
    if (const njson* v = ri.get("enabled"))
      g.inset_enabled = as_bool(*v, ri.sub("enabled"));
    if (const njson* v = ri.get("min")) g.inset_lo = as_num(*v, ri.sub("min"));
    if (const njson* v = ri.get("max")) g.inset_hi = as_num(*v, ri.sub("max"));
    if (const njson* v = ri.get("points"))
      g.inset_points = as_count(*v, ri.sub("points"));
    ri.finish();
  }
  r.finish();
}

void parse_outputs(Reader& top, OutputToggles& o) {
  const njson* node = top.get("outputs");
  if (!node) return;
  Reader r(*node, "outputs");
  if (const njson* v = r.get("absorption"))
    o.absorption = as_bool(*v, r.sub("absorption"));
  if (const njson* v = r.get("emission"))
    o.emission = as_bool(*v, r.sub("emission"));
  if (const njson* v = r.get("polaron"))
    o.polaron = as_bool(*v, r.sub("polaron"));
  if (const njson* v = r.get("resonance_report"))
    o.resonance_report = as_bool(*v, r.sub("resonance_report"));
  if (const njson* v = r.get("oracle_check"))
    o.oracle_check = as_bool(*v, r.sub("oracle_check"));
  if (const njson* v = r.get("correlator"))
    o.correlator = as_bool(*v, r.sub("correlator"));
  r.finish();
}

void parse_numerics(Reader& top, NumericsConfig& n) {
  const njson* node = top.get("numerics");
  if (!node) return;
  Reader r(*node, "numerics");
  if (const njson* v = r.get("bath_dt"))
    n.bath_dt = as_num(*v, r.sub("bath_dt"));
  if (const njson* v = r.get("bath_t_cap"))
    n.bath_t_cap = as_num(*v, r.sub("bath_t_cap"));
  if (const njson* v = r.get("emission_gamma_eff"))
    n.emission_gamma_eff = as_num(*v, r.sub("emission_gamma_eff"));
  if (const njson* v = r.get("polaron_render_gamma"))
    n.polaron_render_gamma = as_num(*v, r.sub("polaron_render_gamma"));
  r.finish();
}

void parse_oracle(Reader& top, OracleParams& o) {
  const njson* node = top.get("oracle");
  if (!node) return;
  Reader r(*node, "oracle");
  if (const njson* v = r.get("probe_count"))
    o.probe_count = as_count(*v, r.sub("probe_count"));
  if (const njson* v = r.get("probe_span"))
    o.probe_span = as_num(*v, r.sub("probe_span"));
  if (const njson* v = r.get("probe_freqs")) {
    if (!v->is_array()) cfg_fail(r.sub("probe_freqs"), "expected an array");
    o.probe_freqs.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      o.probe_freqs.push_back(
          as_num((*v)[i], r.sub("probe_freqs[" + std::to_string(i) + "]")));
  }
  if (const njson* v = r.get("dt")) o.dt = as_num(*v, r.sub("dt"));
  if (const njson* v = r.get("t_max")) o.t_max = as_num(*v, r.sub("t_max"));
  if (const njson* v = r.get("tau_mem"))
    o.tau_mem = as_num(*v, r.sub("tau_mem"));
  if (const njson* v = r.get("t_ramp"))
    o.t_ramp = as_num(*v, r.sub("t_ramp"));
  if (const njson* v = r.get("time_local"))
    o.time_local = as_bool(*v, r.sub("time_local"));
  if (const njson* v = r.get("rate_tol"))
    o.rate_tol = as_num(*v, r.sub("rate_tol"));
  if (const njson* v = r.get("fock_cutoff"))
    o.fock_cutoff = static_cast<int>(as_count(*v, r.sub("fock_cutoff")));
  if (const njson* v = r.get("tolerance"))
    o.tolerance = as_num(*v, r.sub("tolerance"));
  r.finish();
}

void parse_paths(Reader& top, std::string& output_dir) {
  const njson* node = top.get("paths");
  if (!node) return;
  Reader r(*node, "paths");
  if (const njson* v = r.get("output_dir"))
    output_dir = as_str(*v, r.sub("output_dir"));
  r.finish();
}

// ----------------------------------------------------------------------------
// Canonical serialization
// ----------------------------------------------------------------------------

njson opt_num(const std::optional<double>& v) {
  return v ? njson(*v) : njson(nullptr);
}

njson config_json(const ScenarioConfig& c) {
  njson j;
  j["model"] = {{"kind", kind_token(c.model.kind)},
                {"n", c.model.n},
                {"delta", c.model.delta},
                {"omega_b", c.model.omega_b},
                {"linewidth", c.model.linewidth},
                {"cutoff", c.model.cutoff}};
  njson params;
  params["g"] = c.params.g;
  if (c.params.gamma_c == c.params.gamma_qd) {
    params["gamma"] = c.params.gamma_c;
  } else {
    params["gamma_c"] = c.params.gamma_c;
    params["gamma_qd"] = c.params.gamma_qd;
  }
  params["detuning"] = c.params.detuning;
  params["temperature"] = c.params.temperature;
  j["params"] = std::move(params);
  j["grid"] = {{"min", opt_num(c.grid.lo)},
               {"max", opt_num(c.grid.hi)},
               {"points", c.grid.points},
               {"inset",
                {{"enabled", c.grid.inset_enabled
                                 ? njson(*c.grid.inset_enabled)
                                 : njson(nullptr)},
                 {"min", opt_num(c.grid.inset_lo)},
                 {"max", opt_num(c.grid.inset_hi)},
                 {"points", c.grid.inset_points}}}};
  j["outputs"] = {{"absorption", c.outputs.absorption},
                  {"emission", c.outputs.emission},
                  {"polaron", c.outputs.polaron},
                  {"resonance_report", c.outputs.resonance_report},
                  {"oracle_check", c.outputs.oracle_check},
                  {"correlator", c.outputs.correlator}};
  j["numerics"] = {{"bath_dt", c.numerics.bath_dt},
                   {"bath_t_cap", c.numerics.bath_t_cap},
                   {"emission_gamma_eff", c.numerics.emission_gamma_eff},
                   {"polaron_render_gamma",
                    opt_num(c.numerics.polaron_render_gamma)}};
  njson probes = njson(nullptr);
  if (!c.oracle.probe_freqs.empty()) probes = njson(c.oracle.probe_freqs);
  j["oracle"] = {{"probe_count", c.oracle.probe_count},
                 {"probe_span", opt_num(c.oracle.probe_span)},
                 {"probe_freqs", std::move(probes)},
                 {"dt", c.oracle.dt},
                 {"t_max", c.oracle.t_max},
                 {"tau_mem", c.oracle.tau_mem},
                 {"t_ramp", c.oracle.t_ramp},
                 {"time_local", c.oracle.time_local},
                 {"rate_tol", c.oracle.rate_tol},
                 {"fock_cutoff", c.oracle.fock_cutoff},
                 {"tolerance", opt_num(c.oracle.tolerance)}};
  j["paths"] = {{"output_dir", c.output_dir}};
  return j;
}

// ----------------------------------------------------------------------------
// Grid resolution and shared engine plumbing
// ----------------------------------------------------------------------------

spectra::GridSpec resolve_grid(const ScenarioConfig& cfg) {
  auto gs = spectra::default_grid(cfg.model, cfg.params);
  if (cfg.grid.lo) gs.lo = *cfg.grid.lo;
  if (cfg.grid.hi) gs.hi = *cfg.grid.hi;
  gs.points = cfg.grid.points;
  if (cfg.grid.inset_lo) gs.inset_lo = *cfg.grid.inset_lo;
  if (cfg.grid.inset_hi) gs.inset_hi = *cfg.grid.inset_hi;
  gs.inset_points = cfg.grid.inset_points;
  if (cfg.grid.inset_enabled) {
    gs.has_inset = *cfg.grid.inset_enabled;
  } else if (cfg.grid.inset_lo && cfg.grid.inset_hi) {
    gs.has_inset = true;
  }
  if (!(gs.lo < gs.hi))
    throw err::InvalidConfig("config: grid: min must lie below max");
  if (gs.points < 2)
    throw err::InvalidConfig("config: grid: need at least two points");
  if (gs.has_inset && !(gs.inset_lo < gs.inset_hi))
    throw err::InvalidConfig("config: grid.inset: min must lie below max");
  if (gs.has_inset && gs.inset_points < 2)
    throw err::InvalidConfig("config: grid.inset: need at least two points");
  return gs;
}

spectra::Engine make_engine(const ScenarioConfig& cfg,
                            const spectra::SystemParams& params) {
  spectra::Engine::BathOptions opts;
  opts.dt = cfg.numerics.bath_dt;
  opts.t_cap = cfg.numerics.bath_t_cap;
  return spectra::Engine(cfg.model, params, opts);
}

double resolved_polaron_gamma(const ScenarioConfig& cfg, double gamma) {
  if (cfg.numerics.polaron_render_gamma)
    return *cfg.numerics.polaron_render_gamma;
  return gamma > 0.0 ? gamma : 1e-3;
}

// ----------------------------------------------------------------------------
// Artifact writers
// ----------------------------------------------------------------------------

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw err::InvalidConfig("cannot open " + p.string() + " for write");
  f << content;
  f.close();
  if (!f) throw err::InvalidConfig("failed writing " + p.string());
}

std::string csv_header(const ScenarioConfig& cfg, const DerivedScalars& sc,
                       const std::string& title) {
  const auto& m = cfg.model;
  const auto& p = cfg.params;
  std::string out;
  out += "# " + title + "\n";
  out += "# model: kind=" + kind_token(m.kind) + " n=" + num_str(m.n) +
         " delta=" + num_str(m.delta) + " omega_b=" + num_str(m.omega_b) +
         " linewidth=" + num_str(m.linewidth) +
         " cutoff=" + num_str(m.cutoff) + "\n";
  out += "# params: g=" + num_str(p.g) + " gamma_c=" + num_str(p.gamma_c) +
         " gamma_qd=" + num_str(p.gamma_qd) +
         " detuning=" + num_str(p.detuning) +
         " temperature=" + num_str(p.temperature) + "\n";
  out += "# scalars: polaron_shift=" + num_str(sc.bath.delta) +
         " huang_rhys=" +
         (sc.bath.s_divergent ? std::string("DIVERGENT")
                              : num_str(sc.bath.huang_rhys)) +
         " mean_b=" + num_str(sc.bath.mean_b) +
         " g_tilde=" + num_str(sc.g_tilde) + "\n";
  out += "# version: " QDCAV_VERSION "\n";
  return out;
}

std::string spectrum_csv(const spectra::Spectrum& s, const ScenarioConfig& cfg,
                         const DerivedScalars& sc) {
  const std::string kind = spectra::kind_label(s.kind);
  std::string out = csv_header(
      cfg, sc, kind + " spectrum, peak-normalized (raw peak " +
                   strf("%.16e", s.raw_peak) + ")");
  out += "omega,intensity,kind\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i)
    append_row(out, s.grid[i], s.values[i], kind);
  return out;
}

std::string correlator_csv(const bath::BathCorrelation& corr,
                           const ScenarioConfig& cfg,
                           const DerivedScalars& sc) {
  std::string out = csv_header(
      cfg, sc, strf("bath correlator table, dt=%s, samples=%zu",
                    num_str(corr.dt()).c_str(), corr.size()));
  out += "t,re_Q,im_Q,re_Gg,im_Gg,re_Gu,im_Gu\n";
  for (std::size_t i = 0; i < corr.size(); ++i) {
    const auto q = corr.Q_at(i);
    const auto gg = corr.green_g_at(i);
    const auto gu = corr.green_u_at(i);
    out += strf("%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n",
                corr.dt() * static_cast<double>(i), q.real(), q.imag(),
                gg.real(), gg.imag(), gu.real(), gu.imag());
  }
  return out;
}

njson root_json(const resonance::Root& r) {
  return {{"found", r.found},
          {"omega", r.omega},
          {"width", r.width},
          {"slope", r.slope},
          {"strength", r.strength}};
}

njson warnings_json(const err::WarningList& ws) {
  njson arr = njson::array();
  for (const auto& w : ws) arr.push_back({{"code", w.code},
                                          {"detail", w.detail}});
  return arr;
}

njson resonance_json(const resonance::ResonanceReport& rep) {
  return {{"vrs", resonance::vrs_label(rep.vrs)},
          {"splitting", rep.splitting},
          {"splitting_estimate", rep.splitting_estimate},
          {"compound_strength", rep.compound_strength},
          {"compound_estimate", rep.compound_estimate},
          {"multiple_roots", rep.multiple_roots},
          {"plus", root_json(rep.plus)},
          {"minus", root_json(rep.minus)},
          {"warnings", warnings_json(rep.warnings)}};
}

// ----------------------------------------------------------------------------
// Peak extraction for the exact-diagonalization cross-check
// ----------------------------------------------------------------------------

// Local maxima above a floor, refined by the quadratic through the three
// bracketing samples (exact vertex for non-uniform spacing).
std::vector<double> peak_positions(const std::vector<double>& x,
                                   const std::vector<double>& v,
                                   double floor_frac) {
  const double floor =
      floor_frac * *std::max_element(v.begin(), v.end());
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] < floor || v[i] < v[i - 1] || v[i] <= v[i + 1]) continue;
    const double d1 = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
    const double d2 = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
    const double a = (d2 - d1) / (x[i + 1] - x[i - 1]);
    double pos = x[i];
    if (a < 0.0) pos = 0.5 * (x[i - 1] + x[i]) - 0.5 * d1 / a;
    out.push_back(pos);
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k)
    g[k] = lo + (hi - lo) * static_cast<double>(k) /
                    static_cast<double>(n - 1);
  return g;
}

}  // namespace

// ----------------------------------------------------------------------------
// Public API
// ----------------------------------------------------------------------------

std::string version() { return QDCAV_VERSION; }

ScenarioConfig config_from_json(const std::string& text) {
  njson j;
  try {
    j = njson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw err::InvalidConfig(std::string("config: ") + e.what());
  }
  ScenarioConfig cfg;
  Reader top(j, "");
  parse_model(top, cfg.model);
  parse_params(top, cfg.params);
  parse_grid(top, cfg.grid);
  parse_outputs(top, cfg.outputs);
  parse_numerics(top, cfg.numerics);
  parse_oracle(top, cfg.oracle);
  parse_paths(top, cfg.output_dir);
  top.finish();
  return cfg;
}

ScenarioConfig config_from_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw err::InvalidConfig("cannot read config file \"" + path + "\"");
  std::ostringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
  return config_json(cfg).dump(2) + "\n";
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2_ohmic", "fig2_ohmic_t005", "fig2_superohmic", "jc"};
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  if (name == "fig1") {
    // Strongly confined dot in a bulk phonon bath: superohmic n=3, deep
    // polaron regime, finite temperature, lossless cavity on resonance.
    c.model.kind = spectral::Kind::SuperohmicBulk;
    c.model.n = 3.0;
    c.model.delta = 2.0;
    c.model.omega_b = 1.0;
    c.model.linewidth = 2.0;
    c.model.cutoff = 20.0;
    c.params.g = 0.05;
    c.params.gamma_c = c.params.gamma_qd = 0.0;
    c.params.temperature = 0.1;
  } else if (name == "fig2_ohmic" || name == "fig2_ohmic_t005") {
    // Narrow confined resonance with an ohmic low-frequency tail; the
    // dressing weight vanishes, so the refined window is set explicitly.
    c.model.kind = spectral::Kind::ConfinedMode;
    c.model.n = 1.0;
    c.model.delta = 3.0;
    c.model.omega_b = 1.0;
    c.model.linewidth = 0.06;
    c.model.cutoff = 20.0;
    c.params.g = 3e-3;
    c.params.gamma_c = c.params.gamma_qd = 1e-4;
    c.params.temperature = (name == "fig2_ohmic") ? 0.0 : 0.05;
    c.grid.inset_enabled = true;
    c.grid.inset_lo = -0.012;
    c.grid.inset_hi = 0.012;
  } else if (name == "fig2_superohmic") {
    c.model.kind = spectral::Kind::ConfinedMode;
    c.model.n = 3.0;
    c.model.delta = 3.0;
    c.model.omega_b = 1.0;
    c.model.linewidth = 0.06;
    c.model.cutoff = 20.0;
    c.params.g = 3e-3;
    c.params.gamma_c = c.params.gamma_qd = 1e-4;
    c.params.temperature = 0.05;
  } else if (name == "jc") {
    // No phonon coupling: bare polariton doublet sanity scenario.
    c.model.kind = spectral::Kind::None;
    c.model.delta = 0.0;
    c.params.g = 0.05;
    c.params.gamma_c = c.params.gamma_qd = 0.01;
    c.params.temperature = 0.0;
  } else {
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw err::InvalidConfig("unknown preset \"" + name +
                             "\" (available: " + names + ")");
  }
  c.output_dir = "qdcav_" + name;
  return c;
}

DerivedScalars derive_scalars(const ScenarioConfig& cfg) {
  DerivedScalars out;
  out.bath = spectral::bath_scalars(cfg.model, cfg.params.temperature);
  out.g_tilde = cfg.params.g * out.bath.mean_b;
  return out;
}

ValidateReport validate(const ScenarioConfig& cfg) {
  spectral::validate_model(cfg.model);
  if (cfg.params.g < 0.0)
    throw err::InvalidConfig("config: params.g: must be non-negative");
  if (cfg.params.temperature < 0.0)
    throw err::InvalidConfig(
        "config: params.temperature: must be non-negative");

  ValidateReport rep;
  rep.scalars = derive_scalars(cfg);
  const auto& sc = rep.scalars.bath;
  const auto& m = cfg.model;
  const auto& p = cfg.params;

  std::string t;
  t += "model   : " + kind_token(m.kind);
  if (m.kind != spectral::Kind::None)
    t += "  n=" + num_str(m.n) + "  delta=" + num_str(m.delta) +
         "  omega_b=" + num_str(m.omega_b) +
         "  linewidth=" + num_str(m.linewidth) +
         "  cutoff=" + num_str(m.cutoff);
  t += "\n";
  t += "params  : g=" + num_str(p.g);
  if (p.gamma_c == p.gamma_qd) {
    t += "  gamma=" + num_str(p.gamma_c);
  } else {
    t += "  gamma_c=" + num_str(p.gamma_c) +
         "  gamma_qd=" + num_str(p.gamma_qd);
  }
  t += "  detuning=" + num_str(p.detuning) +
       "  temperature=" + num_str(p.temperature) + "\n";
  t += "polaron shift   Delta     = " + num_str(sc.delta) + "\n";
  t += "Huang-Rhys      S(T)      = " +
       (sc.s_divergent ? std::string("DIVERGENT")
                       : num_str(sc.huang_rhys)) +
       "\n";
  t += "dressing        <B>       = " + num_str(sc.mean_b) +
       "   (<B>^2 = " + num_str(sc.mean_b * sc.mean_b) + ")\n";
  t += "renormalized    g~        = " + num_str(rep.scalars.g_tilde) + "\n";
  t += "validity scale  delta_ph  = " + num_str(sc.delta_ph) + "\n";

  if (m.kind == spectral::Kind::None || p.g == 0.0) {
    t += "validity        : not applicable (no phonon-dressed coupling)\n";
  } else {
    const double ratio = p.g / sc.delta_ph;
    t += "validity        : g / delta_ph = " + num_str(ratio);
    if (p.g >= sc.delta_ph) {
      rep.hard_violation = true;
      rep.warnings.push_back(
          {"ValidityViolation",
           "coupling g reaches the phonon scale delta_ph; the "
           "renormalized-coupling treatment does not apply"});
      t += "  -> VIOLATION (g >= delta_ph)\n";
    } else if (ratio > 0.3) {
      rep.warnings.push_back(
          {"ValidityWarning",
           "coupling g exceeds 30% of the phonon scale delta_ph; lineshapes "
           "are approaching the limit of their validity"});
      t += "  -> WARNING (beyond 30% of the phonon scale)\n";
    } else {
      t += "  -> OK\n";
    }
  }
  for (const auto& w : rep.warnings)
    t += w.code + ": " + w.detail + "\n";
  rep.text = std::move(t);
  return rep;
}

OracleReport oracle_check(const ScenarioConfig& cfg) {
  spectral::validate_model(cfg.model);
  OracleReport rep;
  const double gamma = cfg.params.common_gamma();
  std::string csv;
  const DerivedScalars sc = derive_scalars(cfg);

  if (cfg.model.kind == spectral::Kind::DeltaMode) {
    // Exact diagonalization of the single undamped mode on a truncated
    // phonon ladder; agreement is judged on refined peak positions because
    // the two spectra use the same rendering width.
    rep.method = "exact_diagonalization";
    rep.tolerance = cfg.oracle.tolerance ? *cfg.oracle.tolerance : 1e-3;
    auto params = cfg.params;
    if (gamma <= 0.0) {
      params.gamma_c = params.gamma_qd = 1e-3;
      rep.warnings.push_back(
          {"OracleRender",
           "lossless scenario rendered at gamma = 1e-3 for the cross-check"});
    }
    const auto engine = make_engine(cfg, params);
    const auto grid = resolve_grid(cfg).build();
    const auto ref = engine.absorption(grid);

    oracle::DiscreteBath bathspec;
    bathspec.mode_freqs = {cfg.model.omega_b};
    bathspec.couplings = {std::sqrt(cfg.model.delta * cfg.model.omega_b)};
    bathspec.fock_cutoff = cfg.oracle.fock_cutoff;
    const auto exact = oracle::exact_absorption(bathspec, params, grid);

    rep.reference = peak_positions(grid, ref.values, 1e-3);
    rep.check = peak_positions(grid, exact.values, 1e-3);
    if (rep.reference.empty() || rep.reference.size() != rep.check.size()) {
      rep.deviation = std::numeric_limits<double>::infinity();
      rep.passed = false;
      rep.summary = strf(
          "oracle cross-check: exact_diagonalization\n"
          "peak counts differ: %zu reference vs %zu exact -> FAIL\n",
          rep.reference.size(), rep.check.size());
    } else {
      rep.probes = rep.reference;
      double dev = 0.0;
      for (std::size_t i = 0; i < rep.reference.size(); ++i)
        dev = std::max(dev, std::abs(rep.reference[i] - rep.check[i]));
      rep.deviation = dev;
      rep.passed = dev <= rep.tolerance;
      rep.summary = strf(
          "oracle cross-check: exact_diagonalization (fock cutoff %d)\n"
          "matched %zu peak positions, worst offset %.3e "
          "(tolerance %.3e) -> %s\n",
          cfg.oracle.fock_cutoff, rep.reference.size(), rep.deviation,
          rep.tolerance, rep.passed ? "PASS" : "FAIL");
    }
    for (const auto& w : exact.warnings) rep.warnings.push_back(w);

    csv = csv_header(cfg, sc,
                     "oracle cross-check curves: " + rep.method);
    csv += "omega,intensity,kind\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      append_row(csv, grid[i], ref.values[i], "absorption");
    for (std::size_t i = 0; i < grid.size(); ++i)
      append_row(csv, grid[i], exact.values[i], "oracle_exact");
  } else {
    // Delayed-kernel time integration at a handful of probe frequencies;
    // both curves are normalized over the probe set, so the comparison is
    // scale-free pointwise.
    rep.method = "time_domain";
    rep.tolerance = cfg.oracle.tolerance ? *cfg.oracle.tolerance : 2e-2;

    std::vector<double> probes = cfg.oracle.probe_freqs;
    if (probes.empty()) {
      const std::size_t count = std::max<std::size_t>(1, cfg.oracle.probe_count);
      double span = cfg.oracle.probe_span ? *cfg.oracle.probe_span : 0.0;
      if (span <= 0.0) {
        span = 5e-3 * cfg.model.omega_b;
        if (sc.g_tilde > 0.0) span = std::min(span, 0.175 * sc.g_tilde);
      }
      probes = count == 1 ? std::vector<double>{0.0}
                          : linspace(-span, span, count);
    } else {
      std::sort(probes.begin(), probes.end());
      probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    }

    const auto engine = make_engine(cfg, cfg.params);
    const auto ref = engine.absorption(probes);

    oracle::TimeDomainOptions opts;
    opts.dt = cfg.oracle.dt;
    opts.t_max = cfg.oracle.t_max;
    opts.tau_mem = cfg.oracle.tau_mem;
    opts.t_ramp = cfg.oracle.t_ramp;
    opts.time_local = cfg.oracle.time_local;
    opts.rate_tol = cfg.oracle.rate_tol;
    const auto td =
        oracle::time_domain_spectrum(cfg.model, cfg.params, probes, opts);

    rep.probes = probes;
    rep.reference = ref.values;
    rep.check = td.values;
    double dev = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      dev = std::max(dev, std::abs(td.values[i] - ref.values[i]) /
                              std::max(ref.values[i], 1e-12));
    rep.deviation = dev;
    rep.passed = dev <= rep.tolerance;
    rep.summary = strf(
        "oracle cross-check: time_domain (%zu probes in [%g, %g])\n"
        "worst relative deviation %.3e (tolerance %.3e) -> %s\n",
        probes.size(), probes.front(), probes.back(), rep.deviation,
        rep.tolerance, rep.passed ? "PASS" : "FAIL");
    for (const auto& w : td.warnings) rep.warnings.push_back(w);

    csv = csv_header(cfg, sc,
                     "oracle cross-check curves: " + rep.method);
    csv += "omega,intensity,kind\n";
    for (std::size_t i = 0; i < probes.size(); ++i)
      append_row(csv, probes[i], ref.values[i], "absorption");
    for (std::size_t i = 0; i < probes.size(); ++i)
      append_row(csv, probes[i], td.values[i], "oracle_absorption");
  }

  const fs::path dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw err::InvalidConfig("cannot create output directory " +
                             dir.string() + ": " + ec.message());
  const fs::path out = dir / "oracle.csv";
  write_file(out, csv);
  rep.csv_path = out.string();
  return rep;
}

RunReport run(const ScenarioConfig& cfg) {
  spectral::validate_model(cfg.model);
  const double gamma = cfg.params.common_gamma();
  const DerivedScalars sc = derive_scalars(cfg);

  const fs::path dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw err::InvalidConfig("cannot create output directory " +
                             dir.string() + ": " + ec.message());

  const auto engine = make_engine(cfg, cfg.params);
  const auto gs = resolve_grid(cfg);
  const auto grid = gs.build();

  RunReport report;
  report.warnings = engine.validity_warnings();
  njson files = njson::array();

  auto write_spectrum = [&](const spectra::Spectrum& s,
                            const std::string& name) {
    write_file(dir / name, spectrum_csv(s, cfg, sc));
    report.files.push_back(name);
    files.push_back({{"name", name},
                     {"kind", spectra::kind_label(s.kind)},
                     {"rows", s.grid.size()},
                     {"raw_peak", s.raw_peak}});
    for (const auto& w : s.warnings) report.warnings.push_back(w);
  };

  if (cfg.outputs.absorption)
    write_spectrum(engine.absorption(grid), "absorption.csv");

  if (cfg.outputs.emission) {
    if (gamma != 0.0) {
      report.warnings.push_back(
          {"EmissionSkipped",
           "emission lineshapes hold at zero loss only; skipped for this "
           "lossy scenario"});
    } else {
      try {
        write_spectrum(
            engine.emission(grid, cfg.numerics.emission_gamma_eff),
            "emission.csv");
      } catch (const err::UnsupportedParams& e) {
        report.warnings.push_back({"EmissionSkipped", e.what()});
      }
    }
  }

  double render_gamma = 0.0;
  if (cfg.outputs.polaron) {
    render_gamma = resolved_polaron_gamma(cfg, gamma);
    write_spectrum(engine.polaron(grid, render_gamma), "polaron.csv");
  }

  if (cfg.outputs.resonance_report) {
    const auto res = resonance::analyze(engine, gamma);
    write_file(dir / "resonance.json", resonance_json(res).dump(2) + "\n");
    report.files.push_back("resonance.json");
    files.push_back({{"name", "resonance.json"},
                     {"kind", "resonance_report"}});
    for (const auto& w : res.warnings) report.warnings.push_back(w);
  }

  if (cfg.outputs.correlator) {
    const auto& corr = engine.correlator();
    write_file(dir / "correlator.csv", correlator_csv(corr, cfg, sc));
    report.files.push_back("correlator.csv");
    files.push_back({{"name", "correlator.csv"},
                     {"kind", "correlator"},
                     {"rows", corr.size()}});
  }

  bool have_oracle = false;
  OracleReport orep;
  if (cfg.outputs.oracle_check) {
    orep = oracle_check(cfg);
    have_oracle = true;
    report.files.push_back("oracle.csv");
    files.push_back({{"name", "oracle.csv"}, {"kind", "oracle_check"}});
    for (const auto& w : orep.warnings) report.warnings.push_back(w);
  }

  njson manifest;
  manifest["version"] = QDCAV_VERSION;
  manifest["config"] = config_json(cfg);
  njson resolved;
  resolved["gamma"] = gamma;
  resolved["grid"] = {{"min", gs.lo},
                      {"max", gs.hi},
                      {"points", gs.points},
                      {"inset_enabled", gs.has_inset},
                      {"inset_min", gs.inset_lo},
                      {"inset_max", gs.inset_hi},
                      {"inset_points", gs.inset_points},
                      {"samples", grid.size()}};
  resolved["bath_dt"] = cfg.numerics.bath_dt;
  resolved["bath_t_cap"] = cfg.numerics.bath_t_cap;
  resolved["emission_gamma_eff"] = cfg.numerics.emission_gamma_eff;
  if (cfg.outputs.polaron) resolved["polaron_render_gamma"] = render_gamma;
  manifest["resolved"] = std::move(resolved);
  manifest["scalars"] = {
      {"polaron_shift", sc.bath.delta},
      {"huang_rhys",
       sc.bath.s_divergent ? njson(nullptr) : njson(sc.bath.huang_rhys)},
      {"s_divergent", sc.bath.s_divergent},
      {"mean_b", sc.bath.mean_b},
      {"g_tilde", sc.g_tilde},
      {"delta_ph", sc.bath.delta_ph}};
  manifest["engine_fingerprint"] = engine.fingerprint();
  manifest["tolerances"] = {
      {"resonance_root_residual", 1e-10},
      {"correlator_decay_threshold", 1e-8},
      {"oracle",
       have_oracle ? njson(orep.tolerance) : njson(nullptr)}};
  manifest["files"] = std::move(files);
  manifest["warnings"] = warnings_json(report.warnings);
  if (have_oracle)
    manifest["oracle"] = {{"method", orep.method},
                          {"deviation", orep.deviation},
                          {"tolerance", orep.tolerance},
                          {"passed", orep.passed}};

  report.manifest_json = manifest.dump(2) + "\n";
  const fs::path mpath = dir / "manifest.json";
  write_file(mpath, report.manifest_json);
  report.files.push_back("manifest.json");
  report.manifest_path = mpath.string();

  report.summary =
      strf("wrote %zu files to %s:\n", report.files.size(), dir.c_str());
  for (const auto& f : report.files) report.summary += "  " + f + "\n";
  for (const auto& w : report.warnings)
    report.summary += "warning " + w.code + ": " + w.detail + "\n";
  if (have_oracle) report.summary += orep.summary;

  if (have_oracle && !orep.passed)
    throw err::NumericsFailure(
        "oracle cross-check exceeded its tolerance: " + orep.summary);
  return report;
}

}  // namespace qdcav::scenario
