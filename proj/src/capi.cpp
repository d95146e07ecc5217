// capi.cpp — C ABI wrapper translating exceptions into status codes.
#include "qdcav/qdcav.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "internal/errors.hpp"
#include "internal/scenario.hpp"

using namespace qdcav;

struct qdcav_scenario {
  scenario::ScenarioConfig cfg;
};

namespace {

thread_local std::string t_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** slot, const std::string& s) {
  if (slot) *slot = dup_string(s);
}

// Runs the body and folds the exception taxonomy onto the status enum.
template <typename F>
qdcav_status guarded(F&& body) {
  t_last_error.clear();
  try {
    return body();
  } catch (const err::ValidityError& e) {
    t_last_error = e.what();
    return QDCAV_ERR_VALIDITY;
  } catch (const err::InvalidConfig& e) {
    t_last_error = e.what();
    return QDCAV_ERR_CONFIG;
  } catch (const err::UnsupportedParams& e) {
    t_last_error = e.what();
    return QDCAV_ERR_CONFIG;
  } catch (const err::DimensionOverflow& e) {
    t_last_error = e.what();
    return QDCAV_ERR_CONFIG;
  } catch (const err::NumericsFailure& e) {
    t_last_error = e.what();
    return QDCAV_ERR_NUMERICS;
  } catch (const err::NonConvergence& e) {
    t_last_error = e.what();
    return QDCAV_ERR_NUMERICS;
  } catch (const err::RangeError& e) {
    t_last_error = e.what();
    return QDCAV_ERR_NUMERICS;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return QDCAV_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown failure";
    return QDCAV_ERR_INTERNAL;
  }
}

[[noreturn]] void require_fail(const char* what) {
  throw err::InvalidConfig(std::string("api: ") + what);
}

}  // namespace

extern "C" {

const char* qdcav_version(void) {
  static const std::string v = scenario::version();
  return v.c_str();
}

const char* qdcav_status_name(qdcav_status status) {
  switch (status) {
    case QDCAV_OK: return "ok";
    case QDCAV_ERR_INTERNAL: return "internal error";
    case QDCAV_ERR_CONFIG: return "config error";
    case QDCAV_ERR_NUMERICS: return "numerical failure";
    case QDCAV_ERR_VALIDITY: return "validity violation";
  }
  return "unknown status";
}

const char* qdcav_last_error(void) { return t_last_error.c_str(); }

qdcav_status qdcav_scenario_from_json(const char* json_text,
                                      qdcav_scenario** out) {
  return guarded([&]() -> qdcav_status {
    if (!json_text || !out) require_fail("null argument");
    auto handle = std::make_unique<qdcav_scenario>();
    handle->cfg = scenario::config_from_json(json_text);
    *out = handle.release();
    return QDCAV_OK;
  });
}

qdcav_status qdcav_scenario_from_file(const char* path,
                                      qdcav_scenario** out) {
  return guarded([&]() -> qdcav_status {
    if (!path || !out) require_fail("null argument");
    auto handle = std::make_unique<qdcav_scenario>();
    handle->cfg = scenario::config_from_file(path);
    *out = handle.release();
    return QDCAV_OK;
  });
}

qdcav_status qdcav_scenario_from_preset(const char* name,
                                        qdcav_scenario** out) {
  return guarded([&]() -> qdcav_status {
    if (!name || !out) require_fail("null argument");
    auto handle = std::make_unique<qdcav_scenario>();
    handle->cfg = scenario::preset(name);
    *out = handle.release();
    return QDCAV_OK;
  });
}

void qdcav_scenario_free(qdcav_scenario* handle) { delete handle; }

qdcav_status qdcav_scenario_to_json(const qdcav_scenario* handle,
                                    char** out_text) {
  return guarded([&]() -> qdcav_status {
    if (!handle || !out_text) require_fail("null argument");
    *out_text = dup_string(scenario::config_to_json(handle->cfg));
    return QDCAV_OK;
  });
}

qdcav_status qdcav_scenario_set_output_dir(qdcav_scenario* handle,
                                           const char* dir) {
  return guarded([&]() -> qdcav_status {
    if (!handle || !dir) require_fail("null argument");
    handle->cfg.output_dir = dir;
    return QDCAV_OK;
  });
}

qdcav_status qdcav_scenario_scalars(const qdcav_scenario* handle,
                                    qdcav_scalars* out) {
  return guarded([&]() -> qdcav_status {
    if (!handle || !out) require_fail("null argument");
    const auto sc = scenario::derive_scalars(handle->cfg);
    out->polaron_shift = sc.bath.delta;
    out->huang_rhys = sc.bath.huang_rhys;
    out->s_divergent = sc.bath.s_divergent ? 1 : 0;
    out->mean_b = sc.bath.mean_b;
    out->g_tilde = sc.g_tilde;
    out->delta_ph = sc.bath.delta_ph;
    return QDCAV_OK;
  });
}

qdcav_status qdcav_scenario_validate(const qdcav_scenario* handle,
                                     int* out_hard_violation,
                                     char** out_text) {
  return guarded([&]() -> qdcav_status {
    if (!handle) require_fail("null argument");
    const auto rep = scenario::validate(handle->cfg);
    if (out_hard_violation) *out_hard_violation = rep.hard_violation ? 1 : 0;
    put_string(out_text, rep.text);
    return QDCAV_OK;
  });
}

qdcav_status qdcav_scenario_run(const qdcav_scenario* handle,
                                char** out_summary,
                                char** out_manifest_json) {
  return guarded([&]() -> qdcav_status {
    if (!handle) require_fail("null argument");
    const auto rep = scenario::run(handle->cfg);
    put_string(out_summary, rep.summary);
    put_string(out_manifest_json, rep.manifest_json);
    return QDCAV_OK;
  });
}

qdcav_status qdcav_scenario_oracle(const qdcav_scenario* handle,
                                   char** out_summary) {
  return guarded([&]() -> qdcav_status {
    if (!handle) require_fail("null argument");
    const auto rep = scenario::oracle_check(handle->cfg);
    put_string(out_summary, rep.summary);
    if (!rep.passed) {
      t_last_error = "oracle cross-check exceeded its tolerance";
      return QDCAV_ERR_NUMERICS;
    }
    return QDCAV_OK;
  });
}

qdcav_status qdcav_preset_names(char** out_text) {
  return guarded([&]() -> qdcav_status {
    if (!out_text) require_fail("null argument");
    std::string joined;
    for (const auto& name : scenario::preset_names()) joined += name + "\n";
    *out_text = dup_string(joined);
    return QDCAV_OK;
  });
}

void qdcav_string_free(char* text) { std::free(text); }

}  // extern "C"
