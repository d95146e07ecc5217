/* qdcav.h — C API: scenario configs, validation, runs and oracle checks. */
#ifndef QDCAV_QDCAV_H
#define QDCAV_QDCAV_H

#if defined(__GNUC__) || defined(__clang__)
#define QDCAV_API __attribute__((visibility("default")))
#else
#define QDCAV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes in the CLI. */
typedef enum qdcav_status {
  QDCAV_OK = 0,
  QDCAV_ERR_INTERNAL = 1, /* unexpected failure                         */
  QDCAV_ERR_CONFIG = 2,   /* malformed or unsupported configuration     */
  QDCAV_ERR_NUMERICS = 3, /* numerical failure or failed cross-check    */
  QDCAV_ERR_VALIDITY = 4  /* hard violation of a validity condition     */
} qdcav_status;

/* Opaque handle holding one parsed scenario configuration. */
typedef struct qdcav_scenario qdcav_scenario;

/* Scalars derived from the phonon model at the configured temperature. */
typedef struct qdcav_scalars {
  double polaron_shift; /* realized integral of J(w)/w                  */
  double huang_rhys;    /* S(T); meaningless when s_divergent != 0      */
  int s_divergent;      /* nonzero when S diverges (ohmic-like models)  */
  double mean_b;        /* <B> = exp(-S/2), 0 when S diverges           */
  double g_tilde;       /* renormalized coupling g <B>                  */
  double delta_ph;      /* phonon scale entering the validity condition */
} qdcav_scalars;

/* Library version string; static storage, do not free. */
QDCAV_API const char* qdcav_version(void);

/* Human-readable name of a status code; static storage, do not free. */
QDCAV_API const char* qdcav_status_name(qdcav_status status);

/* Message of the last failure on this thread; empty when the last call
 * succeeded.  Valid until the next qdcav_* call on the thread. */
QDCAV_API const char* qdcav_last_error(void);

/* Constructors: parse a config document, read one from a file, or load a
 * compiled-in preset.  On success *out owns the scenario and must be freed
 * with qdcav_scenario_free. */
QDCAV_API qdcav_status qdcav_scenario_from_json(const char* json_text,
                                                qdcav_scenario** out);
QDCAV_API qdcav_status qdcav_scenario_from_file(const char* path,
                                                qdcav_scenario** out);
QDCAV_API qdcav_status qdcav_scenario_from_preset(const char* name,
                                                  qdcav_scenario** out);
QDCAV_API void qdcav_scenario_free(qdcav_scenario* scenario);

/* Canonical JSON serialization of the scenario; *out_text is malloc-owned,
 * release with qdcav_string_free. */
QDCAV_API qdcav_status qdcav_scenario_to_json(const qdcav_scenario* scenario,
                                              char** out_text);

/* Redirect the artifacts of later run/oracle calls. */
QDCAV_API qdcav_status qdcav_scenario_set_output_dir(qdcav_scenario* scenario,
                                                     const char* dir);

/* Derived scalars without running any spectra. */
QDCAV_API qdcav_status qdcav_scenario_scalars(const qdcav_scenario* scenario,
                                              qdcav_scalars* out);

/* Diagnostics only: printable report of derived scalars and validity
 * warnings.  *out_hard_violation (optional) is set nonzero when the coupling
 * reaches the phonon scale; the call itself still succeeds. */
QDCAV_API qdcav_status qdcav_scenario_validate(const qdcav_scenario* scenario,
                                               int* out_hard_violation,
                                               char** out_text);

/* Run the pipeline and write the configured artifacts plus a manifest into
 * the output directory.  Optional out params receive a printable summary and
 * the manifest document (qdcav_string_free both). */
QDCAV_API qdcav_status qdcav_scenario_run(const qdcav_scenario* scenario,
                                          char** out_summary,
                                          char** out_manifest_json);

/* Cross-check the lineshape against an independent oracle and write the
 * side-by-side curves.  Returns QDCAV_ERR_NUMERICS when the check exceeds
 * its tolerance; *out_summary (optional) is filled either way. */
QDCAV_API qdcav_status qdcav_scenario_oracle(const qdcav_scenario* scenario,
                                             char** out_summary);

/* Newline-separated list of preset names; qdcav_string_free the result. */
QDCAV_API qdcav_status qdcav_preset_names(char** out_text);

/* Release a string returned through a char** out parameter. */
QDCAV_API void qdcav_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QDCAV_QDCAV_H */
