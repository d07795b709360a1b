/* C interface to the path-space library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns a ps_status; on failure ps_last_error() gives
 * a message for the calling thread, valid until that thread's next call.
 * Strings returned by accessor functions belong to the handle.
 */
#ifndef PATHSPACE_H
#define PATHSPACE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PS_API __declspec(dllexport)
#else
#define PS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ps_status {
  PS_OK = 0,
  PS_ERR_INVALID_ARGUMENT = 1,
  PS_ERR_CONSTRAINT = 2,     /* point off the manifold or retraction failure */
  PS_ERR_NOT_TANGENT = 3,
  PS_ERR_NUMERICAL = 4,      /* singular Jacobian, non-finite value */
  PS_ERR_DIVERGENCE = 5,     /* resampled path left its base path */
  PS_ERR_UNKNOWN_CHECK = 6,
  PS_ERR_IO = 7,
  PS_ERR_CONFIG = 8,
  PS_ERR_INTERNAL = 99
} ps_status;

typedef struct ps_config ps_config;
typedef struct ps_report ps_report;
typedef struct ps_path ps_path;

typedef struct ps_assertion {
  const char* name;
  double target;
  double estimate;
  double se;
  double z;
  double tol;
  int pass;
} ps_assertion;

PS_API const char* ps_last_error(void);
PS_API const char* ps_version(void);

/* Configuration: same keys as the key = value config file. */
PS_API ps_status ps_config_create(ps_config** out);
PS_API void ps_config_destroy(ps_config* cfg);
PS_API ps_status ps_config_set(ps_config* cfg, const char* key, const char* value);
PS_API ps_status ps_config_load_file(ps_config* cfg, const char* path);
/* Applies PATHSPACE_SEED when set. */
PS_API ps_status ps_config_apply_env(ps_config* cfg);
PS_API ps_status ps_config_validate(const ps_config* cfg);
PS_API uint64_t ps_config_seed(const ps_config* cfg);
PS_API const char* ps_config_out_dir(const ps_config* cfg);
PS_API const char* ps_config_format(const ps_config* cfg);
PS_API int ps_config_levels(const ps_config* cfg);
/* "sphere", "group", or "" when unset; 0 steps/paths means per-check default. */
PS_API const char* ps_config_model(const ps_config* cfg);
PS_API int ps_config_steps(const ps_config* cfg);
PS_API int ps_config_paths(const ps_config* cfg);
PS_API double ps_config_horizon(const ps_config* cfg);

/* Check catalog. */
PS_API size_t ps_check_count(void);
PS_API const char* ps_check_id(size_t index);
PS_API size_t ps_sweep_count(void);
PS_API const char* ps_sweep_id(size_t index);

PS_API ps_status ps_run_check(const ps_config* cfg, const char* check_id, ps_report** out);
PS_API ps_status ps_run_sweep(const ps_config* cfg, const char* check_id, int levels, ps_report** out);
/* Parses a report previously written by ps_report_emit. */
PS_API ps_status ps_report_load(const char* json_path, ps_report** out);
PS_API void ps_report_destroy(ps_report* report);

PS_API const char* ps_report_check_id(const ps_report* report);
PS_API int ps_report_verdict(const ps_report* report); /* 1 pass, 0 fail */
PS_API int ps_report_trivial(const ps_report* report);
PS_API double ps_report_wall_ms(const ps_report* report);
PS_API size_t ps_report_assertion_count(const ps_report* report);
PS_API ps_status ps_report_assertion(const ps_report* report, size_t index, ps_assertion* out);
PS_API size_t ps_report_note_count(const ps_report* report);
PS_API const char* ps_report_note(const ps_report* report, size_t index);
/* Writes <dir>/<check_id>.json and <dir>/<check_id>.csv. */
PS_API ps_status ps_report_emit(const ps_report* report, const char* dir);
/* Summary row (format "json" or "csv") and the csv header; owned by the handle. */
PS_API const char* ps_report_summary(ps_report* report, const char* format);
PS_API const char* ps_summary_header(const char* format);

/* Sample paths: model "sphere" or "group", driver from (seed, index). */
PS_API ps_status ps_path_simulate(const char* model, double horizon, int steps, uint64_t seed, uint64_t index,
                                  ps_path** out);
PS_API void ps_path_destroy(ps_path* path);
PS_API int ps_path_steps(const ps_path* path);
PS_API int ps_path_ambient_dim(const ps_path* path);
PS_API int ps_path_noise_dim(const ps_path* path);
/* Copies x_k (ambient coordinates) into out[0..ambient_dim). */
PS_API ps_status ps_path_point(const ps_path* path, int k, double* out, size_t len);
/* Copies dB_k into out[0..noise_dim). */
PS_API ps_status ps_path_increment(const ps_path* path, int k, double* out, size_t len);
PS_API double ps_path_time(const ps_path* path, int k);

#ifdef __cplusplus
}
#endif

#endif /* PATHSPACE_H */
