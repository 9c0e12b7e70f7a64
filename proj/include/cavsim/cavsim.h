#ifndef CAVSIM_CAVSIM_H
#define CAVSIM_CAVSIM_H

/* C interface to the cavsim library. All handles are opaque; every call that can
 * fail returns a cavsim_status and leaves a message in cavsim_last_error() (per thread).
 * Strings are copied out through (buf, len, needed): the text is truncated to len - 1
 * bytes and NUL-terminated, and *needed receives the full length without the NUL. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cavsim_status {
  CAVSIM_OK = 0,
  CAVSIM_E_INVALID_ARGUMENT = 1,
  CAVSIM_E_PARSE = 2,
  CAVSIM_E_UNKNOWN_KEY = 3,
  CAVSIM_E_CONSTRAINT = 4,
  CAVSIM_E_DOMAIN = 5,
  CAVSIM_E_UNDERFLOW = 6,
  CAVSIM_E_STIFFNESS = 7,
  CAVSIM_E_INPUT = 8,
  CAVSIM_E_CALIBRATION = 9,
  CAVSIM_E_FIT = 10,
  CAVSIM_E_NO_OSCILLATION = 11,
  CAVSIM_E_IO = 12,
  CAVSIM_E_INTERNAL = 13
} cavsim_status;

typedef struct cavsim_config cavsim_config;
typedef struct cavsim_result cavsim_result;

const char* cavsim_version(void);
const char* cavsim_status_name(cavsim_status status);
/* Message of the most recent failed call on this thread; "" when none. */
const char* cavsim_last_error(void);

/* Configuration documents. */
cavsim_status cavsim_config_new(cavsim_config** out);
cavsim_status cavsim_config_parse(const char* text, cavsim_config** out);
cavsim_status cavsim_config_load(const char* path, cavsim_config** out);
cavsim_status cavsim_config_clone(const cavsim_config* cfg, cavsim_config** out);
/* "section.key", value as it would appear in a document. Not validated until a run. */
cavsim_status cavsim_config_set(cavsim_config* cfg, const char* key, const char* value);
cavsim_status cavsim_config_get(const cavsim_config* cfg, const char* key, char* buf, size_t len,
                                size_t* needed);
cavsim_status cavsim_config_validate(const cavsim_config* cfg);
cavsim_status cavsim_config_serialize(const cavsim_config* cfg, char* buf, size_t len,
                                      size_t* needed);
size_t cavsim_config_key_count(void);
const char* cavsim_config_key(size_t index);
void cavsim_config_free(cavsim_config* cfg);

/* Operations. `operation` is one of: adiabatic, particles, fixed-points, sweep-asymmetry,
 * power-step, squeezing, freq-vs-depth, calibrate-losses, compare. */
size_t cavsim_operation_count(void);
const char* cavsim_operation_name(size_t index);
cavsim_status cavsim_run(const cavsim_config* cfg, const char* operation, cavsim_result** out);

/* One-line summary: space-separated key=value pairs. */
cavsim_status cavsim_result_summary(const cavsim_result* res, char* buf, size_t len,
                                    size_t* needed);
cavsim_status cavsim_result_get_string(const cavsim_result* res, const char* key, char* buf,
                                       size_t len, size_t* needed);
cavsim_status cavsim_result_get_number(const cavsim_result* res, const char* key, double* value);

/* Time trace (adiabatic, particles, squeezing, compare). Columns follow the trace CSV header. */
int cavsim_result_has_trace(const cavsim_result* res);
size_t cavsim_result_trace_length(const cavsim_result* res);
cavsim_status cavsim_result_trace_column(const cavsim_result* res, const char* column,
                                         double* values, size_t capacity);
cavsim_status cavsim_result_write_trace(const cavsim_result* res, const char* path);

/* Summary table (sweeps, fixed points, calibration, comparison). */
int cavsim_result_has_table(const cavsim_result* res);
size_t cavsim_result_table_rows(const cavsim_result* res);
cavsim_status cavsim_result_write_table(const cavsim_result* res, const char* path);

/* Per-row traces of sweeps, in table row order. */
size_t cavsim_result_row_trace_count(const cavsim_result* res);
cavsim_status cavsim_result_write_row_trace(const cavsim_result* res, size_t row, const char* path);

void cavsim_result_free(cavsim_result* res);

#ifdef __cplusplus
}
#endif

#endif
