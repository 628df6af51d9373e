/* C interface to the fracop library. All functions return a status code;
 * on failure fracop_last_error() describes the cause on the calling thread. */
#ifndef FRACOP_H
#define FRACOP_H

#include <stddef.h>

#if defined(FRACOP_BUILDING)
#define FRACOP_API __attribute__((visibility("default")))
#else
#define FRACOP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  FRACOP_OK = 0,
  FRACOP_ERR_PARAM = 1,       /* invalid parameters or configuration */
  FRACOP_ERR_DOMAIN = 2,      /* input outside the operation's domain */
  FRACOP_ERR_NUMERIC = 3,     /* non-finite values, failed refinement study */
  FRACOP_ERR_CONVERGENCE = 4, /* iteration diverged or did not converge */
  FRACOP_ERR_IO = 5,          /* file could not be read or written */
  FRACOP_ERR_INTERNAL = 6
} fracop_status;

typedef struct fracop_field fracop_field;

FRACOP_API const char* fracop_version(void);
FRACOP_API const char* fracop_last_error(void);
/* Caps worker threads; 0 restores the hardware default. */
FRACOP_API void fracop_set_threads(int threads);

/* values may be NULL (zero field); otherwise it holds points^n doubles. */
FRACOP_API fracop_status fracop_field_create(int n, double extent, size_t points, const double* values,
                                             fracop_field** out);
FRACOP_API fracop_status fracop_field_read(const char* path, fracop_field** out);
FRACOP_API fracop_status fracop_field_write(const fracop_field* f, const char* path);
FRACOP_API fracop_status fracop_field_write_csv(const fracop_field* f, const char* path);
FRACOP_API fracop_status fracop_field_info(const fracop_field* f, int* n, double* extent, size_t* points);
FRACOP_API const double* fracop_field_values(const fracop_field* f);
FRACOP_API size_t fracop_field_size(const fracop_field* f);
FRACOP_API void fracop_field_free(fracop_field* f);

/* Validates a kernel specification such as "checkerboard:1,2". */
FRACOP_API fracop_status fracop_kernel_check(const char* spec);

/* JSON-configured operations. Strings returned through char** are owned by
 * the caller and released with fracop_string_free; *pass receives 1 when the
 * verdict passed and 0 otherwise. */
FRACOP_API fracop_status fracop_apply_op(const char* config_json, const fracop_field* f, fracop_field** out,
                                         char** report_json);
FRACOP_API fracop_status fracop_eval_kernel(const char* config_json, char** report_json, char** csv);
FRACOP_API fracop_status fracop_verify(const char* check, const char* config_json, char** verdict_json, char** csv,
                                       int* pass);
FRACOP_API fracop_status fracop_quad_selftest(const char* config_json, char** report_json, char** csv, int* pass);
/* rhs may be NULL for the manufactured problem. */
FRACOP_API fracop_status fracop_solve(const char* config_json, const fracop_field* rhs, fracop_field** u,
                                      char** report_json, char** csv, int* pass);
FRACOP_API fracop_status fracop_seminorm(const char* config_json, const fracop_field* f, double* value,
                                         char** report_json);
FRACOP_API void fracop_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
