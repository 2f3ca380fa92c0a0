/* ambit -- chart-based verification engine for 4-dimensional ambikähler
 * geometries carrying *-Killing 2-forms.
 *
 * C interface to the shared library. Engines are opaque handles created
 * from a JSON run configuration (see ambit_config_schema()); every call
 * reports failure through a status code, with details available from
 * ambit_last_error(). Status codes double as the CLI exit codes.
 */

#ifndef AMBIT_H
#define AMBIT_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AMBIT_API __declspec(dllexport)
#else
#define AMBIT_API __attribute__((visibility("default")))
#endif

typedef enum ambit_status {
    AMBIT_OK = 0,
    AMBIT_SUITE_FAILURE = 1,  /* a residual exceeded its tolerance */
    AMBIT_CONFIG_ERROR = 2,   /* malformed or inconsistent configuration */
    AMBIT_DOMAIN_ERROR = 3,   /* a point left the chart domain */
    AMBIT_NUMERIC_ERROR = 4,  /* conditioning / quadrature breakdown */
    AMBIT_INVALID_ARGUMENT = 5
} ambit_status;

typedef struct ambit_engine ambit_engine;

AMBIT_API const char* ambit_version(void);

/* The published JSON configuration schema (static storage). */
AMBIT_API const char* ambit_config_schema(void);

/* Thread-local description of the most recent failure. */
AMBIT_API const char* ambit_last_error(void);

/* NULL on failure; consult ambit_last_error(). */
AMBIT_API ambit_engine* ambit_engine_create(const char* config_json);
AMBIT_API void ambit_engine_destroy(ambit_engine* engine);

/* Runs the configured suites, or the comma-separated subset in suites_csv
 * (NULL = configured/default list). AMBIT_OK when everything passed. */
AMBIT_API ambit_status ambit_engine_run(ambit_engine* engine,
                                        const char* suites_csv);

/* JSON report of the last run. Owned by the engine; valid until the next
 * run or destroy. NULL before the first run. */
AMBIT_API const char* ambit_engine_report(const ambit_engine* engine);

/* CSV dump of the named fields (comma-separated) over an nx-by-ny grid in
 * the first two chart coordinates. *out receives a malloc'd buffer to be
 * released with ambit_free. */
AMBIT_API ambit_status ambit_engine_dump(ambit_engine* engine,
                                         const char* fields_csv, int nx,
                                         int ny, char** out);

AMBIT_API void ambit_free(char* buffer);

#ifdef __cplusplus
}
#endif

#endif /* AMBIT_H */
