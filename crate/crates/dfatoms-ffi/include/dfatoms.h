#ifndef DFATOMS_H
#define DFATOMS_H

/* Generated by cbindgen from dfatoms-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success (converged run).
 */
#define DF_OK 0

/**
 * I/O failure.
 */
#define DF_IO_ERROR 1

/**
 * The solver ran but did not converge; the report is still available.
 */
#define DF_NOT_CONVERGED 2

/**
 * The configuration document was rejected.
 */
#define DF_INVALID_CONFIG 3

/**
 * Solver, domain or numerical failure.
 */
#define DF_SOLVER_ERROR 4

/**
 * A required pointer argument was null.
 */
#define DF_NULL_POINTER 5

/**
 * A string argument was not valid UTF-8.
 */
#define DF_INVALID_UTF8 6

/**
 * The requested report entry does not exist or is not a number.
 */
#define DF_NOT_FOUND 7

/**
 * A panic was caught at the boundary.
 */
#define DF_INTERNAL_ERROR 8

/**
 * Opaque run report.
 */
typedef struct DfReport DfReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Runs a configuration document. `mode` may be null to use the document's
 * own `mode`. On return `*out` holds a report handle whenever a report was
 * produced (also for non-converged and rejected runs); release it with
 * `df_report_free`.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string, `mode` null or a
 * NUL-terminated string, and `out` a valid pointer.
 */
int df_run(const char *config_json, const char *mode, struct DfReport **out);

/**
 * Status of the run the report describes (one of the `DF_*` codes).
 *
 * # Safety
 * `report` must be null or a handle from `df_run`.
 */
int df_report_status(const struct DfReport *report);

/**
 * The report document as JSON, valid until the handle is freed. Null for a
 * null handle.
 *
 * # Safety
 * `report` must be null or a handle from `df_run`.
 */
const char *df_report_json(const struct DfReport *report);

/**
 * Reads a number from the report by JSON pointer, for example
 * `/results/energy/shifted`.
 *
 * # Safety
 * `report` must be a handle from `df_run`, `pointer` a NUL-terminated
 * string and `value` a valid pointer.
 */
int df_report_number(const struct DfReport *report, const char *pointer, double *value);

/**
 * Releases a report handle. Null is accepted.
 *
 * # Safety
 * `report` must be null or a handle from `df_run` not yet freed.
 */
void df_report_free(struct DfReport *report);

/**
 * Closed-form Dirac-Coulomb level `E - c²` for charge `z`, channel `kappa`
 * and principal number `n`.
 *
 * # Safety
 * `value` must be a valid pointer.
 */
int df_oracle_sommerfeld(double z, int kappa, int n, double c, double *value);

/**
 * Message describing the last failure on this thread; empty if the last
 * call succeeded. Valid until the next call on the same thread.
 */
const char *df_last_error_message(void);

/**
 * Library version string.
 */
const char *df_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DFATOMS_H */
