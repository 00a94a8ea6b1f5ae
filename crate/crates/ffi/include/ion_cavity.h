#ifndef ION_CAVITY_H
#define ION_CAVITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum IcStatus {
  IC_STATUS_OK = 0,
  IC_STATUS_INVALID_ARGUMENT = 1,
  IC_STATUS_PARSE = 2,
  IC_STATUS_VALIDATION = 3,
  IC_STATUS_NUMERICAL = 4,
  IC_STATUS_IO = 5,
  IC_STATUS_NULL_POINTER = 6,
  IC_STATUS_PANIC = 7,
} IcStatus;

/**
 * Propagation model selector.
 */
typedef enum IcModel {
  IC_MODEL_EFFECTIVE = 0,
  IC_MODEL_FULL = 1,
  IC_MODEL_LAB = 2,
} IcModel;

/**
 * Validated run configuration.
 */
typedef struct IcConfig IcConfig;

/**
 * Result of a truth-table run.
 */
typedef struct IcReport IcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The
 * pointer stays valid until the next library call on the same thread.
 */
const char *ic_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ic_version(void);

/**
 * Parse a JSON run configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IcStatus ic_config_from_json(const char *json, struct IcConfig **out);

/**
 * Built-in default parameters with the given cutoffs and model.
 *
 * # Safety
 * `out` must be writable.
 */
enum IcStatus ic_config_default(size_t vib_cutoff,
                                size_t cav_cutoff,
                                enum IcModel model,
                                struct IcConfig **out);

/**
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void ic_config_free(struct IcConfig *config);

/**
 * Run the CNOT schedule on the four logical inputs.
 *
 * # Safety
 * `config` must be a live handle; `out` must be writable.
 */
enum IcStatus ic_truth_table(const struct IcConfig *config, struct IcReport **out);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void ic_report_free(struct IcReport *report);

/**
 * Logical matrix as 32 doubles, row-major, interleaved `re, im`.
 *
 * # Safety
 * `report` must be live; `out` must hold 32 doubles.
 */
enum IcStatus ic_report_logical_matrix(const struct IcReport *report, double *out);

/**
 * Leakage out of the logical subspace for each of the four inputs.
 *
 * # Safety
 * `report` must be live; `out` must hold 4 doubles.
 */
enum IcStatus ic_report_leakage(const struct IcReport *report, double *out);

/**
 * Raw, phase-fitted and local-equivalence fidelities. Any output pointer
 * may be NULL.
 *
 * # Safety
 * `report` must be live; non-null outputs must be writable.
 */
enum IcStatus ic_report_fidelities(const struct IcReport *report,
                                   double *raw,
                                   double *phase_fitted,
                                   double *local_equiv);

/**
 * Makhlin invariants `G1 = g1_re + i g1_im` and `G2`.
 *
 * # Safety
 * `report` must be live; outputs must be writable.
 */
enum IcStatus ic_report_makhlin(const struct IcReport *report,
                                double *g1_re,
                                double *g1_im,
                                double *g2);

/**
 * Report as JSON; release the string with [`ic_string_free`].
 *
 * # Safety
 * `report` must be live; `out` must be writable.
 */
enum IcStatus ic_report_to_json(const struct IcReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ic_string_free(char *s);

/**
 * `‖sin(ηX) − ηX‖` and its bound `max|ηλ|³/6` at the given cutoff.
 *
 * # Safety
 * Outputs must be writable.
 */
enum IcStatus ic_lamb_dicke_check(double eta, size_t cutoff, double *error_norm, double *bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ION_CAVITY_H */
