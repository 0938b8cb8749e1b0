#ifndef FRANKWOLFE_H
#define FRANKWOLFE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit codes.
 */
typedef enum FwStatus {
  FwStatus_Ok = 0,
  FwStatus_BoundViolation = 1,
  FwStatus_UsageError = 2,
  FwStatus_NumericError = 3,
} FwStatus;

/**
 * Opaque handle to a completed experiment run.
 */
typedef struct FwRun FwRun;

/**
 * One iteration record, flattened. `has_bounds` is 0 when no exact h0
 * was available; the two `*_rhs` fields are then 0.
 */
typedef struct FwRecord {
  uint64_t t;
  double f;
  double gap;
  double min_gap;
  double gamma;
  double decrease_bound;
  double theorem_rhs;
  double refined_rhs;
  uint8_t has_bounds;
} FwRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or null. Owned by the library;
 * do not free.
 */
const char *fw_last_error(void);

/**
 * Run an experiment from a config file. On success stores a handle in
 * `out`; the caller owns it and must release it with [`fw_run_free`].
 *
 * # Safety
 * `config_path` must be a valid NUL-terminated string and `out` a valid
 * pointer.
 */
enum FwStatus fw_run_config_file(const char *config_path, struct FwRun **out);

/**
 * Number of recorded iterations.
 *
 * # Safety
 * `run` must be a live handle from [`fw_run_config_file`].
 */
uint64_t fw_run_num_records(const struct FwRun *run);

/**
 * Copy record `idx` into `record`.
 *
 * # Safety
 * `run` must be a live handle and `record` a valid pointer.
 */
enum FwStatus fw_run_record(const struct FwRun *run, uint64_t idx, struct FwRecord *record);

/**
 * Whether the run stopped at the gap threshold before the iteration
 * budget.
 *
 * # Safety
 * `run` must be a live handle.
 */
uint8_t fw_run_terminated_early(const struct FwRun *run);

/**
 * Number of failed bound checks on this run.
 *
 * # Safety
 * `run` must be a live handle.
 */
uint64_t fw_run_check_failures(const struct FwRun *run);

/**
 * The curvature constant the run was checked against.
 *
 * # Safety
 * `run` must be a live handle.
 */
double fw_run_curvature_c(const struct FwRun *run);

/**
 * Release a run handle. Null is a no-op.
 *
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void fw_run_free(struct FwRun *run);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FRANKWOLFE_H */
