#ifndef IRSMEC_H
#define IRSMEC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of an FFI call.
 */
typedef enum IrsmecStatus {
  IRSMEC_STATUS_OK = 0,
  IRSMEC_STATUS_NULL_POINTER = 1,
  IRSMEC_STATUS_INVALID_UTF8 = 2,
  IRSMEC_STATUS_INVALID_ARGUMENT = 3,
  IRSMEC_STATUS_DOMAIN = 4,
  IRSMEC_STATUS_ZERO_TDMA_RATE = 5,
  IRSMEC_STATUS_BUDGET_EXCEEDED = 6,
  IRSMEC_STATUS_INCONSISTENT = 7,
  IRSMEC_STATUS_CONFIG = 8,
  IRSMEC_STATUS_IO = 9,
  IRSMEC_STATUS_SERIALIZATION = 10,
  IRSMEC_STATUS_BUFFER_TOO_SMALL = 11,
  /**
   * The certification ran but at least one suite failed.
   */
  IRSMEC_STATUS_CERTIFICATION_FAILED = 12,
  IRSMEC_STATUS_PANIC = 99,
} IrsmecStatus;

/**
 * Output format of [`irsmec_results_write`].
 */
typedef enum IrsmecFormat {
  IRSMEC_FORMAT_CSV = 0,
  IRSMEC_FORMAT_JSON = 1,
} IrsmecFormat;

/**
 * Opaque scenario configuration.
 */
typedef struct IrsmecConfig IrsmecConfig;

/**
 * Opaque table of aggregated result rows.
 */
typedef struct IrsmecResults IrsmecResults;

/**
 * One aggregated row. The scheme name is read with
 * [`irsmec_results_scheme`].
 */
typedef struct IrsmecRow {
  /**
   * False when the scenario has no sweep; `sweep_value` is then NaN.
   */
  bool has_sweep_value;
  double sweep_value;
  double mean_delay_s;
  double stderr_s;
  double mean_tno_fraction;
  size_t trials;
} IrsmecRow;

/**
 * Per-user rates in bits/s, positional in scheduling order.
 */
typedef struct IrsmecRates {
  double td[2];
  double no[2];
} IrsmecRates;

/**
 * Time division with its NOMA priority and sum delay, in seconds.
 */
typedef struct IrsmecDivision {
  double t_td_first;
  double t_no;
  double t_td_second;
  double lambda;
  double sum_delay;
} IrsmecDivision;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *irsmec_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *irsmec_version(void);

/**
 * Parses a scenario from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IrsmecStatus irsmec_config_from_json(const char *json, struct IrsmecConfig **out);

/**
 * Loads a scenario from a JSON file path or a shipped preset name.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IrsmecStatus irsmec_config_load(const char *source, struct IrsmecConfig **out);

/**
 * Releases a configuration. Null is ignored.
 *
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void irsmec_config_free(struct IrsmecConfig *config);

/**
 * Overrides the seed.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum IrsmecStatus irsmec_config_set_seed(struct IrsmecConfig *config, uint64_t seed);

/**
 * Overrides the number of trials per sweep point (at least 1).
 *
 * # Safety
 * `config` must be a live handle.
 */
enum IrsmecStatus irsmec_config_set_trials(struct IrsmecConfig *config, size_t trials);

/**
 * Sets the worker thread count; 0 picks the number of cores.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum IrsmecStatus irsmec_config_set_workers(struct IrsmecConfig *config, size_t workers);

/**
 * Runs the Monte-Carlo experiment of `config`.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum IrsmecStatus irsmec_run(const struct IrsmecConfig *config, struct IrsmecResults **out);

/**
 * Releases a result table. Null is ignored.
 *
 * # Safety
 * `results` must come from this library and not be used afterwards.
 */
void irsmec_results_free(struct IrsmecResults *results);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `results` must be null or a live handle.
 */
size_t irsmec_results_len(const struct IrsmecResults *results);

/**
 * Copies row `index` into `out`.
 *
 * # Safety
 * `results` must be a live handle and `out` a valid pointer.
 */
enum IrsmecStatus irsmec_results_row(const struct IrsmecResults *results,
                                     size_t index,
                                     struct IrsmecRow *out);

/**
 * Scheme name of row `index`, or null when out of range. Owned by the
 * handle.
 *
 * # Safety
 * `results` must be null or a live handle.
 */
const char *irsmec_results_scheme(const struct IrsmecResults *results, size_t index);

/**
 * Renders the table as CSV into `buffer`.
 *
 * `*needed` receives the size including the terminating NUL. When
 * `capacity` is too small nothing is written and `BufferTooSmall` is
 * returned, so a null buffer with zero capacity queries the size.
 *
 * # Safety
 * `buffer` must hold `capacity` bytes (or be null with zero capacity) and
 * `needed` must be a valid pointer.
 */
enum IrsmecStatus irsmec_results_to_csv(const struct IrsmecResults *results,
                                        char *buffer,
                                        size_t capacity,
                                        size_t *needed);

/**
 * Writes the table to `path`.
 *
 * # Safety
 * `results` must be a live handle and `path` a NUL-terminated string.
 */
enum IrsmecStatus irsmec_results_write(const struct IrsmecResults *results,
                                       const char *path,
                                       enum IrsmecFormat format);

/**
 * Runs the oracle certification with `instances` samples per suite.
 * Returns `CertificationFailed` when any suite fails.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum IrsmecStatus irsmec_certify(const struct IrsmecConfig *config, size_t instances);

/**
 * Optimal time division with unlimited cloud capacity.
 *
 * # Safety
 * `bits` must point to two doubles; `rates` and `out` must be valid.
 */
enum IrsmecStatus irsmec_time_division_infinite(const double *bits,
                                                const struct IrsmecRates *rates,
                                                struct IrsmecDivision *out);

/**
 * Optimal time division with finite cloud capacity; `compute_times` are
 * the cloud computing times in scheduling order.
 *
 * # Safety
 * `bits` and `compute_times` must point to two doubles each; `rates` and
 * `out` must be valid.
 */
enum IrsmecStatus irsmec_time_division_finite(const double *bits,
                                              const struct IrsmecRates *rates,
                                              const double *compute_times,
                                              struct IrsmecDivision *out);

/**
 * Cloud computing time of a task in seconds; infinite frequency gives 0.
 */
double irsmec_task_compute_time(double bits, double cycles_per_bit, double cloud_freq_hz);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IRSMEC_H */
