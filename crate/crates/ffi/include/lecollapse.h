/* Copyright 2026 lecollapse Contributors */
/* SPDX-License-Identifier: Apache-2.0 */

#ifndef LECOLLAPSE_H
#define LECOLLAPSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the nonzero values match the command-line exit codes.
typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_IO = 1,
  LC_STATUS_CONFIG = 2,
  LC_STATUS_NUMERICAL = 3,
  LC_STATUS_TIMEOUT = 4,
  LC_STATUS_NULL_ARGUMENT = 5,
  LC_STATUS_INVALID_ARGUMENT = 6,
  LC_STATUS_PANIC = 7,
} LcStatus;

// Opaque validated experiment configuration.
typedef struct LcConfig LcConfig;

// Opaque result of one absorbed collapse run.
typedef struct LcRunResult LcRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or an empty string. Valid
// until the next failing call on the same thread.
const char *lc_last_error(void);

// Library version as a static NUL-terminated string.
const char *lc_version(void);

// Parses configuration text. On success `*out` owns a new handle.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum LcStatus lc_config_parse(const char *text, struct LcConfig **out);

// Reads and parses a configuration file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum LcStatus lc_config_load(const char *path, struct LcConfig **out);

// # Safety
// `config` must come from this library and not be used afterwards.
void lc_config_free(struct LcConfig *config);

// Writes the 64-character hex configuration hash plus NUL into `buf`,
// which must hold at least 65 bytes.
//
// # Safety
// `config` must be a live handle and `buf` valid for `len` bytes.
enum LcStatus lc_config_hash(const struct LcConfig *config, char *buf, size_t len);

// Runs the configured mode into `out_dir` (or the configured directory
// when null). Outputs and the manifest are written as by the CLI.
//
// # Safety
// `config` must be a live handle; `out_dir` null or NUL-terminated.
enum LcStatus lc_run_experiment(const struct LcConfig *config, const char *out_dir);

// One collapse trajectory of the configured collapse settings.
// A run that exhausts its step budget returns `LC_STATUS_TIMEOUT` and no
// handle.
//
// # Safety
// `config` must be a live handle and `out` a valid pointer.
enum LcStatus lc_run_collapse(const struct LcConfig *config,
                              uint64_t seed,
                              struct LcRunResult **out);

// # Safety
// `result` must come from this library and not be used afterwards.
void lc_run_result_free(struct LcRunResult *result);

// Zero-based winning channel.
//
// # Safety
// `result` must be a live handle.
size_t lc_run_result_winner(const struct LcRunResult *result);

// # Safety
// `result` must be a live handle.
double lc_run_result_collapse_time(const struct LcRunResult *result);

// # Safety
// `result` must be a live handle.
size_t lc_run_result_steps(const struct LcRunResult *result);

// # Safety
// `result` must be a live handle.
uint64_t lc_run_result_slip_count(const struct LcRunResult *result);

// Probability change of one slip on channel `j` (zero-based) with
// nominal slip parameters; `sign` is +1 or -1. Writes `k` values to `out`.
//
// # Safety
// `p` must hold `k` values and `out` room for `k`.
enum LcStatus lc_slip_delta(const double *p,
                            size_t k,
                            size_t j,
                            double f_j,
                            double f_0,
                            double w,
                            double n_a,
                            double lambda,
                            double tau,
                            int32_t sign,
                            double *out);

// Collapse time scale for a system of size `l_system`; `delta <= 0`
// skips the electron-cloud refinement.
//
// # Safety
// `out` must be a valid pointer.
enum LcStatus lc_collapse_time(double w,
                               double n_a,
                               double lambda,
                               double tau,
                               double l_system,
                               double delta,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LECOLLAPSE_H */
