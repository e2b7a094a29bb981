#ifndef FANO14_H
#define FANO14_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum Fano14Status {
  FANO14_OK = 0,
  FANO14_NULL_POINTER = 1,
  FANO14_INVALID_UTF8 = 2,
  FANO14_INVALID_ARGUMENT = 3,
  FANO14_DATA_ERROR = 4,
  FANO14_INTERNAL_ERROR = 5,
} Fano14Status;

/**
 * Opaque batch report.
 */
typedef struct Fano14Report Fano14Report;

/**
 * Run configuration. `samples = 0` skips the sampling oracle.
 */
typedef struct Fano14Options {
  size_t samples;
  uint64_t seed;
  bool parallel;
} Fano14Options;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default options: 100 samples, seed 0, serial.
 */
struct Fano14Options fano14_options_default(void);

/**
 * Run the verification batch and store a new report in `*out`.
 *
 * `scenario` selects a single scenario, or all of them (with the atlas and the
 * coverage checklist) when NULL. `data_dir` overrides the built-in data when
 * non-NULL. `options` may be NULL for the defaults.
 *
 * # Safety
 * `scenario` and `data_dir` must be NULL or NUL-terminated strings, `options`
 * NULL or a valid pointer, and `out` a valid pointer to writable storage.
 */
enum Fano14Status fano14_verify(const struct Fano14Options *options,
                                const char *scenario,
                                const char *data_dir,
                                struct Fano14Report **out);

/**
 * 1 if every check in the report passed, 0 if not, -1 for a NULL handle.
 *
 * # Safety
 * `report` must be NULL or a live handle from [`fano14_verify`].
 */
int32_t fano14_report_verdict(const struct Fano14Report *report);

/**
 * Number of scenario reports in the batch, or 0 for a NULL handle.
 *
 * # Safety
 * `report` must be NULL or a live handle from [`fano14_verify`].
 */
size_t fano14_report_scenario_count(const struct Fano14Report *report);

/**
 * The report as JSON, rationals as strings. Free with [`fano14_string_free`].
 *
 * # Safety
 * `report` must be NULL or a live handle from [`fano14_verify`].
 */
char *fano14_report_json(const struct Fano14Report *report);

/**
 * The report as plain text. Free with [`fano14_string_free`].
 *
 * # Safety
 * `report` must be NULL or a live handle from [`fano14_verify`].
 */
char *fano14_report_text(const struct Fano14Report *report);

/**
 * # Safety
 * `report` must be NULL or a handle from [`fano14_verify`] not yet freed.
 */
void fano14_report_free(struct Fano14Report *report);

/**
 * Shipped scenario names as a JSON array. Free with [`fano14_string_free`].
 */
char *fano14_scenario_names_json(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void fano14_string_free(char *s);

/**
 * Message for the last failing call on this thread, or NULL. Valid until the
 * next call into this library on the same thread; do not free.
 */
const char *fano14_last_error(void);

/**
 * Library version, statically allocated.
 */
const char *fano14_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FANO14_H */
