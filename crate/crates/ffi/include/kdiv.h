/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef KDIV_H
#define KDIV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum KdivStatus {
  KDIV_STATUS_OK = 0,
  KDIV_STATUS_INVALID_INPUT = 1,
  KDIV_STATUS_UNSUPPORTED = 2,
  KDIV_STATUS_HYPOTHESIS_VIOLATED = 3,
  KDIV_STATUS_ITERATION_LIMIT = 4,
  KDIV_STATUS_NUMERIC = 5,
  KDIV_STATUS_NULL_POINTER = 6,
  KDIV_STATUS_UTF8 = 7,
  KDIV_STATUS_PANIC = 8,
  KDIV_STATUS_OUT_OF_RANGE = 9,
} KdivStatus;

typedef struct KdivCertificate KdivCertificate;

typedef struct KdivCouple KdivCouple;

typedef struct KdivCurve KdivCurve;

typedef struct KdivElement KdivElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into the library from the same thread.
const char *kdiv_last_error(void);

// # Safety
// `s` must come from this library and not have been freed.
void kdiv_string_free(char *s);

// Parses a couple such as `{"kind":"sequence_lp","p":0.5,"q":"inf"}`.
//
// # Safety
// `text` must be a NUL-terminated string; `out_couple` must be writable.
enum KdivStatus kdiv_couple_from_json(const char *text, struct KdivCouple **out_couple);

// # Safety
// `c` must be NULL or a live handle.
void kdiv_couple_free(struct KdivCouple *c);

// Parses `{"seq":[..]}` or `{"step":{"breaks":[..],"values":[..]}}`.
//
// # Safety
// `text` must be a NUL-terminated string; `out_element` must be writable.
enum KdivStatus kdiv_element_from_json(const char *text, struct KdivElement **out_element);

// A sequence element copied from `values[0..len]`.
//
// # Safety
// `values` must point to `len` doubles; `out_element` must be writable.
enum KdivStatus kdiv_element_from_values(const double *values,
                                         size_t len,
                                         struct KdivElement **out_element);

// Number of values (sequence entries or step pieces).
//
// # Safety
// `e` must be a live handle.
size_t kdiv_element_len(const struct KdivElement *e);

// # Safety
// `e` must be NULL or a live handle.
void kdiv_element_free(struct KdivElement *e);

// `K(t, x)` for one `t`.
//
// # Safety
// Handles must be live; `out_value` must be writable.
enum KdivStatus kdiv_k_value(const struct KdivElement *x,
                             const struct KdivCouple *couple,
                             double t,
                             double accuracy,
                             double *out_value);

// The K-curve of `x`. The grid is used by the numeric engine only.
//
// # Safety
// Handles must be live; `out_curve` must be writable.
enum KdivStatus kdiv_k_curve(const struct KdivElement *x,
                             const struct KdivCouple *couple,
                             int32_t min_exp,
                             int32_t max_exp,
                             uint32_t per_octave,
                             double accuracy,
                             struct KdivCurve **out_curve);

// Parses `{"knots":[[0,0],[1,1]],"tail_slope":0}`.
//
// # Safety
// `text` must be a NUL-terminated string; `out_curve` must be writable.
enum KdivStatus kdiv_curve_from_json(const char *text, struct KdivCurve **out_curve);

// A curve scaled by `lambda >= 0`.
//
// # Safety
// `c` must be a live handle; `out_curve` must be writable.
enum KdivStatus kdiv_curve_scale(const struct KdivCurve *c,
                                 double lambda,
                                 struct KdivCurve **out_curve);

// # Safety
// `c` must be a live handle.
double kdiv_curve_eval(const struct KdivCurve *c, double t);

// # Safety
// `c` must be NULL or a live handle.
void kdiv_curve_free(struct KdivCurve *c);

// Splits `x` along `majorants[0..n]`; `p = 1` is the linear version.
//
// # Safety
// Handles must be live, `majorants` must hold `n` of them and `out_cert`
// must be writable.
enum KdivStatus kdiv_divide(const struct KdivElement *x,
                            const struct KdivCouple *couple,
                            double p,
                            const struct KdivCurve *const *majorants,
                            size_t n,
                            struct KdivCertificate **out_cert);

// # Safety
// `c` must be a live handle.
size_t kdiv_certificate_pieces(const struct KdivCertificate *c);

// Copies the values of piece `i` into `buf[0..len]`; `len` must equal the
// element length.
//
// # Safety
// `c` must be a live handle and `buf` must hold `len` doubles.
enum KdivStatus kdiv_certificate_piece(const struct KdivCertificate *c,
                                       size_t i,
                                       double *buf,
                                       size_t len);

// Writes the measured and the certified constant; returns whether the
// certificate is valid.
//
// # Safety
// `c` must be a live handle; output pointers may be NULL.
bool kdiv_certificate_constants(const struct KdivCertificate *c,
                                double *measured,
                                double *certified);

// The full certificate as JSON; free with [`kdiv_string_free`].
//
// # Safety
// `c` must be a live handle; `out_json` must be writable.
enum KdivStatus kdiv_certificate_to_json(const struct KdivCertificate *c, char **out_json);

// # Safety
// `c` must be NULL or a live handle.
void kdiv_certificate_free(struct KdivCertificate *c);

// Runs a command-line job given as `argv[0..argc]` without the program
// name, e.g. `{"kfunc", "--couple", "...", "--element", "..."}`, and
// returns its artifact (CSV or JSON) in `out_text`.
//
// # Safety
// `argv` must hold `argc` NUL-terminated strings; `out_text` must be writable.
enum KdivStatus kdiv_run(const char *const *argv, size_t argc, char **out_text);

// Static description of a status code.
const char *kdiv_status_name(enum KdivStatus s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KDIV_H */
