#ifndef GEOAP_H
#define GEOAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GeoapStatus {
  GEOAP_STATUS_OK = 0,
  GEOAP_STATUS_INVALID_ARGUMENT = 2,
  GEOAP_STATUS_DOMAIN = 3,
  GEOAP_STATUS_CERTIFICATE = 4,
  GEOAP_STATUS_NULL_POINTER = 5,
  GEOAP_STATUS_UTF8 = 6,
  GEOAP_STATUS_PANIC = 7,
} GeoapStatus;

// An integer matrix of determinant 1 (2×2 or 3×3).
typedef struct GeoapMatrix GeoapMatrix;

// A progression witness.
typedef struct GeoapWitness GeoapWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Valid until the next
// failing call on the same thread.
const char *geoap_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void geoap_string_free(char *s);

// Parses comma-separated row-major entries such as `"2,1,1,1"`.
//
// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum GeoapStatus geoap_matrix_parse(const char *text, struct GeoapMatrix **out);

// # Safety
// `m` must come from [`geoap_matrix_parse`] and not have been freed.
void geoap_matrix_free(struct GeoapMatrix *m);

// Trace as a decimal string.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum GeoapStatus geoap_matrix_trace(const struct GeoapMatrix *m, char **out);

// Least `j ≥ 1` with `modulus | b_j`.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum GeoapStatus geoap_order_p(const struct GeoapMatrix *m, uint64_t modulus, uint64_t *out);

// `2·arccosh(trace/2)` printed with `digits` significant digits (at least 25).
//
// # Safety
// `trace` must be a nul-terminated string and `out` a valid pointer.
enum GeoapStatus geoap_trace_to_length(const char *trace, uint32_t digits, char **out);

// Builds a `k`-term witness for an absolutely primitive element.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum GeoapStatus geoap_witness_build(const struct GeoapMatrix *m,
                                     uint64_t k,
                                     struct GeoapWitness **out);

// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum GeoapStatus geoap_witness_from_json(const char *json, struct GeoapWitness **out);

// # Safety
// `w` must be a live handle and `out` a valid pointer.
enum GeoapStatus geoap_witness_to_json(const struct GeoapWitness *w, char **out);

// Re-checks every claim of the witness. Returns `GEOAP_STATUS_CERTIFICATE`
// with the reasons in [`geoap_last_error`] when verification fails.
//
// # Safety
// `w` must be a live handle.
enum GeoapStatus geoap_witness_verify(const struct GeoapWitness *w);

// # Safety
// `w` must come from this library and not have been freed.
void geoap_witness_free(struct GeoapWitness *w);

// Exhaustive `W(colors, k)`; `GEOAP_STATUS_DOMAIN` when it exceeds `n_max`.
//
// # Safety
// `out` must be a valid pointer.
enum GeoapStatus geoap_vdw_number(uint32_t colors, uint32_t k, uint64_t n_max, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOAP_H */
